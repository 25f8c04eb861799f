#pragma once

#include <stdexcept>
#include <string>

namespace fprates {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid point encoding, parameter out of range, or a theorem precondition violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A point escaped a configured convex region.
class RegionError : public Error {
 public:
  using Error::Error;
};

/// A rate formula needs a schedule certificate that was not supplied.
class MissingCertificate : public Error {
 public:
  using Error::Error;
};

/// Inconsistent combination of space, map, scheme and bound.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fprates
