#pragma once

// Certification: run a scheme, search for a witness under a cap and compare
// it with a computed bound.
//
// A bound is only ever confirmed (pass) or, for schemes whose residuals are
// provably nonincreasing and whose hypotheses all checked out, refuted by an
// exhaustive scan up to the bound (fail). Everything else is inconclusive.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fprates/maps.hpp"
#include "fprates/rates.hpp"
#include "fprates/schedules.hpp"

namespace fprates {

enum class Verdict { Pass, Inconclusive, Fail };
enum class Certification { AsymptoticRegularity, Metastability, Ergodic };
enum class HypothesisStatus { Holds, Violated, Unverified };

std::string to_string(Verdict v);
std::string to_string(Certification c);
std::string to_string(HypothesisStatus s);
Verdict parse_verdict(const std::string& name);
Certification parse_certification(const std::string& name);
HypothesisStatus parse_hypothesis_status(const std::string& name);

/// Exit status of the command-line tool for a verdict: 0, 2 or 3.
int exit_code(Verdict v);

/// Decimal strings longer than `keep` digits shortened to "1234...5678 (N digits)".
std::string abbreviate(const std::string& decimal, std::size_t keep = 40);

struct Hypothesis {
  std::string name;
  HypothesisStatus status = HypothesisStatus::Unverified;
  std::string detail;

  bool operator==(const Hypothesis&) const = default;
};

/// Residuals observed while searching, indices 0 .. steps-1.
struct TraceSummary {
  std::uint64_t steps = 0;
  double first = 0.0;
  double last = 0.0;
  double min = 0.0;
  bool monotone = true;  // nonincreasing within 1e-12

  bool operator==(const TraceSummary&) const = default;
};

struct CertificationReport {
  Certification kind = Certification::AsymptoticRegularity;
  std::string map;
  std::string space;
  std::string scheme;
  std::string schedule;
  std::string x0;
  Rational eps;
  std::optional<std::string> g;
  BoundValue bound;
  std::optional<BoundValue> comparison;  // ergodic: the other Hilbert-space bound
  std::optional<std::uint64_t> witness;
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t cap = 0;
  TraceSummary trace;
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;

  bool hypotheses_hold() const;
  bool operator==(const CertificationReport&) const = default;
};

struct CertifyOptions {
  std::uint64_t cap = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t samples = 2000;      // nonexpansiveness and displacement samples
  std::uint64_t horizon = 1000;    // certificate validation horizon
  EvalLimits limits;
  /// The ergodic comparison bound is usually astronomically large; a small
  /// budget keeps its (lower bound) decimal readable.
  EvalLimits comparison_limits{4096, 1'000'000};
};

/// Residual d(x_n, T x_n) < eps from the bound on. Schemes: KM, Halpern, Ishikawa.
/// ConfigError if the bound formula does not belong to the scheme or its
/// inputs disagree with eps or the schedule; MissingCertificate if the
/// schedule lacks a certificate the formula is built from.
CertificationReport certify_asymptotic_regularity(const MapHandle& map, Scheme scheme,
                                                  const CertifiedSchedule& schedule, const Point& x0,
                                                  const Rational& eps, const BoundValue& bound,
                                                  const CertifyOptions& options = {});

/// Some N <= min(bound, cap) with residual < eps on [N, N + g(N)]. Scheme asne-km
/// with an asne-* bound.
CertificationReport certify_metastability(const MapHandle& map, const CertifiedSchedule& schedule, const Point& x0,
                                          const Rational& eps, const CounterexampleFunction& g,
                                          const BoundValue& bound, const CertifyOptions& options = {});

/// Some N <= min(bound, cap) with Cesaro means eps-close on [N, N + g(N)].
/// The bound is an ergodic-* or agt bound; the other kind is attached as comparison.
CertificationReport certify_ergodic(const MapHandle& map, const Point& x0, const Rational& eps,
                                    const CounterexampleFunction& g, const BoundValue& bound,
                                    const CertifyOptions& options = {});

struct MinimalDisplacementEstimate {
  double value = 0.0;  // min of d(x, Tx) over the samples; an upper bound of inf over the region
  std::size_t samples = 0;
};

/// Samples x from `domain` (whose region may be smaller than the map's space).
MinimalDisplacementEstimate minimal_displacement_estimate(const MapHandle& map, const Space& domain,
                                                          std::size_t samples, std::uint64_t seed);

struct IdentityCheck {
  std::string name;
  std::size_t points = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

struct ConsistencyReport {
  std::vector<IdentityCheck> checks;
  bool ok() const;
};

/// Exact integer identities between bound formulas, each on a grid of at least 20 points.
ConsistencyReport consistency_suite();

// ---- export ----

/// One CSV line: formula_id, epsilon, b_or_dC, K, L, N0, lambda_desc,
/// bound_decimal, witness, verdict, seed.
struct CsvRow {
  std::string formula_id, epsilon, b_or_dC, K, L, N0, lambda_desc, bound_decimal, witness, verdict, seed;
};

CsvRow make_row(const CertificationReport& report);
/// A bound evaluated without a certification run: witness and verdict are empty.
CsvRow make_row(const BoundValue& bound, const std::string& lambda_desc, std::uint64_t seed);
std::string to_csv(const std::vector<CsvRow>& rows);

std::string to_json(const std::vector<CertificationReport>& reports);
/// Inverse of to_json. ConfigError on malformed input.
std::vector<CertificationReport> reports_from_json(const std::string& text);

enum class ExportFormat { Csv, Json };
ExportFormat parse_export_format(const std::string& name);
/// Writes the reports; ConfigError if the file cannot be written.
void export_reports(const std::vector<CertificationReport>& reports, ExportFormat format, const std::string& path);

}  // namespace fprates
