#pragma once

// Command-line front end: axioms, bounds, certify, sweep, consistency.
//
// Exit status: 0 pass (or a plain successful run), 2 inconclusive, 3 fail,
// 64 for malformed invocations and out-of-range parameters.

#include <iosfwd>
#include <string>

#include "fprates/harness.hpp"

namespace fprates {

inline constexpr int kExitUsage = 64;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Presets. All throw ConfigError on unknown names or malformed parameters.

/// real, euclidean<d>, maxnorm<d>, lp:<d>,<p>, disk, tree:demo, tree:<file>, product:<a>+<b>.
SpacePtr parse_space_preset(const std::string& spec);
/// "pi/2", "-pi", "2*pi/3", or a plain number of radians.
double parse_angle(const std::string& text);
/// rotation:<angle>, disk-rotation:<angle>, translation:<t>, reflection, projection,
/// kirk, identity, contraction:<t>.
MapHandle parse_map_preset(const std::string& spec);
/// Start point used when none is given: (1,0) in the plane, 0 on the line,
/// (0.5,0.5) for the Kirk example, 0.5 on the disk.
Point default_start(const MapHandle& map);
/// Point literal "x" or "x,y" (the disk reads "x,y" as x + iy).
Point parse_point(const MapHandle& map, const std::string& text);
/// lambda: const:<q> or 1/n. s: none, zero, geometric:<s0>,<q>.
CertifiedSchedule parse_schedule_preset(const std::string& lambda, const std::string& s);

}  // namespace fprates
