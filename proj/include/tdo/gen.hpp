#ifndef TDO_GEN_HPP
#define TDO_GEN_HPP

#include <cstdint>

#include "tdo/instance.hpp"

namespace tdo {

enum class Topology { grid, random_sparse };

// constant: flat delays. concave_bell: one peak inside the period with the
// valley pinned at t=0, so every interior breakpoint is concave. mixed:
// constant delays except for a chosen set of arcs carrying one interior
// valley each; the valley is the only breakpoint anywhere whose slope
// increases, so the instance-wide spoiler count is exact.
enum class DelayProfile { constant, concave_bell, mixed };

// Recipe for a synthetic instance. Arcs come in opposite-direction pairs
// sharing a base delay, so instances are strongly connected and close to
// symmetric. random_sparse lays a ring and adds random chords until m is
// about arc_factor * n; grid wires a near-square 4-neighbor mesh (n kept
// exact, the last row may be partial).
struct GenSpec {
  int n = 1000;
  Topology topology = Topology::random_sparse;
  double arc_factor = 3.0;  // random_sparse only: target m / n
  DelayProfile profile = DelayProfile::constant;
  int spoilers = 0;         // mixed only: exact instance-wide count
  double slope_cap = 0.5;   // max leg slope of any generated delay
  double period = 24.0;
  double base_min = 1.0;    // per-pair base delay range
  double base_max = 10.0;
  std::uint64_t seed = 0;
};

// Deterministic in spec.seed. Every delay keeps two breakpoints (anchor at
// t=0 plus one more), every leg slope sits in [-1 + 1e-5, slope_cap], and
// the concavity-spoiling count equals the requested one (0 unless mixed).
// Throws std::invalid_argument on infeasible specs.
TdInstance generate(const GenSpec &spec);

// True upper bounds on the metric of a strongly connected instance: static
// Dijkstras over per-arc min/max delays sandwich every time-dependent travel
// time (bounding zeta and the hop count of any optimal path), and slope
// products over the non-constant arcs bound the travel-time slopes. Exact on
// constant-profile instances. Runs 2n Dijkstras. Throws std::invalid_argument
// when some ordered pair is unreachable or has a zero-delay connection, since
// zeta is unbounded there; degree-reduced instances fall in that bucket.
MetricParams certify_metric_params(const TdInstance &g, double epsilon);

}  // namespace tdo

#endif  // TDO_GEN_HPP
