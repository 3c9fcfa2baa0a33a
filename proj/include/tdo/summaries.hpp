#ifndef TDO_SUMMARIES_HPP
#define TDO_SUMMARIES_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tdo/instance.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

struct OracleConfig {
  double epsilon = 0.1;  // relative error target of the stored approximations
  double rho = 0.1;      // landmark sampling probability
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int max_depth = 40;        // hard cap on the bisection depth per interval
  bool keep_samples = false;  // retain per-vertex sample diagnostics
};

// Independent Bernoulli(rho) pick per vertex. An empty draw promotes one
// uniformly random vertex so the landmark set is never empty.
struct LandmarkSet {
  std::vector<int> ids;           // sorted
  std::vector<char> is_landmark;  // n flags
  bool forced = false;            // the empty-draw promotion fired
};

LandmarkSet select_landmarks(int n, double rho, std::uint64_t seed);

// Departure times at which a path from a landmark can cross a delay
// breakpoint whose slope jumps upward. Between consecutive cut times every
// travel-time function out of that landmark is concave, which is what the
// worst-case error formula of the bisection needs. One latest-departure
// search per spoiling breakpoint serves all landmarks at once.
struct SpoilerProjection {
  std::vector<std::vector<double>> cuts;  // per landmark, sorted, inside (0,T)
  std::size_t spoilers = 0;               // spoiling breakpoints projected
  std::size_t images = 0;                 // finite projected times, pre-dedup
};

SpoilerProjection project_spoilers(const TdInstance &g, const TdInstance &rev,
                                   const LandmarkSet &landmarks);

// Approximate travel-time function from one landmark to one vertex: exact
// samples plus worst-case peak points, so the function never dips below the
// truth and stays within the configured relative error where the bisection
// deactivated normally. parent[i] is the tree arc into the vertex at the leg
// starting at breakpoint i (the wrap leg uses the last entry).
struct VertexSummary {
  PwlFunction fn;
  std::vector<int> parent;
  bool reachable = true;
};

struct LandmarkSummary {
  int landmark = -1;
  double period = 0;
  std::vector<VertexSummary> per_vertex;  // size n
  std::vector<double> cuts;               // concavity cuts used, inside (0,T)

  int depth_cap = 0;
  std::size_t probes = 0;      // earliest-arrival runs spent
  std::size_t samples = 0;     // exact sample points stored
  std::size_t midpoints = 0;   // worst-case peak points stored
  std::size_t capped = 0;      // interval/vertex pairs cut off by the cap
  std::size_t violations = 0;  // concavity rejections of the error formula

  // diagnostics, only filled with keep_samples: the exact sample times kept
  // per vertex, and the travel-time range seen across every probe
  std::vector<std::vector<double>> sample_times;
  std::vector<double> d_min, d_max;

  std::size_t points() const;  // stored breakpoints over all vertices
};

// Bisects the landmark's horizon, subinterval by subinterval, probing
// endpoints and midpoints with exact earliest-arrival runs. A vertex
// deactivates on an interval once the worst-case error of the chord against
// the one-sided tree slopes drops under epsilon times the smaller endpoint
// value; the peak of the two tangents is stored so the approximation stays an
// upper bound.
LandmarkSummary bisect_landmark(const TdInstance &g, int landmark,
                                const std::vector<double> &cuts,
                                const OracleConfig &cfg);

struct Oracle {
  int n = 0;
  double period = 0;
  OracleConfig config;
  LandmarkSet landmarks;
  std::vector<LandmarkSummary> summaries;  // aligned with landmarks.ids
  std::vector<int> summary_of;             // vertex -> summary index or -1

  std::size_t spoilers = 0;
  std::size_t images = 0;

  const LandmarkSummary &summary_for(int landmark) const;
  std::size_t total_points() const;
  std::size_t total_samples() const;
  std::size_t total_midpoints() const;
  std::size_t total_probes() const;
  std::size_t total_capped() const;
  std::size_t total_violations() const;
};

Oracle build_oracle(const TdInstance &g, const OracleConfig &cfg);

struct SummaryAnswer {
  double value = kInfTime;
  int parent_arc = -1;
  int leg = -1;
};

// Approximate travel time from the summary's landmark to v at departure t,
// with the tree arc into v recorded for the leg that answered.
SummaryAnswer query_summary(const LandmarkSummary &ls, int v, double t);

// Text shard: "TDSUMMARY 1", landmark/n/T, stats, cut table, then per vertex
// a count and (t, value, parent) triples. Shortest round-trip decimals make
// save/load/save byte-identical.
void save_summary(std::ostream &out, const LandmarkSummary &ls);
LandmarkSummary load_summary(std::istream &in);

// "TDORACLE 1" header with the build parameters, then every shard.
void save_oracle(std::ostream &out, const Oracle &o);
Oracle load_oracle(std::istream &in);

}  // namespace tdo

#endif  // TDO_SUMMARIES_HPP
