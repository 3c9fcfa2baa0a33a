#ifndef TDO_TOOLKIT_HPP
#define TDO_TOOLKIT_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdo/query.hpp"
#include "tdo/summaries.hpp"

namespace tdo {

// ---------------------------------------------------------------------------
// validation against the exact earliest-arrival oracle

struct ValidateConfig {
  int times_per_landmark = 16;  // random sandwich probe times per landmark
  int queries = 300;            // sampled (o, d, t) stretch checks
  int budget = 2;               // recursion checked for every r in [0, budget]
  int reconstructions = 60;     // replayed paths per answer kind
  // stored breakpoint times are probed too, so a corrupted summary value is
  // caught at its own breakpoint; capped by this many exact runs per landmark
  std::size_t breakpoint_probes_per_landmark = 512;
  std::uint64_t seed = 0;
  MetricParams metric;  // certified or estimated bounds behind the ceilings
};

struct ValidateCheck {
  std::string name;
  bool pass = true;
  // ratio checks: worst observed value / ceiling, pass while <= 1.
  // margin checks: worst observed difference, pass while <= tolerance.
  double worst = 0;
  double limit = 1;        // the pass threshold the check used
  std::string witness;     // "l=.. v=.. t=.." or "o=.. d=.. t=.." of the worst
  std::size_t samples = 0;
};

struct ValidateReport {
  std::vector<ValidateCheck> checks;
  bool pass = true;
};

// Samples summaries and query answers against exact earliest-arrival runs:
// sandwich bounds per landmark (random times plus every stored breakpoint
// time, capped), one-ball and recursive stretch ceilings, budget
// monotonicity, and path reconstruction replay. cfg.metric.epsilon is
// overridden by the oracle's build epsilon so the ceilings match the data.
ValidateReport validate(const TdInstance &g, const Oracle &o,
                        const ValidateConfig &cfg);

// ---------------------------------------------------------------------------
// benchmark sweeps

struct BenchConfig {
  std::vector<double> rhos = {0.1};
  std::vector<double> epsilons = {0.1};
  std::vector<int> budgets = {0};
  int queries = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  MetricParams metric;  // bounds behind the stretch ceilings
};

// One row per (rho, epsilon, budget); the oracle is built once per
// (rho, epsilon) and shared by its budget rows. Bound columns sit next to
// their measured counterparts; the shape columns carry the theoretical
// n^(2-a) space and n^((r+1)a) query-cost forms for rho = n^(-a).
struct BenchRow {
  double rho = 0;
  double epsilon = 0;
  int budget = 0;
  std::size_t landmarks = 0;
  double pre_seconds = 0;
  std::size_t pre_points = 0;  // stored breakpoints, the space measure
  std::size_t pre_probes = 0;  // exact earliest-arrival runs spent building
  double u_mean = 0;           // per-pair stored breakpoint count
  std::size_t u_max = 0;
  // worst per-subinterval stored count over the pair's own ceiling
  // 4 log_{1+eps}(range) + 2, healthy while <= 1
  double u_worst_ratio = 0;
  double query_mean_us = 0;
  double query_p95_us = 0;
  double stretch_mean = 1;
  double stretch_max = 1;
  double stretch_bound = 0;  // 1+eps+psi for budget 0, 1+sigma(r) beyond
  double ball_mean = 0;
  double ball_bound = 0;  // 1/rho
  double space_shape = 0;
  double time_shape = 0;
};

struct BenchReport {
  int n = 0;
  int m = 0;
  std::vector<BenchRow> rows;
};

BenchReport bench(const TdInstance &g, const BenchConfig &cfg);

// CSV starts with the versioned header row; the table is fixed-width text.
std::string bench_csv(const BenchReport &r);
std::string bench_table(const BenchReport &r);

// ---------------------------------------------------------------------------
// ball-size distribution

struct BallSizeStats {
  double mean = 0;
  double tail_threshold = 0;  // (1/rho) ln(1/rho)
  double tail_frac = 0;       // share of balls larger than the threshold
  double tv_geometric = 0;    // total variation against geometric(rho)
  std::vector<std::size_t> histogram;  // histogram[k] = balls of size k+1
};

// Grows destination-free balls from random (origin, time) pairs. Settling a
// fresh vertex is landmark with probability rho independently, so sizes
// follow geometric(rho) until a ball exhausts its component.
BallSizeStats sample_ball_sizes(const TdInstance &g,
                                const std::vector<char> &is_landmark,
                                double rho, int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// query batch and answer line formats

struct QueryRequest {
  int origin = 0;
  int destination = 0;
  double t0 = 0;
};

// Lines of "o d t", '#' comments and blank lines skipped.
std::vector<QueryRequest> read_query_batch(std::istream &in);

// One record per line:
//   o d t0 kind value depth k size_1..size_k [p vertex_1..vertex_p]
// with shortest round-trip decimals and the optional reconstructed path
// appended count-first.
void write_answer_line(std::ostream &out, const QueryAnswer &a,
                       const PathResult *path);

struct AnswerRecord {
  QueryAnswer answer;  // wire fields only: o, d, t0, kind, value, depth, sizes
  bool has_path = false;
  std::vector<int> path;
};

AnswerRecord parse_answer_line(const std::string &line);

AnswerKind answer_kind_from_name(const std::string &name);

}  // namespace tdo

#endif  // TDO_TOOLKIT_HPP
