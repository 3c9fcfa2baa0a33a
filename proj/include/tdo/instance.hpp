#ifndef TDO_INSTANCE_HPP
#define TDO_INSTANCE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "tdo/pwl.hpp"

namespace tdo {

struct Arc {
  int tail;
  int head;
  PwlFunction delay;
  bool aux = false;  // zero-delay helper arc inserted by degree reduction
};

// Directed network with one periodic delay function per arc, all sharing the
// same period. Arcs are stored CSR-style, sorted by tail.
class TdInstance {
 public:
  TdInstance(int n, double period, std::vector<Arc> arcs);

  int n() const { return n_; }
  int m() const { return static_cast<int>(arcs_.size()); }
  double period() const { return period_; }

  const Arc &arc(int a) const { return arcs_[a]; }
  // arc ids leaving v are the contiguous range [first, second)
  std::pair<int, int> out_range(int v) const {
    return {first_out_[v], first_out_[v + 1]};
  }
  int out_degree(int v) const { return first_out_[v + 1] - first_out_[v]; }

  std::size_t total_breakpoints() const;  // K
  std::size_t total_spoilers() const;     // K*, concavity-spoiling breakpoints
  std::size_t max_breakpoints() const;    // K_max over arcs
  bool fifo() const;
  bool strictly_fifo() const;

  // Text format: "n m T", then per arc "tail head k" and k lines "t v".
  // '#' starts a comment anywhere. Zero-delay arcs load as aux.
  void save(std::ostream &out) const;
  static TdInstance load(std::istream &in);

 private:
  int n_;
  double period_;
  std::vector<Arc> arcs_;
  std::vector<int> first_out_;
};

// Mapping between original vertex ids and post-reduction ids. Substituted
// vertices map to the root of their replacement tree; their old id is retired
// (kept in the graph with no arcs) so it maps back to nothing.
struct VertexMap {
  std::vector<int> to_reduced;   // original id -> reduced id
  std::vector<int> to_original;  // reduced id -> original id, -1 for new nodes

  int map(int v) const { return to_reduced[v]; }
  int unmap(int v) const { return to_original[v]; }
};

struct ReducedInstance {
  TdInstance graph;
  VertexMap map;
  std::size_t new_vertices = 0;      // sum over substituted v of d+(v)-1
  std::size_t new_zero_arcs = 0;     // sum over substituted v of d+(v)-2
};

// Replaces every vertex with out-degree > 2 by a binary tree of fresh nodes
// whose leaf arcs are the original outgoing arcs and whose root inherits the
// incoming arcs. Distances between original vertices (through the map) are
// unchanged for every departure time.
ReducedInstance reduce_out_degree(const TdInstance &g);

// Network with every arc turned around and its delay re-parameterized by
// arrival time: rev(t_v) = t_v - Arr^-1(t_v). Requires strict FIFO (arrival
// inversion needs strictly increasing arrivals). Reverse functions can be
// steeper than -1, so they are stored as summary-kind functions.
TdInstance reverse_delays(const TdInstance &g);

// Global bounds of the travel-time metric. psi is always derived on the fly
// so it cannot go stale against its inputs.
struct MetricParams {
  double lambda_min = 0;  // steepest observed descent, as a positive number
  double lambda_max = 0;  // steepest observed ascent
  double zeta = 1;        // max D[o,d](t) / D[d,o](t)
  double epsilon = 0;     // approximation parameter the oracle runs with
  bool certified = false; // true only for generator-certified upper bounds

  double psi() const {
    return 1 + lambda_max * (1 + epsilon) * (1 + 2 * zeta + lambda_max * zeta) +
           (1 + epsilon) * zeta;
  }
};

// Empirical lower bounds on Lambda/zeta from sampled shortest travel times
// (divided differences over a departure-time grid; ratios for zeta).
// Disconnected sampled pairs are skipped; throws if every sample was
// disconnected. Deterministic in (seed).
MetricParams estimate_metric_params(const TdInstance &g, int samples,
                                    std::uint64_t seed);

}  // namespace tdo

#endif  // TDO_INSTANCE_HPP
