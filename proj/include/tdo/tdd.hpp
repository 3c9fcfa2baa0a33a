#ifndef TDO_TDD_HPP
#define TDO_TDD_HPP

#include <cstddef>
#include <limits>
#include <vector>

#include "tdo/instance.hpp"

namespace tdo {

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Earliest-arrival label-setting from one origin at a fixed departure time.
// FIFO delays make settled labels final. Ties in the queue break on vertex id
// so runs are deterministic.
struct TddResult {
  std::vector<double> arrival;  // kInfTime where unreachable
  std::vector<int> parent_arc;  // -1 at the origin and unreached vertices
  std::vector<int> order;       // vertices in settle order
  std::size_t relaxed = 0;
  std::size_t evaluations = 0;
};

TddResult tdd_one_to_all(const TdInstance &g, int origin, double t0);

// One-sided slopes of D[origin,v] as a function of the departure time,
// computed along the parent tree: the arrival slope is the product of
// (1 + arc slope) factors at the local departure times, and D = Arr - t.
// Any optimal path's right slope upper-bounds the envelope's right slope and
// its left slope lower-bounds the envelope's left slope, which is the safe
// direction for worst-case error estimates. Arc slopes are widened over both
// adjacent legs when an arrival sits within float tolerance of an arc
// breakpoint, so the bounds survive the noise of landing exactly on a kink.
struct TreeSlopes {
  std::vector<double> left;
  std::vector<double> right;
};

TreeSlopes tree_slopes(const TdInstance &g, const TddResult &r);

enum class BallStop { landmark, destination, exhausted };

// Dijkstra ball grown from origin until the first landmark or the
// destination is settled (destination wins when both apply). The origin
// itself counts: a landmark origin yields a one-vertex ball of radius 0.
struct BallResult {
  int center = -1;
  double t0 = 0;
  BallStop found = BallStop::exhausted;
  int stop_vertex = -1;  // the settled landmark/destination, -1 if exhausted
  double radius = 0;     // travel time to stop_vertex

  struct Settled {
    int vertex;
    double arrival;
    int parent_arc;
  };
  std::vector<Settled> settled;  // in settle order

  // touched but not settled when the search stopped: heads of relaxed arcs
  // leaving the ball, with their tentative labels
  struct Boundary {
    int vertex;
    double arrival;
    int parent_arc;
  };
  std::vector<Boundary> boundary;

  std::size_t relaxed = 0;
  std::size_t evaluations = 0;

  // arrival of a settled vertex, kInfTime if v is not in the ball
  double arrival_of(int v) const {
    for (const Settled &s : settled)
      if (s.vertex == v) return s.arrival;
    return kInfTime;
  }
};

// destination < 0 means "no destination": grow until a landmark or
// exhaustion. Scratch arrays are kept in a workspace so query algorithms can
// grow many balls without re-allocating n-sized buffers.
struct BallWorkspace {
  std::vector<double> dist;
  std::vector<int> parent;
  std::vector<int> stamp;
  std::vector<char> settled_flag;
  int epoch = 0;
};

BallResult grow_ball(const TdInstance &g, const std::vector<char> &is_landmark,
                     int origin, double t0, int destination,
                     BallWorkspace &ws);

// Latest departure time per vertex so that `target` is reached no later than
// t_target. Runs as max-key label-setting over the reverse instance produced
// by reverse_delays (arc delays there are functions of the arrival time, so
// no function inversion happens during the search). -inf where the target
// cannot be reached.
struct ReverseTddResult {
  std::vector<double> departure;
  std::vector<int> parent_arc;  // arc ids of the reverse instance
  std::size_t relaxed = 0;
  std::size_t evaluations = 0;
};

ReverseTddResult reverse_tdd_latest_departure(const TdInstance &rev, int target,
                                              double t_target);

}  // namespace tdo

#endif  // TDO_TDD_HPP
