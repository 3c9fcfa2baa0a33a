#ifndef TDO_QUERY_HPP
#define TDO_QUERY_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tdo/summaries.hpp"
#include "tdo/tdd.hpp"

namespace tdo {

// exact: the value is the forward evaluation of a concrete parent-tree path
//        whose terminal ball settled the destination (with depth 0 it is the
//        true minimum).
// via_landmark: terminal ball stopped at a landmark, value ends with a
//        summary lookup.
// landmark_hit: a recursion origin was itself a landmark, value is its
//        summary lookup alone.
enum class AnswerKind { exact, via_landmark, landmark_hit };

const char *answer_kind_name(AnswerKind k);

// Travel-time upper bound for one (origin, destination, t0) query plus the
// shape of the winning candidate. hops lists the recursion origins along the
// winning chain with their departure times, starting at the query origin;
// radii and ball_sizes align with hops (a landmark-hit hop grows no ball and
// contributes 0 and 0). value is always the cost of a realizable route, so
// it never drops below the exact travel time. balls and settled count the
// whole run including losing candidates; exhausted marks a winning chain
// whose terminal search ran out of graph, which makes the value exact over
// the reachable set (infinity when the destination is cut off).
struct QueryAnswer {
  int origin = -1;
  int destination = -1;
  double t0 = 0;
  double value = kInfTime;
  AnswerKind kind = AnswerKind::exact;
  int landmark = -1;  // terminal landmark for the two landmark kinds
  int depth = 0;      // hops.size() - 1
  bool exhausted = false;
  std::vector<std::pair<int, double>> hops;
  std::vector<double> radii;
  std::vector<std::size_t> ball_sizes;
  std::size_t balls = 0;
  std::size_t settled = 0;
};

// One ball from (origin, t0): destination settled first gives the exact
// answer, a landmark settled first gives radius + summary, a landmark origin
// skips the ball and answers from its own summary.
QueryAnswer fca(const TdInstance &g, const Oracle &oracle, int origin,
                int destination, double t0, BallWorkspace &ws);

// fca plus recursive guessing: every boundary vertex of a landmark-stopped
// ball is tried as the next hop with its tentative label as the departure
// time and budget - 1 below it; the cheapest candidate wins. Repeated
// (vertex, departure, budget) subqueries are deduplicated, and candidates
// whose prefix alone cannot beat the current best are skipped. budget 0 is
// exactly fca.
QueryAnswer rqa(const TdInstance &g, const Oracle &oracle, int origin,
                int destination, double t0, int budget, BallWorkspace &ws);

// Guaranteed stretch excess of a budget: answers satisfy
// value <= (1 + sigma) * exact with
// sigma = epsilon * q^(budget+1) / (q^(budget+1) - 1), q = 1 + epsilon/psi,
// which decreases towards epsilon as the budget grows (the epsilon = 0 limit
// is psi / (budget + 1)). Computed in extended precision and rounded up so
// the guarantee is never overstated.
double sigma_for_budget(double epsilon, double psi, int budget);

// Smallest budget whose guarantee meets the target, i.e. minimal r with
// sigma_for_budget(epsilon, psi, r) <= sigma. Targets at or below epsilon
// are rejected: no finite budget reaches them.
int budget_for_stretch(double epsilon, double psi, double sigma);

// The two derivations pinned together: for_target picks the smallest budget
// meeting the target and reports the sharper guarantee it achieves,
// for_budget reports the guarantee of a given budget.
struct StretchBudget {
  double epsilon = 0;
  double psi = 0;
  double sigma = 0;  // achieved guarantee, always > epsilon
  int budget = 0;

  static StretchBudget for_target(double epsilon, double psi, double sigma);
  static StretchBudget for_budget(double epsilon, double psi, int budget);
};

// Thrown when parent pointers do not assemble into a path; partial() holds
// the vertices walked before the failure so callers never see a silently
// wrong path.
class ReconstructionError : public std::runtime_error {
 public:
  ReconstructionError(const std::string &what, std::vector<int> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<int> &partial() const { return partial_; }

 private:
  std::vector<int> partial_;
};

struct PathResult {
  std::vector<int> vertices;  // origin .. destination
  std::vector<int> arcs;      // one per hop
  double travel = kInfTime;   // forward evaluation of the arcs from t0
};

// Expands an answer into an arc path by replaying the balls along its hop
// chain: exact answers walk settled parent trees all the way, landmark
// answers append the summary's per-leg parents, every vertex selected by the
// leg active at the landmark departure time. The travel field re-walks the
// arcs forward from t0; for exact answers it reproduces the answer value,
// for landmark answers it may exceed it by up to the summary error.
// Infinite answers return an empty path.
PathResult reconstruct_path(const TdInstance &g, const Oracle &oracle,
                            const QueryAnswer &answer, BallWorkspace &ws);

}  // namespace tdo

#endif  // TDO_QUERY_HPP
