#include "tdo/query.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace tdo {

namespace {

struct Chain {
  double value = kInfTime;
  AnswerKind kind = AnswerKind::exact;
  int landmark = -1;
  bool exhausted = false;
  std::vector<std::pair<int, double>> hops;
  std::vector<double> radii;
  std::vector<std::size_t> sizes;
};

// Static travel-time lower bounds towards one destination: Dijkstra over the
// per-arc minimum delays on the reversed arcs. Admissible at every departure
// time, so pruning candidates whose radius plus bound cannot beat the local
// incumbent never changes a minimum.
std::vector<double> static_lower_bounds(const TdInstance &g, int destination) {
  std::vector<std::vector<std::pair<int, double>>> rev(g.n());
  for (int a = 0; a < g.m(); ++a)
    rev[g.arc(a).head].push_back({g.arc(a).tail, g.arc(a).delay.min_value()});
  std::vector<double> dist(g.n(), kInfTime);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[destination] = 0;
  queue.push({0, destination});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto &[w, len] : rev[v]) {
      if (d + len < dist[w]) {
        dist[w] = d + len;
        queue.push({dist[w], w});
      }
    }
  }
  return dist;
}

// Run-local recursion state: one memo per top-level query, keyed by the
// exact (vertex, departure bits, budget) triple so a budget-r run explores a
// subset of the budget-r+1 candidate set and answers stay monotone in the
// budget.
class Recursion {
 public:
  Recursion(const TdInstance &g, const Oracle &o, int destination,
            const std::vector<double> *bounds, BallWorkspace &ws)
      : g_(g), o_(o), destination_(destination), bounds_(bounds), ws_(ws) {}

  Chain run(int v, double t, int budget) {
    const auto key =
        std::make_tuple(v, std::bit_cast<std::uint64_t>(t), budget);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Chain c = compute(v, t, budget);
    memo_.emplace(key, c);
    return c;
  }

  std::size_t balls = 0;
  std::size_t settled = 0;

 private:
  Chain compute(int v, double t, int budget) {
    Chain c;
    c.hops = {{v, t}};
    if (v != destination_ && o_.landmarks.is_landmark[v]) {
      c.kind = AnswerKind::landmark_hit;
      c.landmark = v;
      c.value = query_summary(o_.summary_for(v), destination_, t).value;
      c.radii = {0.0};
      c.sizes = {0};
      return c;
    }
    const BallResult b =
        grow_ball(g_, o_.landmarks.is_landmark, v, t, destination_, ws_);
    ++balls;
    settled += b.settled.size();
    c.radii = {b.radius};
    c.sizes = {b.settled.size()};
    if (b.found == BallStop::destination) {
      c.value = b.radius;
      return c;
    }
    if (b.found == BallStop::exhausted) {
      c.exhausted = true;
      return c;
    }
    const int l = b.stop_vertex;
    c.kind = AnswerKind::via_landmark;
    c.landmark = l;
    c.value =
        b.radius + query_summary(o_.summary_for(l), destination_, t + b.radius).value;
    if (budget == 0) return c;

    std::vector<BallResult::Boundary> frontier = b.boundary;
    std::sort(frontier.begin(), frontier.end(),
              [](const BallResult::Boundary &x, const BallResult::Boundary &y) {
                return x.arrival != y.arrival ? x.arrival < y.arrival
                                              : x.vertex < y.vertex;
              });
    for (const BallResult::Boundary &f : frontier) {
      const double prefix = f.arrival - t;
      // sorted by arrival and subchains cost >= 0, so nothing later can win
      if (!(prefix < c.value)) break;
      if (bounds_ && !(prefix + (*bounds_)[f.vertex] < c.value)) continue;
      const Chain sub = run(f.vertex, f.arrival, budget - 1);
      if (prefix + sub.value < c.value) {
        c.value = prefix + sub.value;
        c.kind = sub.kind;
        c.landmark = sub.landmark;
        c.exhausted = sub.exhausted;
        c.hops.resize(1);
        c.hops.insert(c.hops.end(), sub.hops.begin(), sub.hops.end());
        c.radii.resize(1);
        c.radii.insert(c.radii.end(), sub.radii.begin(), sub.radii.end());
        c.sizes.resize(1);
        c.sizes.insert(c.sizes.end(), sub.sizes.begin(), sub.sizes.end());
      }
    }
    return c;
  }

  const TdInstance &g_;
  const Oracle &o_;
  const int destination_;
  const std::vector<double> *bounds_;
  BallWorkspace &ws_;
  std::map<std::tuple<int, std::uint64_t, int>, Chain> memo_;
};

QueryAnswer answer_query(const TdInstance &g, const Oracle &o, int origin,
                         int destination, double t0, int budget,
                         BallWorkspace &ws) {
  if (origin < 0 || origin >= g.n() || destination < 0 || destination >= g.n())
    throw std::out_of_range("query: vertex out of range");
  if (o.n != g.n())
    throw std::invalid_argument("query: oracle built for a different instance");
  if (budget < 0) throw std::invalid_argument("query: negative budget");
  if (!std::isfinite(t0))
    throw std::invalid_argument("query: departure time must be finite");

  std::vector<double> bounds;
  if (budget > 0) bounds = static_lower_bounds(g, destination);
  Recursion rec(g, o, destination, budget > 0 ? &bounds : nullptr, ws);
  Chain c = rec.run(origin, t0, budget);
  QueryAnswer a;
  a.origin = origin;
  a.destination = destination;
  a.t0 = t0;
  a.value = c.value;
  a.kind = c.kind;
  a.landmark = c.landmark;
  a.depth = static_cast<int>(c.hops.size()) - 1;
  a.exhausted = c.exhausted;
  a.hops = std::move(c.hops);
  a.radii = std::move(c.radii);
  a.ball_sizes = std::move(c.sizes);
  a.balls = rec.balls;
  a.settled = rec.settled;
  return a;
}

}  // namespace

const char *answer_kind_name(AnswerKind k) {
  switch (k) {
    case AnswerKind::exact:
      return "exact";
    case AnswerKind::via_landmark:
      return "via-landmark";
    case AnswerKind::landmark_hit:
      return "landmark-hit";
  }
  return "unknown";
}

QueryAnswer fca(const TdInstance &g, const Oracle &oracle, int origin,
                int destination, double t0, BallWorkspace &ws) {
  return answer_query(g, oracle, origin, destination, t0, 0, ws);
}

QueryAnswer rqa(const TdInstance &g, const Oracle &oracle, int origin,
                int destination, double t0, int budget, BallWorkspace &ws) {
  return answer_query(g, oracle, origin, destination, t0, budget, ws);
}

double sigma_for_budget(double epsilon, double psi, int budget) {
  if (budget < 0)
    throw std::invalid_argument("sigma_for_budget: negative budget");
  if (!(psi > 0) || epsilon < 0)
    throw std::invalid_argument("sigma_for_budget: bad metric parameters");
  long double s;
  if (epsilon == 0) {
    s = static_cast<long double>(psi) / (budget + 1);
  } else {
    // q^(budget+1) - 1 via expm1/log1p keeps tiny epsilon/psi from cancelling
    const long double x =
        static_cast<long double>(epsilon) / static_cast<long double>(psi);
    const long double em = std::expm1((budget + 1) * std::log1p(x));
    s = static_cast<long double>(epsilon) * (em + 1.0L) / em;
  }
  // never understate the guarantee when narrowing to double
  double out = static_cast<double>(s);
  if (static_cast<long double>(out) < s) out = std::nextafter(out, kInfTime);
  return out;
}

int budget_for_stretch(double epsilon, double psi, double sigma) {
  if (!(psi > 0) || epsilon < 0)
    throw std::invalid_argument("budget_for_stretch: bad metric parameters");
  if (!(sigma > epsilon))
    throw std::invalid_argument(
        "budget_for_stretch: targets at or below epsilon are unattainable");
  const long double delta =
      static_cast<long double>(sigma) - static_cast<long double>(epsilon);
  long double seed;
  if (epsilon == 0) {
    seed = std::ceil(static_cast<long double>(psi) / delta) - 1;
  } else {
    const long double e = epsilon;
    seed = std::ceil(std::log(1.0L + e / delta) /
                     std::log(1.0L + e / static_cast<long double>(psi))) -
           1;
  }
  if (seed > (1LL << 40))
    throw std::overflow_error("budget_for_stretch: target too close to epsilon");
  long long r = std::max(0LL, static_cast<long long>(seed));
  // the closed form only seeds; minimality is decided against the reported
  // guarantee so the pair round-trips
  while (sigma_for_budget(epsilon, psi, static_cast<int>(r)) > sigma) ++r;
  while (r > 0 && sigma_for_budget(epsilon, psi, static_cast<int>(r - 1)) <= sigma)
    --r;
  return static_cast<int>(r);
}

StretchBudget StretchBudget::for_target(double epsilon, double psi,
                                        double sigma) {
  StretchBudget b;
  b.epsilon = epsilon;
  b.psi = psi;
  b.budget = budget_for_stretch(epsilon, psi, sigma);
  b.sigma = sigma_for_budget(epsilon, psi, b.budget);
  return b;
}

StretchBudget StretchBudget::for_budget(double epsilon, double psi,
                                        int budget) {
  StretchBudget b;
  b.epsilon = epsilon;
  b.psi = psi;
  b.budget = budget;
  b.sigma = sigma_for_budget(epsilon, psi, budget);
  return b;
}

PathResult reconstruct_path(const TdInstance &g, const Oracle &oracle,
                            const QueryAnswer &answer, BallWorkspace &ws) {
  if (answer.origin < 0 || answer.origin >= g.n() || answer.destination < 0 ||
      answer.destination >= g.n() || answer.hops.empty() ||
      answer.hops.front().first != answer.origin)
    throw std::invalid_argument("reconstruct_path: answer lacks a query trace");

  PathResult out;
  if (!std::isfinite(answer.value)) return out;  // no path to expand
  out.vertices.push_back(answer.origin);

  auto fail = [&](const char *what) {
    return ReconstructionError(what, out.vertices);
  };

  // append the parent-tree segment (center .. x] of one ball
  auto append_segment = [&](const std::unordered_map<int, int> &parent_of,
                            int center, int x) {
    std::vector<int> seg;
    std::size_t guard = parent_of.size() + 1;
    while (x != center) {
      const auto it = parent_of.find(x);
      if (it == parent_of.end() || it->second < 0 || guard-- == 0)
        throw fail("broken parent chain inside a ball");
      seg.push_back(it->second);
      x = g.arc(it->second).tail;
    }
    for (auto r = seg.rbegin(); r != seg.rend(); ++r) {
      out.arcs.push_back(*r);
      out.vertices.push_back(g.arc(*r).head);
    }
  };

  // walk destination -> landmark along the summary parents, all selected at
  // the landmark departure time, then append forward
  auto append_summary_suffix = [&](int l, double tl) {
    const LandmarkSummary &ls = oracle.summary_for(l);
    std::vector<int> seg;
    std::vector<char> visited(g.n(), 0);
    int v = answer.destination;
    while (v != l) {
      if (visited[v]) throw fail("parent cycle in the landmark summary");
      visited[v] = 1;
      const SummaryAnswer sa = query_summary(ls, v, tl);
      if (sa.parent_arc < 0) throw fail("missing parent in the landmark summary");
      if (g.arc(sa.parent_arc).head != v)
        throw fail("summary parent does not enter its vertex");
      seg.push_back(sa.parent_arc);
      v = g.arc(sa.parent_arc).tail;
    }
    for (auto r = seg.rbegin(); r != seg.rend(); ++r) {
      out.arcs.push_back(*r);
      out.vertices.push_back(g.arc(*r).head);
    }
  };

  for (std::size_t k = 0; k < answer.hops.size(); ++k) {
    const auto [v, tv] = answer.hops[k];
    if (out.vertices.back() != v) throw fail("hop does not continue the path");
    const bool terminal = k + 1 == answer.hops.size();
    if (terminal && answer.kind == AnswerKind::landmark_hit) {
      if (v != answer.landmark) throw fail("landmark hit away from the landmark");
      append_summary_suffix(v, tv);
      break;
    }
    const BallResult b =
        grow_ball(g, oracle.landmarks.is_landmark, v, tv, answer.destination, ws);
    std::unordered_map<int, int> parent_of;
    parent_of.reserve(b.settled.size() * 2);
    for (const BallResult::Settled &s : b.settled)
      parent_of.emplace(s.vertex, s.parent_arc);
    if (!terminal) {
      const int w = answer.hops[k + 1].first;
      const BallResult::Boundary *hit = nullptr;
      for (const BallResult::Boundary &f : b.boundary)
        if (f.vertex == w) {
          hit = &f;
          break;
        }
      if (!hit || hit->parent_arc < 0)
        throw fail("hop is not on the ball boundary");
      append_segment(parent_of, v, g.arc(hit->parent_arc).tail);
      out.arcs.push_back(hit->parent_arc);
      out.vertices.push_back(w);
    } else if (answer.kind == AnswerKind::exact) {
      if (b.found != BallStop::destination)
        throw fail("ball stop does not match the answer kind");
      append_segment(parent_of, v, answer.destination);
    } else {
      if (b.found != BallStop::landmark || b.stop_vertex != answer.landmark)
        throw fail("ball stop does not match the answer kind");
      append_segment(parent_of, v, answer.landmark);
      append_summary_suffix(answer.landmark, tv + b.radius);
    }
  }

  double t = answer.t0;
  for (int a : out.arcs) t += g.arc(a).delay.evaluate(t);
  out.travel = t - answer.t0;
  return out;
}

}  // namespace tdo
