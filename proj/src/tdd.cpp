#include "tdo/tdd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

namespace tdo {

namespace {

using HeapEntry = std::pair<double, int>;  // (key, vertex)
using MinHeap =
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;
using MaxHeap = std::priority_queue<HeapEntry>;

}  // namespace

TddResult tdd_one_to_all(const TdInstance &g, int origin, double t0) {
  if (origin < 0 || origin >= g.n())
    throw std::invalid_argument("tdd: origin out of range");
  TddResult r;
  r.arrival.assign(g.n(), kInfTime);
  r.parent_arc.assign(g.n(), -1);
  r.order.reserve(g.n());
  std::vector<char> done(g.n(), 0);

  MinHeap heap;
  r.arrival[origin] = t0;
  heap.push({t0, origin});
  while (!heap.empty()) {
    const auto [t, v] = heap.top();
    heap.pop();
    if (done[v]) continue;  // stale entry
    done[v] = 1;
    r.order.push_back(v);
    const auto [lo, hi] = g.out_range(v);
    for (int a = lo; a < hi; ++a) {
      const Arc &arc = g.arc(a);
      if (done[arc.head]) continue;
      ++r.relaxed;
      ++r.evaluations;
      const double cand = t + arc.delay.evaluate(t);
      if (cand < r.arrival[arc.head]) {
        r.arrival[arc.head] = cand;
        r.parent_arc[arc.head] = a;
        heap.push({cand, arc.head});
      }
    }
  }
  return r;
}

TreeSlopes tree_slopes(const TdInstance &g, const TddResult &r) {
  TreeSlopes s;
  const std::size_t n = r.arrival.size();
  // arrival-time derivatives along the tree; D slopes are these minus 1.
  // Arrivals carry float noise, so an arc evaluated right at one of its
  // breakpoints (which is exactly what happens at projected concavity cuts)
  // could pick the wrong leg; widening over both adjacent legs keeps left a
  // lower and right an upper bound, the only safe directions.
  const double tol = 1e-9 * std::max(1.0, g.period());
  std::vector<double> aleft(n, 0.0), aright(n, 0.0);
  s.left.assign(n, 0.0);
  s.right.assign(n, 0.0);
  for (int v : r.order) {
    const int a = r.parent_arc[v];
    if (a < 0) {  // origin
      aleft[v] = aright[v] = 1.0;
      continue;
    }
    const Arc &arc = g.arc(a);
    const double tu = r.arrival[arc.tail];
    const auto [lo, hi] = arc.delay.slope_range(tu, tol);
    aright[v] = aright[arc.tail] * (1.0 + hi);
    aleft[v] = aleft[arc.tail] * (1.0 + lo);
    s.right[v] = aright[v] - 1.0;
    s.left[v] = aleft[v] - 1.0;
  }
  return s;
}

BallResult grow_ball(const TdInstance &g, const std::vector<char> &is_landmark,
                     int origin, double t0, int destination, BallWorkspace &ws) {
  if (origin < 0 || origin >= g.n())
    throw std::invalid_argument("grow_ball: origin out of range");
  if (static_cast<int>(is_landmark.size()) != g.n())
    throw std::invalid_argument("grow_ball: landmark flags sized wrong");

  if (static_cast<int>(ws.dist.size()) < g.n()) {
    ws.dist.resize(g.n());
    ws.parent.resize(g.n());
    ws.stamp.assign(g.n(), 0);
    ws.settled_flag.resize(g.n());
  }
  ++ws.epoch;
  const int epoch = ws.epoch;
  auto touch = [&](int v) {
    if (ws.stamp[v] != epoch) {
      ws.stamp[v] = epoch;
      ws.dist[v] = kInfTime;
      ws.parent[v] = -1;
      ws.settled_flag[v] = 0;
    }
  };

  BallResult r;
  r.center = origin;
  r.t0 = t0;

  MinHeap heap;
  touch(origin);
  ws.dist[origin] = t0;
  heap.push({t0, origin});
  std::vector<int> touched{origin};

  while (!heap.empty()) {
    const auto [t, v] = heap.top();
    heap.pop();
    if (ws.settled_flag[v]) continue;
    ws.settled_flag[v] = 1;
    r.settled.push_back({v, t, ws.parent[v]});
    if (v == destination) {
      r.found = BallStop::destination;
      r.stop_vertex = v;
      r.radius = t - t0;
      break;
    }
    if (is_landmark[v]) {
      r.found = BallStop::landmark;
      r.stop_vertex = v;
      r.radius = t - t0;
      break;
    }
    const auto [lo, hi] = g.out_range(v);
    for (int a = lo; a < hi; ++a) {
      const Arc &arc = g.arc(a);
      touch(arc.head);
      if (ws.settled_flag[arc.head]) continue;
      ++r.relaxed;
      ++r.evaluations;
      const double cand = t + arc.delay.evaluate(t);
      if (cand < ws.dist[arc.head]) {
        if (ws.dist[arc.head] == kInfTime) touched.push_back(arc.head);
        ws.dist[arc.head] = cand;
        ws.parent[arc.head] = a;
        heap.push({cand, arc.head});
      }
    }
  }

  if (r.stop_vertex < 0) {
    r.found = BallStop::exhausted;
    r.radius = r.settled.empty() ? 0.0 : r.settled.back().arrival - t0;
  }

  std::sort(touched.begin(), touched.end());
  for (int v : touched)
    if (!ws.settled_flag[v] && ws.dist[v] < kInfTime)
      r.boundary.push_back({v, ws.dist[v], ws.parent[v]});
  return r;
}

ReverseTddResult reverse_tdd_latest_departure(const TdInstance &rev, int target,
                                              double t_target) {
  if (target < 0 || target >= rev.n())
    throw std::invalid_argument("reverse_tdd: target out of range");
  ReverseTddResult r;
  r.departure.assign(rev.n(), -kInfTime);
  r.parent_arc.assign(rev.n(), -1);
  std::vector<char> done(rev.n(), 0);

  MaxHeap heap;
  r.departure[target] = t_target;
  heap.push({t_target, target});
  while (!heap.empty()) {
    const auto [t, v] = heap.top();
    heap.pop();
    if (done[v]) continue;
    done[v] = 1;
    const auto [lo, hi] = rev.out_range(v);
    for (int a = lo; a < hi; ++a) {
      const Arc &arc = rev.arc(a);
      if (done[arc.head]) continue;
      ++r.relaxed;
      ++r.evaluations;
      // arc.delay is the reverse delay, a function of the arrival time t
      const double cand = t - arc.delay.evaluate(t);
      if (cand > r.departure[arc.head]) {
        r.departure[arc.head] = cand;
        r.parent_arc[arc.head] = a;
        heap.push({cand, arc.head});
      }
    }
  }
  return r;
}

}  // namespace tdo
