#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tdo/query.hpp"
#include "tdo/summaries.hpp"
#include "tdo/tdd.hpp"
#include "test_support.hpp"

using namespace tdo;
using namespace tdo_test;

namespace {

PwlFunction const_delay(double T, double c) {
  return PwlFunction(FnKind::delay, T, {{0.0, c}});
}

// every undirected edge carried as two arcs with one constant delay, so the
// metric is static and symmetric: lambda_max = 0, zeta = 1, psi = 2 + eps
TdInstance constant_symmetric_instance(std::mt19937_64 &rng, int n, int extra,
                                       double T) {
  std::vector<Arc> arcs;
  auto add_edge = [&](int u, int w, double c) {
    arcs.push_back({u, w, const_delay(T, c), false});
    arcs.push_back({w, u, const_delay(T, c), false});
  };
  for (int v = 0; v < n; ++v)
    add_edge(v, (v + 1) % n, uniform_in(rng, 2.0, 10.0));
  for (int e = 0; e < extra; ++e) {
    int u = (int)uniform_index(rng, n);
    int w = (int)uniform_index(rng, n);
    if (u != w) add_edge(u, w, uniform_in(rng, 2.0, 10.0));
  }
  return TdInstance(n, T, std::move(arcs));
}

double exact_travel(const TdInstance &g, int o, int d, double t0) {
  const TddResult r = tdd_one_to_all(g, o, t0);
  return r.arrival[d] == kInfTime ? kInfTime : r.arrival[d] - t0;
}

void check_connected(const TdInstance &g, const PathResult &p, int o, int d) {
  REQUIRE(!p.vertices.empty());
  CHECK(p.vertices.front() == o);
  CHECK(p.vertices.back() == d);
  REQUIRE(p.arcs.size() + 1 == p.vertices.size());
  for (std::size_t i = 0; i < p.arcs.size(); ++i) {
    CHECK(g.arc(p.arcs[i]).tail == p.vertices[i]);
    CHECK(g.arc(p.arcs[i]).head == p.vertices[i + 1]);
  }
}

}  // namespace

TEST_CASE("stretch guarantee worked values") {
  // frozen from exact rational arithmetic on the binary doubles
  CHECK(sigma_for_budget(0.1, 4.0, 0) == doctest::Approx(4.1).epsilon(1e-14));
  CHECK(sigma_for_budget(0.1, 4.0, 1) ==
        doctest::Approx(2.0753086419753086).epsilon(1e-14));
  CHECK(sigma_for_budget(0.1, 4.0, 2) ==
        doctest::Approx(1.4005486689697215).epsilon(1e-14));
  CHECK(sigma_for_budget(0.1, 4.0, 20) ==
        doctest::Approx(0.24714930925399295).epsilon(1e-14));

  // rounding never understates: reported value sits at or above the truth
  CHECK(sigma_for_budget(0.1, 4.0, 0) >= 4.1);

  // the epsilon = 0 limit is psi / (budget + 1), here exactly representable
  CHECK(sigma_for_budget(0.0, 4.0, 3) == 1.0);
  CHECK(sigma_for_budget(0.0, 2.0, 0) == 2.0);
  CHECK(sigma_for_budget(1e-12, 4.0, 3) == doctest::Approx(1.0).epsilon(1e-9));

  // decreasing in the budget, always above epsilon
  for (int r = 0; r < 10; ++r)
    CHECK(sigma_for_budget(0.1, 4.0, r + 1) < sigma_for_budget(0.1, 4.0, r));
  CHECK(sigma_for_budget(0.1, 4.0, 200) > 0.1);

  CHECK_THROWS_AS(sigma_for_budget(0.1, 4.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(sigma_for_budget(0.1, 0.0, 2), std::invalid_argument);
}

TEST_CASE("budget for a target stretch") {
  // frozen: sigma(185) = 0.101022... > 0.101 >= sigma(186) = 0.100997...
  CHECK(budget_for_stretch(0.1, 4.0, 0.101) == 186);
  // frozen boundaries around sigma(1) = 2.0753086419753086...
  CHECK(budget_for_stretch(0.1, 4.0, 2.08) == 1);
  CHECK(budget_for_stretch(0.1, 4.0, 2.075) == 2);
  CHECK(budget_for_stretch(0.1, 4.0, 4.11) == 0);

  // unattainable targets: sigma(r) > epsilon for every finite budget
  CHECK_THROWS_AS(budget_for_stretch(0.1, 4.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(budget_for_stretch(0.1, 4.0, 0.05), std::invalid_argument);

  // static symmetric regime: epsilon = 0, psi = 2, target 2/(t+1) needs
  // budget t; the nudge keeps the real-valued boundary case on its safe side
  for (int t = 1; t <= 8; ++t)
    CHECK(budget_for_stretch(0.0, 2.0, 2.0 / (t + 1) * (1 + 1e-12)) == t);

  // round-trip consistency in both directions
  for (int r = 0; r <= 10; ++r) {
    CHECK(budget_for_stretch(0.1, 4.0, sigma_for_budget(0.1, 4.0, r)) == r);
    CHECK(budget_for_stretch(0.25, 7.3, sigma_for_budget(0.25, 7.3, r)) == r);
  }

  StretchBudget tgt = StretchBudget::for_target(0.1, 4.0, 0.101);
  CHECK(tgt.budget == 186);
  CHECK(tgt.sigma <= 0.101);
  CHECK(tgt.sigma > 0.1);
  StretchBudget fixed = StretchBudget::for_budget(0.1, 4.0, 5);
  CHECK(fixed.budget == 5);
  CHECK(fixed.sigma == sigma_for_budget(0.1, 4.0, 5));
}

TEST_CASE("fca answers exactly when the destination precedes every landmark") {
  const double T = 100.0;
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, const_delay(T, 1.0), false});
  arcs.push_back({1, 2, const_delay(T, 1.0), false});
  arcs.push_back({0, 5, const_delay(T, 50.0), false});
  TdInstance g(6, T, std::move(arcs));
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  Oracle o = manual_oracle(g, {5}, cfg);
  BallWorkspace ws;

  QueryAnswer a = fca(g, o, 0, 2, 7.0, ws);
  CHECK(a.kind == AnswerKind::exact);
  CHECK(a.value == 2.0);
  CHECK(a.landmark == -1);
  CHECK(a.depth == 0);
  CHECK(a.balls == 1);
  REQUIRE(a.radii.size() == 1);
  CHECK(a.radii[0] == 2.0);
  CHECK(a.ball_sizes[0] == 3);

  QueryAnswer self = fca(g, o, 0, 0, 7.0, ws);
  CHECK(self.kind == AnswerKind::exact);
  CHECK(self.value == 0.0);
  CHECK(self.radii[0] == 0.0);

  // the landmark origin answers from its own summary even for itself
  QueryAnswer hit = fca(g, o, 5, 2, 7.0, ws);
  CHECK(hit.kind == AnswerKind::landmark_hit);
  CHECK(hit.value == kInfTime);  // nothing leaves vertex 5
}

TEST_CASE("fca via landmark decomposes into radius plus summary") {
  const double T = 60.0;
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, const_delay(T, 1.0), false});
  arcs.push_back({1, 2, const_delay(T, 3.0), false});
  TdInstance g(3, T, std::move(arcs));
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  Oracle o = manual_oracle(g, {1}, cfg);
  BallWorkspace ws;

  QueryAnswer a = fca(g, o, 0, 2, 11.0, ws);
  CHECK(a.kind == AnswerKind::via_landmark);
  CHECK(a.landmark == 1);
  REQUIRE(a.radii.size() == 1);
  CHECK(a.radii[0] == 1.0);
  const double suffix = query_summary(o.summary_for(1), 2, 12.0).value;
  CHECK(a.value == a.radii[0] + suffix);
  CHECK(a.value == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("fca respects the certified stretch bound on symmetric instances") {
  const double eps = 0.1;
  MetricParams mp;
  mp.lambda_max = 0.0;
  mp.zeta = 1.0;
  mp.epsilon = eps;
  const double psi = mp.psi();
  CHECK(psi == doctest::Approx(2.0 + eps).epsilon(1e-15));

  int landmark_kinds = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = constant_symmetric_instance(rng, 40, 25, 50.0);
    OracleConfig cfg;
    cfg.epsilon = eps;
    cfg.rho = 0.15;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;
    for (int q = 0; q < 120; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 50.0);
      const double exact = exact_travel(g, a, b, t0);
      REQUIRE(exact < kInfTime);
      QueryAnswer ans = fca(g, o, a, b, t0, ws);
      CHECK(ans.value >= exact - 1e-9);
      if (ans.kind == AnswerKind::exact) {
        CHECK(ans.value == doctest::Approx(exact).epsilon(1e-12));
      } else {
        ++landmark_kinds;
        const double r_o = ans.radii[0];
        CHECK(r_o <= exact + 1e-9);
        CHECK(ans.value <= (1 + eps) * exact + psi * r_o + 1e-9);
      }
      CHECK(ans.value <= (1 + eps + psi) * exact + 1e-9);
    }
  }
  CHECK(landmark_kinds > 50);
}

TEST_CASE("fca never undercuts the exact travel time") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = smooth_random_instance(rng, 14, 10, 40.0, 3);
    OracleConfig cfg;
    cfg.epsilon = 0.1;
    cfg.rho = 0.3;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;
    for (int q = 0; q < 80; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 40.0);
      const double exact = exact_travel(g, a, b, t0);
      QueryAnswer ans = fca(g, o, a, b, t0, ws);
      CHECK(ans.value >= exact - 1e-9);
      if (ans.kind == AnswerKind::exact && !ans.exhausted)
        CHECK(ans.value == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("rqa with budget zero equals fca") {
  std::mt19937_64 rng(31);
  TdInstance g = smooth_random_instance(rng, 14, 10, 40.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  cfg.rho = 0.3;
  cfg.seed = 31;
  Oracle o = build_oracle(g, cfg);
  BallWorkspace ws;
  for (int q = 0; q < 60; ++q) {
    const int a = (int)uniform_index(rng, g.n());
    const int b = (int)uniform_index(rng, g.n());
    const double t0 = uniform_in(rng, 0.0, 40.0);
    QueryAnswer base = fca(g, o, a, b, t0, ws);
    QueryAnswer zero = rqa(g, o, a, b, t0, 0, ws);
    CHECK(zero.value == base.value);
    CHECK(zero.kind == base.kind);
    CHECK(zero.landmark == base.landmark);
    CHECK(zero.depth == base.depth);
    CHECK(zero.hops == base.hops);
  }
}

TEST_CASE("rqa improves monotonically and meets the sigma guarantee") {
  const double eps = 0.1;
  MetricParams mp;
  mp.lambda_max = 0.0;
  mp.zeta = 1.0;
  mp.epsilon = eps;
  const double psi = mp.psi();

  for (std::uint64_t seed : {41u, 42u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = constant_symmetric_instance(rng, 36, 20, 50.0);
    OracleConfig cfg;
    cfg.epsilon = eps;
    cfg.rho = 0.12;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;
    for (int q = 0; q < 60; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 50.0);
      const double exact = exact_travel(g, a, b, t0);
      double prev = kInfTime;
      for (int r = 0; r <= 3; ++r) {
        QueryAnswer ans = rqa(g, o, a, b, t0, r, ws);
        CHECK(ans.value >= exact - 1e-9);
        CHECK(ans.value <=
              (1 + sigma_for_budget(eps, psi, r)) * exact + 1e-9);
        if (r > 0) CHECK(ans.value <= prev + 1e-12);
        CHECK(ans.depth <= r);
        prev = ans.value;
      }
    }
  }

  // monotone and lower-bounded on time-dependent delays too
  std::mt19937_64 rng(43);
  TdInstance g = smooth_random_instance(rng, 14, 10, 40.0, 3);
  OracleConfig cfg;
  cfg.epsilon = eps;
  cfg.rho = 0.25;
  cfg.seed = 43;
  Oracle o = build_oracle(g, cfg);
  BallWorkspace ws;
  for (int q = 0; q < 40; ++q) {
    const int a = (int)uniform_index(rng, g.n());
    const int b = (int)uniform_index(rng, g.n());
    const double t0 = uniform_in(rng, 0.0, 40.0);
    const double exact = exact_travel(g, a, b, t0);
    double prev = kInfTime;
    for (int r = 0; r <= 3; ++r) {
      QueryAnswer ans = rqa(g, o, a, b, t0, r, ws);
      CHECK(ans.value >= exact - 1e-9);
      if (r > 0) CHECK(ans.value <= prev + 1e-12);
      prev = ans.value;
    }
  }
}

TEST_CASE("canonical chain radii grow while no candidate is good") {
  const double eps = 0.1;
  MetricParams mp;
  mp.lambda_max = 0.0;
  mp.zeta = 1.0;
  mp.epsilon = eps;
  const double psi = mp.psi();
  const double deltas[] = {0.05, 0.3, 1.5};

  for (std::uint64_t seed : {51u, 52u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = constant_symmetric_instance(rng, 40, 30, 50.0);
    OracleConfig cfg;
    cfg.epsilon = eps;
    cfg.rho = 0.1;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;

    for (int q = 0; q < 30; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 50.0);
      if (o.landmarks.is_landmark[a] || a == b) continue;
      const double exact = exact_travel(g, a, b, t0);
      REQUIRE(exact < kInfTime);

      // follow the chain whose hops are the first shortest-path vertices
      // outside each settled ball, as the recursion's guessing would
      int w = a;
      double tw = t0;
      double sols = kInfTime;
      double sum_radii = 0.0;
      bool hit_destination = false;
      for (int k = 0; k <= 4; ++k) {
        const BallResult ball =
            grow_ball(g, o.landmarks.is_landmark, w, tw, b, ws);
        if (ball.found == BallStop::destination) {
          hit_destination = true;
          break;
        }
        REQUIRE(ball.found == BallStop::landmark);
        const double rk = ball.radius;
        sum_radii += rk;
        const double suffix =
            query_summary(o.summary_for(ball.stop_vertex), b, tw + rk).value;
        sols = std::min(sols, (tw - t0) + rk + suffix);
        for (double delta : deltas) {
          if (sols > (1 + eps + delta) * exact + 1e-9)
            CHECK(rk > std::pow(1 + eps / psi, k) * (delta / psi) * exact - 1e-9);
        }

        const TddResult sp = tdd_one_to_all(g, w, tw);
        if (sp.arrival[b] == kInfTime) break;
        std::vector<char> in_ball(g.n(), 0);
        for (const BallResult::Settled &s : ball.settled) in_ball[s.vertex] = 1;
        std::vector<int> path{b};
        while (path.back() != w) path.push_back(g.arc(sp.parent_arc[path.back()]).tail);
        int next = -1;
        for (auto it = path.rbegin(); it != path.rend(); ++it)
          if (!in_ball[*it]) {
            next = *it;
            break;
          }
        REQUIRE(next >= 0);
        const BallResult::Boundary *hop = nullptr;
        for (const BallResult::Boundary &f : ball.boundary)
          if (f.vertex == next) hop = &f;
        // the shortest path may leave through the unexpanded stop vertex, in
        // which case the landmark candidate already covers it
        if (!hop) break;
        w = next;
        tw = hop->arrival;
      }
      if (!hit_destination) CHECK(sum_radii <= exact + 1e-9);
    }
  }
}

TEST_CASE("reconstruction of exact answers replays the tree path") {
  int exercised = 0;
  for (std::uint64_t seed : {61u, 62u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = smooth_random_instance(rng, 14, 10, 40.0, 3);
    OracleConfig cfg;
    cfg.epsilon = 0.1;
    cfg.rho = 0.2;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;
    for (int q = 0; q < 60; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 40.0);
      QueryAnswer ans = rqa(g, o, a, b, t0, 2, ws);
      if (ans.kind != AnswerKind::exact || ans.value == kInfTime) continue;
      ++exercised;
      PathResult p = reconstruct_path(g, o, ans, ws);
      check_connected(g, p, a, b);
      if (ans.depth == 0) {
        CHECK(p.travel == ans.value);
      } else {
        // deeper chains telescope the value through hop-local differences,
        // so the replay can differ by rounding
        CHECK(p.travel == doctest::Approx(ans.value).epsilon(1e-12));
      }
    }
  }
  CHECK(exercised > 20);
}

TEST_CASE("reconstruction via landmark yields a connected real path") {
  const double eps = 0.1;
  int exercised = 0;
  int deep = 0;
  for (std::uint64_t seed : {71u, 72u, 73u}) {
    std::mt19937_64 rng(seed);
    TdInstance g = smooth_random_instance(rng, 16, 12, 40.0, 3);
    OracleConfig cfg;
    cfg.epsilon = eps;
    cfg.rho = 0.2;
    cfg.seed = seed;
    Oracle o = build_oracle(g, cfg);
    BallWorkspace ws;
    for (int q = 0; q < 60; ++q) {
      const int a = (int)uniform_index(rng, g.n());
      const int b = (int)uniform_index(rng, g.n());
      const double t0 = uniform_in(rng, 0.0, 40.0);
      QueryAnswer ans = rqa(g, o, a, b, t0, 2, ws);
      if (ans.value == kInfTime) continue;
      if (ans.kind == AnswerKind::exact) continue;
      ++exercised;
      if (ans.depth > 0) ++deep;
      const double exact = exact_travel(g, a, b, t0);
      PathResult p = reconstruct_path(g, o, ans, ws);
      check_connected(g, p, a, b);
      CHECK(p.travel >= exact - 1e-9);
      CHECK(p.travel <= ans.value * (1 + eps) + 1e-6);
    }
  }
  CHECK(exercised > 40);
  CHECK(deep > 0);
}

TEST_CASE("reconstruction on constant delays matches the answer closely") {
  std::mt19937_64 rng(81);
  TdInstance g = constant_symmetric_instance(rng, 30, 18, 50.0);
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  cfg.rho = 0.15;
  cfg.seed = 81;
  Oracle o = build_oracle(g, cfg);
  BallWorkspace ws;
  int exercised = 0;
  for (int q = 0; q < 80; ++q) {
    const int a = (int)uniform_index(rng, g.n());
    const int b = (int)uniform_index(rng, g.n());
    const double t0 = uniform_in(rng, 0.0, 50.0);
    QueryAnswer ans = fca(g, o, a, b, t0, ws);
    if (ans.kind == AnswerKind::exact) continue;
    ++exercised;
    PathResult p = reconstruct_path(g, o, ans, ws);
    check_connected(g, p, a, b);
    // constant profiles make summaries exact, so the walked path reproduces
    // the answer up to float noise
    CHECK(p.travel == doctest::Approx(ans.value).epsilon(1e-9));
  }
  CHECK(exercised > 20);
}

TEST_CASE("reconstruction failures carry the partial path") {
  const double T = 60.0;
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, const_delay(T, 1.0), false});
  arcs.push_back({1, 2, const_delay(T, 3.0), false});
  arcs.push_back({2, 0, const_delay(T, 2.0), false});
  // vertex 3 has no incoming arcs, so no summary can reach it
  arcs.push_back({3, 0, const_delay(T, 1.0), false});
  TdInstance g(4, T, std::move(arcs));
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  Oracle o = manual_oracle(g, {1}, cfg);
  BallWorkspace ws;

  QueryAnswer ans = fca(g, o, 0, 2, 5.0, ws);
  REQUIRE(ans.kind == AnswerKind::via_landmark);

  QueryAnswer bad_dest = ans;
  bad_dest.destination = 3;
  bad_dest.value = 1.0;  // keep it finite so the walk actually starts
  CHECK_THROWS_AS(reconstruct_path(g, o, bad_dest, ws), ReconstructionError);
  try {
    reconstruct_path(g, o, bad_dest, ws);
  } catch (const ReconstructionError &e) {
    CHECK(!e.partial().empty());
    CHECK(e.partial().front() == 0);
  }

  QueryAnswer bad_hop = ans;
  bad_hop.hops.push_back({1, 6.0});  // the stop vertex is never on the boundary
  CHECK_THROWS_AS(reconstruct_path(g, o, bad_hop, ws), ReconstructionError);
}

TEST_CASE("unreachable destinations answer infinity") {
  const double T = 50.0;
  std::vector<Arc> arcs;
  // component {0,1,2} is a cycle; component {3,4} is separate
  arcs.push_back({0, 1, const_delay(T, 2.0), false});
  arcs.push_back({1, 2, const_delay(T, 2.0), false});
  arcs.push_back({2, 0, const_delay(T, 2.0), false});
  arcs.push_back({3, 4, const_delay(T, 1.0), false});
  arcs.push_back({4, 3, const_delay(T, 1.0), false});
  TdInstance g(5, T, std::move(arcs));
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  BallWorkspace ws;

  // landmark reachable from the origin, destination in the other component
  Oracle near = manual_oracle(g, {1}, cfg);
  QueryAnswer a = fca(g, near, 0, 3, 4.0, ws);
  CHECK(a.value == kInfTime);
  CHECK(a.kind == AnswerKind::via_landmark);
  CHECK_FALSE(a.exhausted);
  QueryAnswer a2 = rqa(g, near, 0, 3, 4.0, 2, ws);
  CHECK(a2.value == kInfTime);
  PathResult p = reconstruct_path(g, near, a, ws);
  CHECK(p.vertices.empty());
  CHECK(p.travel == kInfTime);

  // no landmark reachable either: the ball exhausts the component
  Oracle far = manual_oracle(g, {4}, cfg);
  QueryAnswer b = fca(g, far, 0, 3, 4.0, ws);
  CHECK(b.value == kInfTime);
  CHECK(b.kind == AnswerKind::exact);
  CHECK(b.exhausted);
  CHECK(b.ball_sizes[0] == 3);
}

TEST_CASE("answer bookkeeping stays aligned") {
  std::mt19937_64 rng(91);
  TdInstance g = smooth_random_instance(rng, 14, 10, 40.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  cfg.rho = 0.25;
  cfg.seed = 91;
  Oracle o = build_oracle(g, cfg);
  BallWorkspace ws;
  for (int q = 0; q < 50; ++q) {
    const int a = (int)uniform_index(rng, g.n());
    const int b = (int)uniform_index(rng, g.n());
    const double t0 = uniform_in(rng, 0.0, 40.0);
    QueryAnswer ans = rqa(g, o, a, b, t0, 3, ws);
    CHECK(ans.hops.size() == (std::size_t)ans.depth + 1);
    CHECK(ans.radii.size() == ans.hops.size());
    CHECK(ans.ball_sizes.size() == ans.hops.size());
    CHECK(ans.hops.front().first == a);
    CHECK(ans.hops.front().second == t0);
    // a landmark origin answers straight from its summary, no ball at all
    if (!(ans.kind == AnswerKind::landmark_hit && ans.depth == 0))
      CHECK(ans.balls >= 1);
    CHECK(ans.settled >= ans.balls);
    if (ans.kind == AnswerKind::exact) {
      CHECK(ans.landmark == -1);
    } else {
      REQUIRE(ans.landmark >= 0);
      CHECK(o.landmarks.is_landmark[ans.landmark] == 1);
    }
    for (std::size_t i = 0; i + 1 < ans.hops.size(); ++i)
      CHECK(ans.hops[i + 1].second >= ans.hops[i].second);
  }
}
