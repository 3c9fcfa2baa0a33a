#include "tdo/summaries.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tdo/util.hpp"
#include "test_support.hpp"

using namespace tdo;
using namespace tdo_test;

namespace {

LandmarkSet manual_landmarks(int n, std::vector<int> ids) {
  LandmarkSet L;
  L.ids = std::move(ids);
  L.is_landmark.assign(n, 0);
  for (int v : L.ids) L.is_landmark[v] = 1;
  return L;
}

}  // namespace

TEST_CASE("landmark selection is deterministic and concentrated") {
  LandmarkSet a = select_landmarks(10000, 0.1, 99);
  LandmarkSet b = select_landmarks(10000, 0.1, 99);
  CHECK(a.ids == b.ids);
  CHECK_FALSE(a.forced);
  // mean 1000, sd ~30; +-200 is far outside
  CHECK(a.ids.size() > 800);
  CHECK(a.ids.size() < 1200);
  CHECK(std::is_sorted(a.ids.begin(), a.ids.end()));
  LandmarkSet c = select_landmarks(10000, 0.1, 100);
  CHECK(a.ids != c.ids);
  LandmarkSet all = select_landmarks(50, 1.0, 7);
  CHECK(all.ids.size() == 50);
}

TEST_CASE("landmark selection promotes one vertex on an empty draw") {
  LandmarkSet L = select_landmarks(20, 1e-12, 5);
  CHECK(L.forced);
  CHECK(L.ids.size() == 1);
  CHECK(L.is_landmark[L.ids[0]] == 1);
  CHECK_THROWS_AS(select_landmarks(20, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(select_landmarks(20, 1.5, 5), std::invalid_argument);
}

TEST_CASE("spoiler projection worked example") {
  // 0 --(const 2)--> 1 --(one upward kink at t=5)--> 2
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, PwlFunction::constant(FnKind::delay, 10.0, 2.0), false});
  arcs.push_back({1, 2,
                  PwlFunction(FnKind::delay, 10.0, {{0, 4}, {5, 2}, {8, 5}}),
                  false});
  TdInstance g(3, 10.0, std::move(arcs));
  // slopes -0.4, 1, wrap -0.5: the only reported spoiler is t=5 on tail 1
  CHECK(g.total_spoilers() == 1);
  TdInstance rev = reverse_delays(g);
  LandmarkSet L = manual_landmarks(3, {0, 2});
  SpoilerProjection pr = project_spoilers(g, rev, L);
  CHECK(pr.spoilers == 1);
  REQUIRE(pr.cuts.size() == 2);
  // departing 0 at 3 reaches 1 exactly at 5 over the constant arc
  REQUIRE(pr.cuts[0].size() == 1);
  CHECK(pr.cuts[0][0] == doctest::Approx(3.0).epsilon(1e-12));
  // vertex 2 cannot reach 1, no image
  CHECK(pr.cuts[1].empty());
  CHECK(pr.images == 1);
}

TEST_CASE("single arc summary reproduces the delay function") {
  // over the only path 0->1 the travel time equals the arc delay itself
  PwlFunction delay(FnKind::delay, 10.0, {{2, 4}, {5, 7}, {9, 3.4}});
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, delay, false});
  TdInstance g(2, 10.0, std::move(arcs));
  TdInstance rev = reverse_delays(g);
  LandmarkSet L = manual_landmarks(2, {0});
  SpoilerProjection pr = project_spoilers(g, rev, L);
  // upward kinks of the arc at t=2 and t=9 project onto the landmark itself
  REQUIRE(pr.cuts[0].size() == 2);
  CHECK(pr.cuts[0][0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pr.cuts[0][1] == doctest::Approx(9.0).epsilon(1e-12));

  std::size_t last_points = 0;
  for (double eps : {0.5, 0.1, 0.02}) {
    OracleConfig cfg;
    cfg.epsilon = eps;
    cfg.keep_samples = true;
    LandmarkSummary ls = bisect_landmark(g, 0, pr.cuts[0], cfg);
    CHECK(ls.violations == 0);
    CHECK(ls.capped == 0);
    const VertexSummary &s = ls.per_vertex[1];
    REQUIRE(s.reachable);
    // exact sample points lie on the true function
    for (double t : ls.sample_times[1])
      CHECK(s.fn.evaluate(t) == doctest::Approx(delay.evaluate(t)).epsilon(1e-12));
    // sandwich on a dense grid
    for (int i = 0; i < 2000; ++i) {
      double t = 10.0 * i / 2000.0;
      double exact = delay.evaluate(t);
      double approx = s.fn.evaluate(t);
      CHECK(approx >= exact - 1e-9);
      CHECK(approx <= (1 + eps) * exact + 1e-9);
    }
    // self summary is the zero constant (cut samples may survive pruning)
    CHECK(ls.per_vertex[0].fn.size() <= 2);
    CHECK(ls.per_vertex[0].fn.max_value() == 0.0);
    CHECK(ls.per_vertex[0].fn.evaluate(3.3) == 0.0);
    CHECK(ls.points() >= last_points);
    last_points = ls.points();
  }
}

TEST_CASE("summaries sandwich exact travel times on random instances") {
  std::mt19937_64 rng(50);
  for (int iter = 0; iter < 4; ++iter) {
    TdInstance g = smooth_random_instance(rng, 12, 14, 50.0, 3);
    for (double eps : {0.5, 0.1}) {
      OracleConfig cfg;
      cfg.epsilon = eps;
      cfg.rho = 0.3;
      cfg.seed = 1000 + iter;
      Oracle o = build_oracle(g, cfg);
      CHECK(o.total_violations() == 0);
      CHECK(o.total_capped() == 0);
      for (const LandmarkSummary &ls : o.summaries) {
        for (int q = 0; q < 60; ++q) {
          int v = (int)uniform_index(rng, 12);
          double t = uniform_in(rng, 0.0, 50.0);
          TddResult r = tdd_one_to_all(g, ls.landmark, t);
          double exact = r.arrival[v] - t;
          double approx = query_summary(ls, v, t).value;
          CHECK(approx >= exact - 1e-9);
          CHECK(approx <= (1 + eps) * exact + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("constant profiles collapse to single-point summaries") {
  std::mt19937_64 rng(51);
  std::vector<Arc> arcs;
  for (int v = 0; v < 30; ++v)
    arcs.push_back({v, (v + 1) % 30,
                    PwlFunction::constant(FnKind::delay, 100.0,
                                          uniform_in(rng, 1.0, 5.0)),
                    false});
  TdInstance g(30, 100.0, std::move(arcs));
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  cfg.rho = 0.2;
  cfg.seed = 4;
  Oracle o = build_oracle(g, cfg);
  CHECK(o.spoilers == 0);
  for (const LandmarkSummary &ls : o.summaries) {
    // both horizon endpoints, nothing in between
    CHECK(ls.probes == 2);
    CHECK(ls.midpoints == 0);
    CHECK(ls.cuts.empty());
    for (int v = 0; v < 30; ++v) {
      CHECK(ls.per_vertex[v].fn.size() == 1);
      TddResult r = tdd_one_to_all(g, ls.landmark, 17.0);
      CHECK(query_summary(ls, v, 17.0).value ==
            doctest::Approx(r.arrival[v] - 17.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("parallel build equals serial build byte for byte") {
  std::mt19937_64 rng(52);
  TdInstance g = smooth_random_instance(rng, 15, 18, 60.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 0.2;
  cfg.rho = 0.4;
  cfg.seed = 9;
  cfg.threads = 1;
  Oracle serial = build_oracle(g, cfg);
  cfg.threads = 4;
  Oracle parallel = build_oracle(g, cfg);
  std::ostringstream a, b;
  save_oracle(a, serial);
  save_oracle(b, parallel);
  CHECK(a.str() == b.str());
  // and the whole build is reproducible
  cfg.threads = 2;
  Oracle again = build_oracle(g, cfg);
  std::ostringstream c;
  save_oracle(c, again);
  CHECK(a.str() == c.str());
}

TEST_CASE("oracle save/load round-trips byte for byte") {
  std::mt19937_64 rng(53);
  TdInstance g = smooth_random_instance(rng, 10, 12, 40.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 0.15;
  cfg.rho = 0.5;
  cfg.seed = 21;
  Oracle o = build_oracle(g, cfg);
  std::ostringstream first;
  save_oracle(first, o);
  std::istringstream in(first.str());
  Oracle back = load_oracle(in);
  std::ostringstream second;
  save_oracle(second, back);
  CHECK(first.str() == second.str());
  CHECK(back.n == o.n);
  CHECK(back.landmarks.ids == o.landmarks.ids);
  for (std::size_t i = 0; i < o.summaries.size(); ++i)
    for (int q = 0; q < 40; ++q) {
      int v = (int)uniform_index(rng, 10);
      double t = uniform_in(rng, 0.0, 40.0);
      SummaryAnswer x = query_summary(o.summaries[i], v, t);
      SummaryAnswer y = query_summary(back.summaries[i], v, t);
      CHECK(x.value == y.value);
      CHECK(x.parent_arc == y.parent_arc);
    }
}

TEST_CASE("shard loader rejects malformed input") {
  std::istringstream bad("TDWRONG 1\n");
  CHECK_THROWS_AS(load_summary(bad), std::runtime_error);
  std::istringstream vbad("TDSUMMARY 2\n");
  CHECK_THROWS_AS(load_summary(vbad), std::runtime_error);
  std::istringstream truncated("TDSUMMARY 1\n0 2 10\n0 2 4 1 0 0\n0\n2\n1 5 0\n");
  CHECK_THROWS_AS(load_summary(truncated), std::runtime_error);
}

TEST_CASE("unreachable vertices answer infinity") {
  std::vector<Arc> arcs;
  arcs.push_back({0, 1, PwlFunction::constant(FnKind::delay, 10.0, 1.0), false});
  TdInstance g(3, 10.0, std::move(arcs));  // vertex 2 unreachable
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  LandmarkSummary ls = bisect_landmark(g, 0, {}, cfg);
  CHECK_FALSE(ls.per_vertex[2].reachable);
  CHECK(std::isinf(query_summary(ls, 2, 3.0).value));
  CHECK(query_summary(ls, 2, 3.0).parent_arc == -1);
  CHECK(query_summary(ls, 1, 0.0).value == doctest::Approx(1.0));
  // shard round-trip keeps the unreachable marker
  std::ostringstream out;
  save_summary(out, ls);
  std::istringstream in(out.str());
  LandmarkSummary back = load_summary(in);
  CHECK_FALSE(back.per_vertex[2].reachable);
}

TEST_CASE("stored points reconcile with the sample and midpoint counters") {
  std::mt19937_64 rng(54);
  TdInstance g = smooth_random_instance(rng, 10, 10, 50.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 0.1;
  cfg.rho = 0.4;
  cfg.seed = 3;
  cfg.keep_samples = true;
  Oracle o = build_oracle(g, cfg);
  for (const LandmarkSummary &ls : o.summaries) {
    std::size_t listed = 0;
    for (const auto &st : ls.sample_times) listed += st.size();
    CHECK(listed == ls.samples);
    // collinear pruning and the dropped closing sample only remove points
    CHECK(ls.points() <= ls.samples + ls.midpoints);
    for (int v = 0; v < g.n(); ++v) {
      CHECK(ls.d_min[v] <= ls.d_max[v]);
      if (v != ls.landmark) CHECK(ls.d_min[v] > 0.0);
    }
  }
}

TEST_CASE("depth cap of one still yields a lower-bounded summary") {
  std::mt19937_64 rng(55);
  TdInstance g = smooth_random_instance(rng, 10, 12, 50.0, 3);
  OracleConfig cfg;
  cfg.epsilon = 1e-4;
  cfg.rho = 0.3;
  cfg.seed = 8;
  cfg.max_depth = 1;
  Oracle o = build_oracle(g, cfg);
  CHECK(o.total_capped() > 0);  // far too shallow for a 1e-4 target
  for (const LandmarkSummary &ls : o.summaries) {
    CHECK(ls.depth_cap == 1);
    for (int q = 0; q < 40; ++q) {
      int v = (int)uniform_index(rng, 10);
      double t = uniform_in(rng, 0.0, 50.0);
      TddResult r = tdd_one_to_all(g, ls.landmark, t);
      // tangent peaks keep the approximation above the truth even when the
      // cap cuts the bisection short of the epsilon target
      CHECK(query_summary(ls, v, t).value >= r.arrival[v] - t - 1e-9);
    }
  }
}
