#include "tdo/gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tdo/util.hpp"

namespace tdo {

namespace {

// generated legs keep an extra order of magnitude over the 1e-6 FIFO margin
constexpr double kDownLimit = 1.0 - 1e-5;

void check_spec(const GenSpec &s) {
  if (s.n < 2) throw std::invalid_argument("generate: need at least 2 vertices");
  if (!(s.period > 0)) throw std::invalid_argument("generate: period must be positive");
  if (!(s.base_min > 0) || !(s.base_max >= s.base_min))
    throw std::invalid_argument("generate: base delay range must be positive");
  if (!(s.slope_cap > -1))
    throw std::invalid_argument("generate: slope cap must exceed -1");
  if (s.profile == DelayProfile::constant) {
    if (s.slope_cap < 0)
      throw std::invalid_argument("generate: constant delays have slope 0, cap excludes it");
  } else if (!(s.slope_cap > 0)) {
    throw std::invalid_argument("generate: non-constant profiles need positive slope room");
  }
  if (s.spoilers < 0) throw std::invalid_argument("generate: negative spoiler count");
  if (s.profile != DelayProfile::mixed && s.spoilers != 0)
    throw std::invalid_argument("generate: spoiler count is only for the mixed profile");
}

std::vector<std::pair<int, int>> make_edges(const GenSpec &s) {
  std::vector<std::pair<int, int>> edges;
  if (s.topology == Topology::grid) {
    const int w = std::max(1, static_cast<int>(std::floor(std::sqrt(double(s.n)))));
    for (int v = 0; v < s.n; ++v) {
      const bool row_end = (v % w == w - 1);
      if (!row_end && v + 1 < s.n) edges.push_back({v, v + 1});
      if (v + w < s.n) edges.push_back({v, v + w});
    }
    return edges;
  }
  std::set<std::pair<int, int>> seen;
  auto add = [&](int u, int v) {
    if (u == v) return false;
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) return false;
    edges.push_back({u, v});
    return true;
  };
  for (int i = 0; i < s.n; ++i) add(i, (i + 1) % s.n);
  const long long target =
      std::llround(s.arc_factor * s.n / 2.0) - static_cast<long long>(edges.size());
  std::mt19937_64 rng(mix_seed(s.seed, 1));
  long long placed = 0, attempts = 0;
  const long long attempt_cap = 64 * std::max(target, 1LL) + 1024;
  while (placed < target && attempts < attempt_cap) {
    ++attempts;
    if (add(static_cast<int>(uniform_index(rng, s.n)),
            static_cast<int>(uniform_index(rng, s.n))))
      ++placed;
  }
  return edges;
}

PwlFunction constant_two_points(double period, double value) {
  return PwlFunction(FnKind::delay, period, {{0.0, value}, {period / 2, value}});
}

// rises from the t=0 valley to a peak at t_p, falls back over the wrap leg
PwlFunction bell(std::mt19937_64 &rng, const GenSpec &s, double base) {
  const double t_p = uniform_in(rng, 0.3 * s.period, 0.7 * s.period);
  const double amp_max =
      std::min(s.slope_cap * t_p, kDownLimit * (s.period - t_p));
  const double amp = uniform_in(rng, 0.25, 0.9) * amp_max;
  return PwlFunction(FnKind::delay, s.period, {{0.0, base}, {t_p, base + amp}});
}

// falls to a valley at t_v and rises back over the wrap leg; the valley is
// the one interior breakpoint with increasing slope
PwlFunction valley(std::mt19937_64 &rng, const GenSpec &s, double base) {
  const double t_v = uniform_in(rng, 0.3 * s.period, 0.7 * s.period);
  const double amp_max =
      std::min(kDownLimit * t_v, s.slope_cap * (s.period - t_v));
  const double amp = uniform_in(rng, 0.25, 0.9) * amp_max;
  return PwlFunction(FnKind::delay, s.period, {{0.0, base + amp}, {t_v, base}});
}

std::vector<double> static_dijkstra(
    int n, const std::vector<std::vector<std::pair<int, double>>> &adj,
    int source) {
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  dist[source] = 0;
  queue.push({0, source});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto &[w, len] : adj[v]) {
      const double nd = d + len;
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.push({nd, w});
      }
    }
  }
  return dist;
}

}  // namespace

TdInstance generate(const GenSpec &spec) {
  check_spec(spec);
  const auto edges = make_edges(spec);
  const int m = 2 * static_cast<int>(edges.size());
  if (spec.spoilers > m)
    throw std::invalid_argument("generate: more spoilers requested than arcs");

  std::mt19937_64 base_rng(mix_seed(spec.seed, 2));
  std::mt19937_64 shape_rng(mix_seed(spec.seed, 3));

  std::vector<char> is_valley(m, 0);
  if (spec.profile == DelayProfile::mixed && spec.spoilers > 0) {
    // partial Fisher-Yates picks the spoiler-carrying arc slots
    std::mt19937_64 pick_rng(mix_seed(spec.seed, 4));
    std::vector<int> slots(m);
    for (int i = 0; i < m; ++i) slots[i] = i;
    for (int i = 0; i < spec.spoilers; ++i) {
      const int j = i + static_cast<int>(uniform_index(pick_rng, m - i));
      std::swap(slots[i], slots[j]);
      is_valley[slots[i]] = 1;
    }
  }

  std::vector<Arc> arcs;
  arcs.reserve(m);
  int slot = 0;
  for (const auto &[u, v] : edges) {
    const double base = uniform_in(base_rng, spec.base_min, spec.base_max);
    for (const auto &[tail, head] : {std::pair{u, v}, std::pair{v, u}}) {
      PwlFunction delay = [&] {
        switch (spec.profile) {
          case DelayProfile::concave_bell:
            return bell(shape_rng, spec, base);
          case DelayProfile::mixed:
            if (is_valley[slot]) return valley(shape_rng, spec, base);
            [[fallthrough]];
          case DelayProfile::constant:
          default:
            return constant_two_points(spec.period, base);
        }
      }();
      arcs.push_back({tail, head, std::move(delay), false});
      ++slot;
    }
  }
  return TdInstance(spec.n, spec.period, std::move(arcs));
}

MetricParams certify_metric_params(const TdInstance &g, double epsilon) {
  const int n = g.n();
  std::vector<std::vector<std::pair<int, double>>> max_fwd(n), min_rev(n);
  for (int a = 0; a < g.m(); ++a) {
    const Arc &arc = g.arc(a);
    max_fwd[arc.tail].push_back({arc.head, arc.delay.max_value()});
    min_rev[arc.head].push_back({arc.tail, arc.delay.min_value()});
  }

  double zeta = 1.0, max_sd = 0.0;
  for (int o = 0; o < n; ++o) {
    const auto upper = static_dijkstra(n, max_fwd, o);   // upper[d] >= D[o,d]
    const auto lower = static_dijkstra(n, min_rev, o);   // lower[d] <= D[d,o]
    for (int d = 0; d < n; ++d) {
      if (d == o) continue;
      if (!std::isfinite(upper[d]) || !std::isfinite(lower[d]))
        throw std::invalid_argument(
            "certify_metric_params: instance is not strongly connected");
      if (!(lower[d] > 0))
        throw std::invalid_argument(
            "certify_metric_params: zero-delay connection, zeta is unbounded");
      max_sd = std::max(max_sd, upper[d]);
      zeta = std::max(zeta, upper[d] / lower[d]);
    }
  }

  MetricParams p;
  p.epsilon = epsilon;
  p.zeta = zeta;
  p.certified = true;

  // Arrival slopes along any optimal path multiply one (1 + leg slope)
  // factor per arc; constant arcs contribute exactly 1. Optimal paths are
  // simple, so two bounds hold at once: the product over every non-constant
  // arc of the instance, and the steepest single factor raised to the
  // largest possible number of non-constant arcs on one path.
  long double prod_up = 1, prod_dn = 1;
  double steep_up = 0, steep_dn = 0;
  double min_nc_delay = std::numeric_limits<double>::infinity();
  std::size_t nonconstant = 0;
  for (int a = 0; a < g.m(); ++a) {
    const PwlFunction &f = g.arc(a).delay;
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      lo = std::min(lo, f.leg_slope(i));
      hi = std::max(hi, f.leg_slope(i));
    }
    if (lo == 0 && hi == 0) continue;
    ++nonconstant;
    prod_up *= 1.0L + std::max(0.0, hi);
    prod_dn *= 1.0L + std::min(0.0, lo);
    steep_up = std::max(steep_up, hi);
    steep_dn = std::min(steep_dn, lo);
    min_nc_delay = std::min(min_nc_delay, f.min_value());
  }
  if (nonconstant == 0) return p;

  const long double hops = std::min<long double>(
      std::floor(max_sd / min_nc_delay), nonconstant);
  const long double pow_up = std::pow(1.0L + std::max(0.0, steep_up), hops);
  const long double pow_dn = std::pow(1.0L + std::min(0.0, steep_dn), hops);
  p.lambda_max = static_cast<double>(std::min(prod_up, pow_up) - 1.0L);
  p.lambda_min = static_cast<double>(1.0L - std::max(prod_dn, pow_dn));
  return p;
}

}  // namespace tdo
