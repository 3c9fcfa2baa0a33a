#include "tdo/instance.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tdo/tdd.hpp"
#include "tdo/util.hpp"

namespace tdo {

TdInstance::TdInstance(int n, double period, std::vector<Arc> arcs)
    : n_(n), period_(period), arcs_(std::move(arcs)) {
  if (n_ <= 0) throw std::invalid_argument("instance: need at least one vertex");
  if (!(period_ > 0)) throw std::invalid_argument("instance: period must be positive");
  for (const Arc &a : arcs_) {
    if (a.tail < 0 || a.tail >= n_ || a.head < 0 || a.head >= n_)
      throw std::invalid_argument("instance: arc endpoint out of range");
    if (a.delay.period() != period_)
      throw std::invalid_argument("instance: arc period mismatch");
  }
  std::stable_sort(arcs_.begin(), arcs_.end(),
                   [](const Arc &x, const Arc &y) { return x.tail < y.tail; });
  first_out_.assign(n_ + 1, 0);
  for (const Arc &a : arcs_) ++first_out_[a.tail + 1];
  for (int v = 0; v < n_; ++v) first_out_[v + 1] += first_out_[v];
}

std::size_t TdInstance::total_breakpoints() const {
  std::size_t k = 0;
  for (const Arc &a : arcs_) k += a.delay.size();
  return k;
}

std::size_t TdInstance::total_spoilers() const {
  std::size_t k = 0;
  for (const Arc &a : arcs_) k += a.delay.split_concavity().size();
  return k;
}

std::size_t TdInstance::max_breakpoints() const {
  std::size_t k = 0;
  for (const Arc &a : arcs_) k = std::max(k, a.delay.size());
  return k;
}

bool TdInstance::fifo() const {
  for (const Arc &a : arcs_)
    if (!a.delay.fifo()) return false;
  return true;
}

bool TdInstance::strictly_fifo() const {
  for (const Arc &a : arcs_)
    if (!a.delay.strictly_fifo()) return false;
  return true;
}

void TdInstance::save(std::ostream &out) const {
  out << n_ << ' ' << arcs_.size() << ' ' << format_double(period_) << '\n';
  for (const Arc &a : arcs_) {
    out << a.tail << ' ' << a.head << ' ' << a.delay.size() << '\n';
    for (std::size_t i = 0; i < a.delay.size(); ++i)
      out << format_double(a.delay.time_at(i)) << ' '
          << format_double(a.delay.value_at(i)) << '\n';
  }
}

TdInstance TdInstance::load(std::istream &in) {
  TokenReader tr(in);
  const long long n = tr.next_int();
  const long long m = tr.next_int();
  const double period = tr.next_double();
  std::vector<Arc> arcs;
  arcs.reserve(m);
  for (long long a = 0; a < m; ++a) {
    const int tail = static_cast<int>(tr.next_int());
    const int head = static_cast<int>(tr.next_int());
    const long long k = tr.next_int();
    if (k <= 0) throw std::runtime_error("instance: arc without breakpoints");
    std::vector<Breakpoint> pts(k);
    for (long long i = 0; i < k; ++i) {
      pts[i].t = tr.next_double();
      pts[i].v = tr.next_double();
    }
    PwlFunction fn(FnKind::delay, period, std::move(pts), /*allow_zero=*/true);
    const bool aux = fn.max_value() == 0.0;
    if (!aux && fn.min_value() <= 0.0)
      throw std::runtime_error(
          "instance: delays must be positive except on all-zero aux arcs");
    arcs.push_back({tail, head, std::move(fn), aux});
  }
  return TdInstance(static_cast<int>(n), period, std::move(arcs));
}

ReducedInstance reduce_out_degree(const TdInstance &g) {
  const double T = g.period();
  struct PendingArc {
    int tail, head;
    const PwlFunction *delay;
    bool aux;
  };
  std::vector<PendingArc> arcs;
  arcs.reserve(g.m());
  for (int a = 0; a < g.m(); ++a)
    arcs.push_back({g.arc(a).tail, g.arc(a).head, &g.arc(a).delay, g.arc(a).aux});

  int next_id = g.n();
  std::vector<int> root_of(g.n());
  for (int v = 0; v < g.n(); ++v) root_of[v] = v;
  std::vector<std::pair<int, int>> zero_arcs;  // (tail, head)
  std::size_t new_vertices = 0, new_zero = 0;

  for (int v = 0; v < g.n(); ++v) {
    const auto [lo, hi] = g.out_range(v);
    const int d = hi - lo;
    if (d <= 2) continue;
    // pair items bottom-up; every fresh node takes exactly two children, an
    // odd leftover is promoted to the next level. The original id v is
    // retired: the final node becomes the root and inherits v's incoming
    // arcs via root_of.
    struct Item {
      bool is_arc;
      int id;  // arc index into arcs, or node id
    };
    std::vector<Item> items;
    for (int a = lo; a < hi; ++a) items.push_back({true, a});
    while (items.size() > 1) {
      std::vector<Item> up;
      std::size_t i = 0;
      for (; i + 1 < items.size(); i += 2) {
        const int u = next_id++;
        ++new_vertices;
        for (int j = 0; j < 2; ++j) {
          const Item &it = items[i + j];
          if (it.is_arc)
            arcs[it.id].tail = u;
          else {
            zero_arcs.emplace_back(u, it.id);
            ++new_zero;
          }
        }
        up.push_back({false, u});
      }
      if (i < items.size()) up.push_back(items[i]);
      items.swap(up);
    }
    assert(!items[0].is_arc);
    root_of[v] = items[0].id;
  }

  // incoming arcs of substituted vertices move to the tree roots
  std::vector<Arc> out;
  out.reserve(arcs.size() + zero_arcs.size());
  for (const PendingArc &a : arcs)
    out.push_back({a.tail, root_of[a.head], *a.delay, a.aux});
  for (auto [tail, head] : zero_arcs)
    out.push_back({tail, head, PwlFunction::constant(FnKind::delay, T, 0.0), true});

  VertexMap map;
  map.to_reduced = root_of;
  map.to_original.assign(next_id, -1);
  for (int v = 0; v < g.n(); ++v)
    if (root_of[v] == v)
      map.to_original[v] = v;
    else
      map.to_original[root_of[v]] = v;

  return ReducedInstance{TdInstance(next_id, T, std::move(out)), std::move(map),
                         new_vertices, new_zero};
}

TdInstance reverse_delays(const TdInstance &g) {
  if (!g.strictly_fifo())
    throw std::invalid_argument(
        "reverse_delays: arrival inversion needs a strictly FIFO instance");
  const double T = g.period();
  std::vector<Arc> rev;
  rev.reserve(g.m());
  for (int ai = 0; ai < g.m(); ++ai) {
    const Arc &a = g.arc(ai);
    const std::size_t k = a.delay.size();
    std::vector<Breakpoint> pts(k);
    std::size_t min_pos = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double img = std::fmod(a.delay.time_at(i) + a.delay.value_at(i), T);
      if (img < 0) img += T;
      pts[i] = {img, a.delay.value_at(i)};
      if (pts[i].t < pts[min_pos].t) min_pos = i;
    }
    // arrivals over one period are strictly increasing with span < T, so the
    // reduced times are a rotation of an increasing sequence
    std::rotate(pts.begin(), pts.begin() + min_pos, pts.end());
    rev.push_back({a.head, a.tail, PwlFunction(FnKind::summary, T, std::move(pts)),
                   a.aux});
  }
  return TdInstance(g.n(), T, std::move(rev));
}

MetricParams estimate_metric_params(const TdInstance &g, int samples,
                                    std::uint64_t seed) {
  if (samples <= 0)
    throw std::invalid_argument("estimate_metric_params: samples must be positive");
  const double T = g.period();
  const double h = T / 8;
  MetricParams p;
  bool any_connected = false;
  for (int s = 0; s < samples; ++s) {
    std::mt19937_64 rng(mix_seed(seed, s));
    const int o = static_cast<int>(uniform_index(rng, g.n()));
    int d = static_cast<int>(uniform_index(rng, g.n()));
    if (g.n() > 1)
      while (d == o) d = static_cast<int>(uniform_index(rng, g.n()));
    const double t = uniform_in(rng, 0.0, T);

    const TddResult fwd = tdd_one_to_all(g, o, t);
    const TddResult shifted = tdd_one_to_all(g, o, t + h);
    const TddResult back = tdd_one_to_all(g, d, t);

    for (int v = 0; v < g.n(); ++v) {
      if (v == o) continue;
      if (!std::isfinite(fwd.arrival[v]) || !std::isfinite(shifted.arrival[v]))
        continue;
      const double d0 = fwd.arrival[v] - t;
      const double d1 = shifted.arrival[v] - (t + h);
      const double slope = (d1 - d0) / h;
      p.lambda_max = std::max(p.lambda_max, slope);
      p.lambda_min = std::max(p.lambda_min, -slope);
    }
    if (std::isfinite(fwd.arrival[d]) && std::isfinite(back.arrival[o])) {
      any_connected = true;
      const double d_od = fwd.arrival[d] - t;
      const double d_do = back.arrival[o] - t;
      if (d_od > 0 && d_do > 0)
        p.zeta = std::max({p.zeta, d_od / d_do, d_do / d_od});
    }
  }
  if (!any_connected)
    throw std::runtime_error(
        "estimate_metric_params: every sampled pair was disconnected");
  return p;
}

}  // namespace tdo
