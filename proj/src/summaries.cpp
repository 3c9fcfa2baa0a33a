#include "tdo/summaries.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "tdo/util.hpp"

namespace tdo {

namespace {

constexpr double kCutTol = 1e-9;

// one exact earliest-arrival run: travel times, one-sided slopes, tree arcs
struct Probe {
  double t = 0;
  std::vector<double> d;
  std::vector<double> sl;
  std::vector<double> sr;
  std::vector<int> parent;
};

// per-vertex point stream, appended left to right during the bisection
struct Collect {
  std::vector<double> t, v;
  std::vector<int> parent;
};

// Builds the summary function of one vertex. The constructor may merge
// near-duplicate times or prune collinear interior points, so the per-leg
// parents are re-aligned against the surviving breakpoints afterwards.
VertexSummary make_vertex_summary(double period, const std::vector<double> &ts,
                                  const std::vector<double> &vs,
                                  const std::vector<int> &parents) {
  std::vector<Breakpoint> pts(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) pts[i] = {ts[i], vs[i]};
  PwlFunction fn(FnKind::summary, period, std::move(pts));
  std::vector<int> par(fn.size(), -1);
  std::size_t j = 0;
  for (std::size_t i = 0; i < fn.size(); ++i) {
    while (j < ts.size() && ts[j] != fn.time_at(i)) ++j;
    if (j == ts.size())
      throw std::logic_error("summary: breakpoint realignment failed");
    par[i] = parents[j];
  }
  return {std::move(fn), std::move(par), true};
}

class Builder {
 public:
  Builder(const TdInstance &g, int landmark, const std::vector<double> &cuts,
          const OracleConfig &cfg)
      : g_(g), cfg_(cfg) {
    out_.landmark = landmark;
    out_.period = g.period();
    out_.cuts = cuts;
  }

  LandmarkSummary run() {
    const int n = g_.n();
    const double T = g_.period();

    if (cfg_.keep_samples) {
      out_.sample_times.assign(n, {});
      out_.d_min.assign(n, kInfTime);
      out_.d_max.assign(n, -kInfTime);
    }

    std::vector<double> bounds;
    bounds.reserve(out_.cuts.size() + 2);
    bounds.push_back(0.0);
    for (double c : out_.cuts) bounds.push_back(c);
    bounds.push_back(T);

    std::vector<Probe> bp(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i)
      bp[i] = make_probe(bounds[i]);

    // Depth cap: halving an interval that often pushes the worst-case gap,
    // at most len * (steepest spread) / 4, under epsilon times the smallest
    // positive travel time. The slope estimate gets a factor-2 margin since
    // the boundary probes need not witness the steepest leg.
    double d_min_pos = kInfTime;
    double steep = 0.0;
    for (const Probe &p : bp)
      for (int v = 0; v < n; ++v) {
        if (!std::isfinite(p.d[v])) continue;
        if (p.d[v] > 1e-9) d_min_pos = std::min(d_min_pos, p.d[v]);
        steep = std::max({steep, p.sr[v], p.sl[v]});
      }
    if (!std::isfinite(d_min_pos)) d_min_pos = 1.0;
    const double need = T * (2.0 * steep + 1.0) / (cfg_.epsilon * d_min_pos);
    const int cap =
        static_cast<int>(std::ceil(std::log2(std::max(need, 2.0)))) - 2;
    out_.depth_cap = std::clamp(cap, 1, cfg_.max_depth);

    collect_.assign(n, Collect{});
    std::vector<int> active;
    active.reserve(n);
    for (int v = 0; v < n; ++v)
      if (std::isfinite(bp[0].d[v])) active.push_back(v);
    for (int v : active) append_sample(v, 0.0, bp[0].d[v], bp[0].parent[v]);
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
      bisect(bounds[i], bounds[i + 1], bp[i], bp[i + 1], active, 0);

    out_.per_vertex.reserve(n);
    for (int v = 0; v < n; ++v) {
      Collect &c = collect_[v];
      if (c.t.empty()) {
        out_.per_vertex.push_back(
            {PwlFunction::constant(FnKind::summary, T, 0.0), {}, false});
        continue;
      }
      // the closing sample at T duplicates the one at 0 up to float noise;
      // the wrap leg of the stored function replaces it
      assert(c.t.back() == T);
      c.t.pop_back();
      c.v.pop_back();
      c.parent.pop_back();
      out_.per_vertex.push_back(make_vertex_summary(T, c.t, c.v, c.parent));
    }
    return std::move(out_);
  }

 private:
  Probe make_probe(double t) {
    ++out_.probes;
    TddResult r = tdd_one_to_all(g_, out_.landmark, t);
    TreeSlopes s = tree_slopes(g_, r);
    const int n = g_.n();
    Probe p;
    p.t = t;
    p.d.resize(n);
    p.parent = std::move(r.parent_arc);
    p.sl = std::move(s.left);
    p.sr = std::move(s.right);
    for (int v = 0; v < n; ++v) p.d[v] = r.arrival[v] - t;
    if (cfg_.keep_samples)
      for (int v = 0; v < n; ++v)
        if (std::isfinite(p.d[v])) {
          out_.d_min[v] = std::min(out_.d_min[v], p.d[v]);
          out_.d_max[v] = std::max(out_.d_max[v], p.d[v]);
        }
    return p;
  }

  void append_sample(int v, double t, double d, int parent) {
    Collect &c = collect_[v];
    if (!c.t.empty() && t == c.t.back()) return;  // shared leaf endpoint
    assert(c.t.empty() || t > c.t.back());
    c.t.push_back(t);
    c.v.push_back(d);
    c.parent.push_back(parent);
    ++out_.samples;
    if (cfg_.keep_samples) out_.sample_times[v].push_back(t);
  }

  void append_midpoint(int v, double t, double value, int parent) {
    Collect &c = collect_[v];
    if (!c.t.empty() && t <= c.t.back()) return;  // degenerate peak, drop
    c.t.push_back(t);
    c.v.push_back(value);
    c.parent.push_back(parent);
    ++out_.midpoints;
  }

  void bisect(double a, double b, const Probe &pa, const Probe &pb,
              const std::vector<int> &active, int depth) {
    std::vector<int> split;
    for (int v : active) {
      const double ds = pa.d[v];
      const double df = pb.d[v];
      bool ok = true;
      MaeEstimate e{a, 0, 0};
      try {
        e = mae_estimate(a, b, ds, df, pa.sr[v], pb.sl[v]);
      } catch (const std::exception &) {
        // the interval is not concave here (an unprojected spoiler or float
        // noise); splitting narrows it down, the counter flags the landmark
        ok = false;
        ++out_.violations;
      }
      const bool pass = ok && e.mae <= cfg_.epsilon * std::min(ds, df) + 1e-15;
      if (pass || depth >= out_.depth_cap) {
        if (ok && e.mae > 1e-12 && a < e.t_mid && e.t_mid < b)
          append_midpoint(v, e.t_mid, e.upper_mid, pa.parent[v]);
        if (!pass) ++out_.capped;
        append_sample(v, b, df, pb.parent[v]);
      } else {
        split.push_back(v);
      }
    }
    if (split.empty()) return;
    const double mid = a + 0.5 * (b - a);
    if (!(a < mid && mid < b)) {
      // interval already at float resolution, stop here
      for (int v : split) {
        ++out_.capped;
        append_sample(v, b, pb.d[v], pb.parent[v]);
      }
      return;
    }
    const Probe pm = make_probe(mid);
    bisect(a, mid, pa, pm, split, depth + 1);
    bisect(mid, b, pm, pb, split, depth + 1);
  }

  const TdInstance &g_;
  const OracleConfig &cfg_;
  LandmarkSummary out_;
  std::vector<Collect> collect_;
};

}  // namespace

LandmarkSet select_landmarks(int n, double rho, std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("select_landmarks: empty graph");
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("select_landmarks: rho must be in (0,1]");
  LandmarkSet out;
  out.is_landmark.assign(n, 0);
  std::mt19937_64 rng(seed);
  for (int v = 0; v < n; ++v)
    if (uniform01(rng) < rho) {
      out.is_landmark[v] = 1;
      out.ids.push_back(v);
    }
  if (out.ids.empty()) {
    const int v = static_cast<int>(uniform_index(rng, n));
    out.is_landmark[v] = 1;
    out.ids.push_back(v);
    out.forced = true;
  }
  return out;
}

SpoilerProjection project_spoilers(const TdInstance &g, const TdInstance &rev,
                                   const LandmarkSet &landmarks) {
  if (rev.n() != g.n())
    throw std::invalid_argument("project_spoilers: instances disagree on n");
  const double T = g.period();
  SpoilerProjection out;
  out.cuts.assign(landmarks.ids.size(), {});
  for (int a = 0; a < g.m(); ++a) {
    const Arc &arc = g.arc(a);
    for (std::size_t idx : arc.delay.split_concavity()) {
      ++out.spoilers;
      const double tb = arc.delay.time_at(idx);
      // departure times whose path can sit on arc.tail exactly when the
      // slope jumps; strict FIFO makes that departure unique per landmark
      ReverseTddResult r = reverse_tdd_latest_departure(rev, arc.tail, tb);
      for (std::size_t li = 0; li < landmarks.ids.size(); ++li) {
        const double dep = r.departure[landmarks.ids[li]];
        if (!std::isfinite(dep)) continue;
        ++out.images;
        double c = std::fmod(dep, T);
        if (c < 0) c += T;
        if (c < kCutTol || c > T - kCutTol) continue;
        out.cuts[li].push_back(c);
      }
    }
  }
  for (auto &cs : out.cuts) {
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end(),
                         [](double x, double y) { return y - x < kCutTol; }),
             cs.end());
  }
  return out;
}

std::size_t LandmarkSummary::points() const {
  std::size_t k = 0;
  for (const VertexSummary &s : per_vertex)
    if (s.reachable) k += s.fn.size();
  return k;
}

LandmarkSummary bisect_landmark(const TdInstance &g, int landmark,
                                const std::vector<double> &cuts,
                                const OracleConfig &cfg) {
  if (landmark < 0 || landmark >= g.n())
    throw std::invalid_argument("bisect_landmark: landmark out of range");
  if (!(cfg.epsilon > 0))
    throw std::invalid_argument("bisect_landmark: epsilon must be positive");
  if (cfg.max_depth < 1)
    throw std::invalid_argument("bisect_landmark: max_depth must be >= 1");
  return Builder(g, landmark, cuts, cfg).run();
}

const LandmarkSummary &Oracle::summary_for(int landmark) const {
  if (landmark < 0 || landmark >= n || summary_of[landmark] < 0)
    throw std::invalid_argument("oracle: vertex is not a landmark");
  return summaries[summary_of[landmark]];
}

std::size_t Oracle::total_points() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.points();
  return k;
}

std::size_t Oracle::total_samples() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.samples;
  return k;
}

std::size_t Oracle::total_midpoints() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.midpoints;
  return k;
}

std::size_t Oracle::total_probes() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.probes;
  return k;
}

std::size_t Oracle::total_capped() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.capped;
  return k;
}

std::size_t Oracle::total_violations() const {
  std::size_t k = 0;
  for (const LandmarkSummary &s : summaries) k += s.violations;
  return k;
}

Oracle build_oracle(const TdInstance &g, const OracleConfig &cfg) {
  if (!(cfg.epsilon > 0))
    throw std::invalid_argument("build_oracle: epsilon must be positive");
  if (cfg.threads < 1)
    throw std::invalid_argument("build_oracle: need at least one thread");
  Oracle o;
  o.n = g.n();
  o.period = g.period();
  o.config = cfg;
  o.landmarks = select_landmarks(g.n(), cfg.rho, mix_seed(cfg.seed, 1));

  SpoilerProjection pr;
  pr.cuts.assign(o.landmarks.ids.size(), {});
  if (g.total_spoilers() > 0) {
    const TdInstance rev = reverse_delays(g);
    pr = project_spoilers(g, rev, o.landmarks);
  }
  o.spoilers = pr.spoilers;
  o.images = pr.images;

  o.summaries.resize(o.landmarks.ids.size());
  parallel_for_index(o.landmarks.ids.size(), cfg.threads, [&](std::size_t i) {
    o.summaries[i] = bisect_landmark(g, o.landmarks.ids[i], pr.cuts[i], cfg);
  });

  o.summary_of.assign(g.n(), -1);
  for (std::size_t i = 0; i < o.landmarks.ids.size(); ++i)
    o.summary_of[o.landmarks.ids[i]] = static_cast<int>(i);
  return o;
}

SummaryAnswer query_summary(const LandmarkSummary &ls, int v, double t) {
  if (v < 0 || v >= static_cast<int>(ls.per_vertex.size()))
    throw std::out_of_range("query_summary: vertex out of range");
  const VertexSummary &s = ls.per_vertex[v];
  SummaryAnswer a;
  if (!s.reachable) return a;
  a.value = s.fn.evaluate(t);
  a.leg = static_cast<int>(s.fn.leg_at(t));
  a.parent_arc = s.parent.empty() ? -1 : s.parent[a.leg];
  return a;
}

void save_summary(std::ostream &out, const LandmarkSummary &ls) {
  out << "TDSUMMARY 1\n";
  out << ls.landmark << ' ' << ls.per_vertex.size() << ' '
      << format_double(ls.period) << '\n';
  out << ls.depth_cap << ' ' << ls.probes << ' ' << ls.samples << ' '
      << ls.midpoints << ' ' << ls.capped << ' ' << ls.violations << '\n';
  out << ls.cuts.size();
  for (double c : ls.cuts) out << ' ' << format_double(c);
  out << '\n';
  for (const VertexSummary &s : ls.per_vertex) {
    if (!s.reachable) {
      out << "0\n";
      continue;
    }
    out << s.fn.size() << '\n';
    for (std::size_t i = 0; i < s.fn.size(); ++i)
      out << format_double(s.fn.time_at(i)) << ' '
          << format_double(s.fn.value_at(i)) << ' ' << s.parent[i] << '\n';
  }
}

LandmarkSummary load_summary(std::istream &in) {
  TokenReader tr(in);
  if (tr.next() != "TDSUMMARY" || tr.next_int() != 1)
    throw std::runtime_error("summary: bad shard header");
  LandmarkSummary ls;
  ls.landmark = static_cast<int>(tr.next_int());
  const long long n = tr.next_int();
  ls.period = tr.next_double();
  ls.depth_cap = static_cast<int>(tr.next_int());
  ls.probes = static_cast<std::size_t>(tr.next_int());
  ls.samples = static_cast<std::size_t>(tr.next_int());
  ls.midpoints = static_cast<std::size_t>(tr.next_int());
  ls.capped = static_cast<std::size_t>(tr.next_int());
  ls.violations = static_cast<std::size_t>(tr.next_int());
  const long long ncuts = tr.next_int();
  ls.cuts.resize(ncuts);
  for (long long i = 0; i < ncuts; ++i) ls.cuts[i] = tr.next_double();
  ls.per_vertex.reserve(n);
  std::vector<double> ts, vs;
  std::vector<int> parents;
  for (long long v = 0; v < n; ++v) {
    const long long k = tr.next_int();
    if (k == 0) {
      ls.per_vertex.push_back(
          {PwlFunction::constant(FnKind::summary, ls.period, 0.0), {}, false});
      continue;
    }
    ts.resize(k);
    vs.resize(k);
    parents.resize(k);
    for (long long i = 0; i < k; ++i) {
      ts[i] = tr.next_double();
      vs[i] = tr.next_double();
      parents[i] = static_cast<int>(tr.next_int());
    }
    ls.per_vertex.push_back(make_vertex_summary(ls.period, ts, vs, parents));
  }
  return ls;
}

void save_oracle(std::ostream &out, const Oracle &o) {
  out << "TDORACLE 1\n";
  out << o.n << ' ' << format_double(o.period) << '\n';
  out << format_double(o.config.epsilon) << ' ' << format_double(o.config.rho)
      << ' ' << o.config.seed << ' ' << o.config.max_depth << '\n';
  out << (o.landmarks.forced ? 1 : 0) << ' ' << o.summaries.size() << ' '
      << o.spoilers << ' ' << o.images << '\n';
  for (const LandmarkSummary &s : o.summaries) save_summary(out, s);
}

Oracle load_oracle(std::istream &in) {
  TokenReader tr(in);
  if (tr.next() != "TDORACLE" || tr.next_int() != 1)
    throw std::runtime_error("oracle: bad file header");
  Oracle o;
  o.n = static_cast<int>(tr.next_int());
  o.period = tr.next_double();
  o.config.epsilon = tr.next_double();
  o.config.rho = tr.next_double();
  o.config.seed = static_cast<std::uint64_t>(tr.next_int());
  o.config.max_depth = static_cast<int>(tr.next_int());
  o.landmarks.forced = tr.next_int() != 0;
  const long long shards = tr.next_int();
  o.spoilers = static_cast<std::size_t>(tr.next_int());
  o.images = static_cast<std::size_t>(tr.next_int());
  o.landmarks.is_landmark.assign(o.n, 0);
  o.summary_of.assign(o.n, -1);
  o.summaries.reserve(shards);
  for (long long i = 0; i < shards; ++i) {
    o.summaries.push_back(load_summary(in));
    LandmarkSummary &s = o.summaries.back();
    if (s.landmark < 0 || s.landmark >= o.n ||
        static_cast<int>(s.per_vertex.size()) != o.n || s.period != o.period)
      throw std::runtime_error("oracle: shard inconsistent with header");
    if (o.summary_of[s.landmark] >= 0)
      throw std::runtime_error("oracle: duplicate landmark shard");
    o.landmarks.ids.push_back(s.landmark);
    o.landmarks.is_landmark[s.landmark] = 1;
    o.summary_of[s.landmark] = static_cast<int>(i);
  }
  return o;
}

}  // namespace tdo
