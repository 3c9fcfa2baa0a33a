#include "tdo/toolkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tdo/tdd.hpp"
#include "tdo/util.hpp"

namespace tdo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

// worst-observation accumulator behind one report line
struct CheckAcc {
  ValidateCheck c;

  CheckAcc(std::string name, double limit) {
    c.name = std::move(name);
    c.limit = limit;
    c.worst = -kInfTime;
  }

  void observe(double value, const std::string &witness) {
    ++c.samples;
    if (value > c.worst) {
      c.worst = value;
      c.witness = witness;
    }
  }

  ValidateCheck finish() {
    if (c.samples == 0) c.worst = 0;
    c.pass = c.worst <= c.limit;
    return c;
  }
};

std::string lvt_witness(int l, int v, double t) {
  return "l=" + std::to_string(l) + " v=" + std::to_string(v) +
         " t=" + format_double(t);
}

std::string odt_witness(int o, int d, double t, int r = -1) {
  std::string w = "o=" + std::to_string(o) + " d=" + std::to_string(d) +
                  " t=" + format_double(t);
  if (r >= 0) w += " r=" + std::to_string(r);
  return w;
}

// per-pair ceiling on stored breakpoints given the observed value range
double pair_point_ceiling(double d_min, double d_max, double epsilon) {
  if (!(d_min > 0) || !(d_max >= d_min)) return kInfTime;
  return 4.0 * std::log(d_max / d_min) / std::log1p(epsilon) + 2.0;
}

}  // namespace

ValidateReport validate(const TdInstance &g, const Oracle &o,
                        const ValidateConfig &cfg) {
  if (o.n != g.n())
    throw std::invalid_argument("validate: oracle built for a different instance");
  const double eps = o.config.epsilon;
  MetricParams metric = cfg.metric;
  metric.epsilon = eps;
  const double psi = metric.psi();

  CheckAcc sandwich_lower("sandwich-lower", 1e-9);
  CheckAcc sandwich_upper("sandwich-upper", 1.0);
  CheckAcc fca_lower("fca-lower", 1e-9);
  CheckAcc fca_ball("fca-ball-bound", 1.0);
  CheckAcc fca_stretch("fca-stretch", 1.0);
  CheckAcc rqa_stretch("rqa-stretch", 1.0);
  CheckAcc rqa_monotone("rqa-monotone", 1e-12);
  CheckAcc rec_exact("reconstruct-exact", 1e-9);
  CheckAcc rec_upper("reconstruct-upper", 1.0);
  CheckAcc rec_lower("reconstruct-lower", 1e-9);

  std::mt19937_64 rng(mix_seed(cfg.seed, 0x7d411));

  // sandwich: random probe times plus every stored breakpoint time, so a
  // corrupted stored value is compared against the exact run at its own
  // breakpoint; one earliest-arrival run per distinct time covers all v
  for (const LandmarkSummary &ls : o.summaries) {
    std::set<double> times;
    for (int k = 0; k < cfg.times_per_landmark; ++k)
      times.insert(uniform_in(rng, 0.0, g.period()));
    std::set<double> stored;
    for (int v = 0; v < o.n; ++v)
      for (std::size_t i = 0; i < ls.per_vertex[v].fn.size(); ++i)
        stored.insert(ls.per_vertex[v].fn.time_at(i));
    const std::size_t cap = cfg.breakpoint_probes_per_landmark;
    const std::size_t stride = stored.size() > cap ? (stored.size() + cap - 1) / cap : 1;
    std::size_t idx = 0;
    for (double t : stored)
      if (idx++ % stride == 0) times.insert(t);

    for (double t : times) {
      const TddResult ex = tdd_one_to_all(g, ls.landmark, t);
      for (int v = 0; v < o.n; ++v) {
        const double exact = ex.arrival[v] - t;
        const double approx = query_summary(ls, v, t).value;
        const std::string w = lvt_witness(ls.landmark, v, t);
        if (!std::isfinite(exact)) {
          if (std::isfinite(approx)) sandwich_lower.observe(kInfTime, w);
          continue;
        }
        sandwich_lower.observe(exact - approx, w);
        sandwich_upper.observe(approx / ((1 + eps) * exact + 1e-9), w);
      }
    }
  }

  // query checks share one sample set; exact values come from one
  // earliest-arrival run per query
  BallWorkspace ws;
  int rec_exact_left = cfg.reconstructions;
  int rec_via_left = cfg.reconstructions;
  auto try_reconstruct = [&](const QueryAnswer &a, double exact) {
    if (!std::isfinite(a.value)) return;
    if (a.kind == AnswerKind::exact ? rec_exact_left <= 0 : rec_via_left <= 0)
      return;
    const std::string w = odt_witness(a.origin, a.destination, a.t0, a.depth);
    try {
      const PathResult p = reconstruct_path(g, o, a, ws);
      if (a.kind == AnswerKind::exact) {
        --rec_exact_left;
        rec_exact.observe(std::abs(p.travel - a.value), w);
      } else {
        --rec_via_left;
        rec_upper.observe(p.travel / (a.value * (1 + eps) + 1e-6), w);
      }
      rec_lower.observe(exact - p.travel, w);
    } catch (const ReconstructionError &) {
      (a.kind == AnswerKind::exact ? rec_exact : rec_upper).observe(kInfTime, w);
    }
  };

  for (int q = 0; q < cfg.queries; ++q) {
    const int origin = static_cast<int>(uniform_index(rng, g.n()));
    int destination = static_cast<int>(uniform_index(rng, g.n() - 1));
    if (destination >= origin) ++destination;
    const double t = uniform_in(rng, 0.0, g.period());
    const TddResult ex = tdd_one_to_all(g, origin, t);
    const double exact = ex.arrival[destination] - t;

    double prev = kInfTime;
    for (int r = 0; r <= cfg.budget; ++r) {
      const QueryAnswer a = rqa(g, o, origin, destination, t, r, ws);
      const std::string w = odt_witness(origin, destination, t, r);
      if (!std::isfinite(exact)) {
        if (std::isfinite(a.value)) fca_lower.observe(kInfTime, w);
      } else {
        if (r == 0) {
          fca_lower.observe(exact - a.value, w);
          const double r0 = a.radii.empty() ? 0.0 : a.radii.front();
          fca_ball.observe(a.value / ((1 + eps) * exact + psi * r0 + 1e-9), w);
          fca_stretch.observe(a.value / ((1 + eps + psi) * exact + 1e-9), w);
        }
        const double sigma = sigma_for_budget(eps, psi, r);
        rqa_stretch.observe(a.value / ((1 + sigma) * exact + 1e-9), w);
      }
      if (r > 0) rqa_monotone.observe(a.value - prev, w);
      prev = a.value;
      if (r == 0 || r == cfg.budget) try_reconstruct(a, exact);
    }
  }

  ValidateReport report;
  for (CheckAcc *acc :
       {&sandwich_lower, &sandwich_upper, &fca_lower, &fca_ball, &fca_stretch,
        &rqa_stretch, &rqa_monotone, &rec_exact, &rec_upper, &rec_lower}) {
    report.checks.push_back(acc->finish());
    report.pass = report.pass && report.checks.back().pass;
  }
  return report;
}

BallSizeStats sample_ball_sizes(const TdInstance &g,
                                const std::vector<char> &is_landmark,
                                double rho, int count, std::uint64_t seed) {
  if (!(rho > 0) || !(rho <= 1))
    throw std::invalid_argument("sample_ball_sizes: rho outside (0,1]");
  BallSizeStats s;
  s.tail_threshold = (1.0 / rho) * std::log(1.0 / rho);
  BallWorkspace ws;
  std::mt19937_64 rng(mix_seed(seed, 0xba11));
  double sum = 0;
  std::size_t tail = 0;
  for (int i = 0; i < count; ++i) {
    const int origin = static_cast<int>(uniform_index(rng, g.n()));
    const double t = uniform_in(rng, 0.0, g.period());
    const BallResult b = grow_ball(g, is_landmark, origin, t, -1, ws);
    const std::size_t size = b.settled.size();
    sum += static_cast<double>(size);
    if (static_cast<double>(size) > s.tail_threshold) ++tail;
    if (size >= 1) {
      if (s.histogram.size() < size) s.histogram.resize(size, 0);
      ++s.histogram[size - 1];
    }
  }
  if (count > 0) {
    s.mean = sum / count;
    s.tail_frac = static_cast<double>(tail) / count;
    double gap = 0, geo_seen = 0;
    for (std::size_t k = 0; k < s.histogram.size(); ++k) {
      const double emp = static_cast<double>(s.histogram[k]) / count;
      const double geo = rho * std::pow(1.0 - rho, static_cast<double>(k));
      gap += std::abs(emp - geo);
      geo_seen += geo;
    }
    s.tv_geometric = 0.5 * (gap + (1.0 - geo_seen));
  }
  return s;
}

BenchReport bench(const TdInstance &g, const BenchConfig &cfg) {
  BenchReport report;
  report.n = g.n();
  report.m = g.m();
  const double log_n = std::log(static_cast<double>(std::max(2, g.n())));

  for (double rho : cfg.rhos) {
    for (double eps : cfg.epsilons) {
      OracleConfig oc;
      oc.epsilon = eps;
      oc.rho = rho;
      oc.seed = cfg.seed;
      oc.threads = cfg.threads;
      oc.keep_samples = true;
      const auto b0 = Clock::now();
      const Oracle o = build_oracle(g, oc);
      const auto b1 = Clock::now();

      double u_sum = 0, u_ratio = 0;
      std::size_t u_max = 0, pairs = 0;
      for (const LandmarkSummary &ls : o.summaries) {
        std::vector<double> bounds = ls.cuts;
        bounds.push_back(g.period());
        for (int v = 0; v < o.n; ++v) {
          const VertexSummary &vs = ls.per_vertex[v];
          if (!vs.reachable) continue;
          ++pairs;
          u_sum += static_cast<double>(vs.fn.size());
          u_max = std::max(u_max, vs.fn.size());
          const double ceiling =
              pair_point_ceiling(ls.d_min[v], ls.d_max[v], eps);
          if (!std::isfinite(ceiling)) continue;
          // the ceiling is per subinterval, so bucket the stored times by
          // the landmark's cuts before comparing
          double prev = 0;
          for (double b : bounds) {
            std::size_t cnt = 0;
            for (std::size_t i = 0; i < vs.fn.size(); ++i) {
              const double t = vs.fn.time_at(i);
              if (t >= prev && t < b) ++cnt;
            }
            u_ratio = std::max(u_ratio, static_cast<double>(cnt) / ceiling);
            prev = b;
          }
        }
      }

      MetricParams metric = cfg.metric;
      metric.epsilon = eps;
      const double psi = metric.psi();

      // one query sample set per oracle, shared by every budget row
      std::mt19937_64 rng(mix_seed(cfg.seed, 0xbe7c4));
      std::vector<QueryRequest> queries(cfg.queries);
      std::vector<double> exact(cfg.queries);
      for (int q = 0; q < cfg.queries; ++q) {
        queries[q].origin = static_cast<int>(uniform_index(rng, g.n()));
        int d = static_cast<int>(uniform_index(rng, g.n() - 1));
        if (d >= queries[q].origin) ++d;
        queries[q].destination = d;
        queries[q].t0 = uniform_in(rng, 0.0, g.period());
        const TddResult ex = tdd_one_to_all(g, queries[q].origin, queries[q].t0);
        exact[q] = ex.arrival[d] - queries[q].t0;
      }

      const BallSizeStats balls = sample_ball_sizes(
          g, o.landmarks.is_landmark, rho, std::max(cfg.queries, 200),
          mix_seed(cfg.seed, 0xba115));

      const double a_exp = -std::log(rho) / log_n;
      for (int r : cfg.budgets) {
        BenchRow row;
        row.rho = rho;
        row.epsilon = eps;
        row.budget = r;
        row.landmarks = o.summaries.size();
        row.pre_seconds = seconds_between(b0, b1);
        row.pre_points = o.total_points();
        row.pre_probes = o.total_probes();
        row.u_mean = pairs ? u_sum / static_cast<double>(pairs) : 0;
        row.u_max = u_max;
        row.u_worst_ratio = u_ratio;
        row.stretch_bound = 1 + sigma_for_budget(eps, psi, r);
        row.ball_mean = balls.mean;
        row.ball_bound = 1.0 / rho;
        row.space_shape = std::pow(static_cast<double>(g.n()), 2.0 - a_exp);
        row.time_shape = std::pow(static_cast<double>(g.n()), (r + 1) * a_exp);

        BallWorkspace ws;
        std::vector<double> micros(queries.size());
        double stretch_sum = 0, stretch_max = 1;
        std::size_t stretched = 0;
        for (std::size_t q = 0; q < queries.size(); ++q) {
          const auto q0 = Clock::now();
          const QueryAnswer ans =
              rqa(g, o, queries[q].origin, queries[q].destination,
                  queries[q].t0, r, ws);
          const auto q1 = Clock::now();
          micros[q] = seconds_between(q0, q1) * 1e6;
          if (std::isfinite(exact[q]) && exact[q] > 0 &&
              std::isfinite(ans.value)) {
            const double stretch = std::max(1.0, ans.value / exact[q]);
            stretch_sum += stretch;
            stretch_max = std::max(stretch_max, stretch);
            ++stretched;
          }
        }
        if (!micros.empty()) {
          double total = 0;
          for (double v : micros) total += v;
          row.query_mean_us = total / static_cast<double>(micros.size());
          std::sort(micros.begin(), micros.end());
          row.query_p95_us =
              micros[(micros.size() * 95 + 99) / 100 - 1];
        }
        row.stretch_mean = stretched ? stretch_sum / stretched : 1;
        row.stretch_max = stretch_max;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

std::string bench_csv(const BenchReport &r) {
  std::string out =
      "tdbench.v1,n,m,rho,epsilon,budget,landmarks,pre_seconds,pre_points,"
      "pre_probes,u_mean,u_max,u_worst_ratio,query_mean_us,query_p95_us,"
      "stretch_mean,stretch_max,stretch_bound,ball_mean,ball_bound,"
      "space_shape,time_shape\n";
  int row_id = 0;
  for (const BenchRow &w : r.rows) {
    out += std::to_string(row_id++) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.m) + ',';
    out += format_double(w.rho) + ',' + format_double(w.epsilon) + ',' +
           std::to_string(w.budget) + ',' + std::to_string(w.landmarks) + ',';
    out += format_double(w.pre_seconds) + ',' + std::to_string(w.pre_points) +
           ',' + std::to_string(w.pre_probes) + ',';
    out += format_double(w.u_mean) + ',' + std::to_string(w.u_max) + ',' +
           format_double(w.u_worst_ratio) + ',';
    out += format_double(w.query_mean_us) + ',' + format_double(w.query_p95_us) +
           ',';
    out += format_double(w.stretch_mean) + ',' + format_double(w.stretch_max) +
           ',' + format_double(w.stretch_bound) + ',';
    out += format_double(w.ball_mean) + ',' + format_double(w.ball_bound) + ',';
    out += format_double(w.space_shape) + ',' + format_double(w.time_shape) +
           '\n';
  }
  return out;
}

std::string bench_table(const BenchReport &r) {
  char line[256];
  std::snprintf(line, sizeof(line), "n=%d m=%d\n", r.n, r.m);
  std::string out = line;
  std::snprintf(line, sizeof(line),
                "%8s %7s %3s %5s %9s %9s %8s %7s %6s %8s %9s %9s %8s %8s %8s "
                "%8s %8s %10s %10s\n",
                "rho", "eps", "r", "lmks", "pre_s", "points", "probes",
                "u_mean", "u_max", "u_ratio", "q_us", "q95_us", "str_avg",
                "str_max", "str_bnd", "ball", "ball_bnd", "space_thy",
                "time_thy");
  out += line;
  for (const BenchRow &w : r.rows) {
    std::snprintf(line, sizeof(line),
                  "%8.5f %7.4f %3d %5zu %9.3f %9zu %8zu %7.2f %6zu %8.3f "
                  "%9.2f %9.2f %8.4f %8.4f %8.3f %8.2f %8.2f %10.3g %10.3g\n",
                  w.rho, w.epsilon, w.budget, w.landmarks, w.pre_seconds,
                  w.pre_points, w.pre_probes, w.u_mean, w.u_max,
                  w.u_worst_ratio, w.query_mean_us, w.query_p95_us,
                  w.stretch_mean, w.stretch_max, w.stretch_bound, w.ball_mean,
                  w.ball_bound, w.space_shape, w.time_shape);
    out += line;
  }
  return out;
}

std::vector<QueryRequest> read_query_batch(std::istream &in) {
  std::vector<QueryRequest> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string o, d, t, extra;
    if (!(ls >> o)) continue;
    if (!(ls >> d >> t) || (ls >> extra))
      throw std::runtime_error("query batch line " + std::to_string(line_no) +
                               ": expected 'origin destination time'");
    QueryRequest q;
    q.origin = static_cast<int>(parse_int(o));
    q.destination = static_cast<int>(parse_int(d));
    q.t0 = parse_double(t);
    out.push_back(q);
  }
  return out;
}

void write_answer_line(std::ostream &out, const QueryAnswer &a,
                       const PathResult *path) {
  out << a.origin << ' ' << a.destination << ' ' << format_double(a.t0) << ' '
      << answer_kind_name(a.kind) << ' ' << format_double(a.value) << ' '
      << a.depth << ' ' << a.ball_sizes.size();
  for (std::size_t s : a.ball_sizes) out << ' ' << s;
  if (path) {
    out << ' ' << path->vertices.size();
    for (int v : path->vertices) out << ' ' << v;
  }
  out << '\n';
}

AnswerKind answer_kind_from_name(const std::string &name) {
  for (AnswerKind k : {AnswerKind::exact, AnswerKind::via_landmark,
                       AnswerKind::landmark_hit})
    if (name == answer_kind_name(k)) return k;
  throw std::runtime_error("unknown answer kind '" + name + "'");
}

AnswerRecord parse_answer_line(const std::string &line) {
  std::istringstream ls(line);
  std::string tok;
  auto next = [&] {
    if (!(ls >> tok)) throw std::runtime_error("answer line: truncated record");
    return tok;
  };
  AnswerRecord rec;
  rec.answer.origin = static_cast<int>(parse_int(next()));
  rec.answer.destination = static_cast<int>(parse_int(next()));
  rec.answer.t0 = parse_double(next());
  rec.answer.kind = answer_kind_from_name(next());
  rec.answer.value = parse_double(next());
  rec.answer.depth = static_cast<int>(parse_int(next()));
  const long long sizes = parse_int(next());
  if (sizes < 0) throw std::runtime_error("answer line: negative list count");
  for (long long i = 0; i < sizes; ++i)
    rec.answer.ball_sizes.push_back(
        static_cast<std::size_t>(parse_int(next())));
  if (ls >> tok) {
    rec.has_path = true;
    const long long count = parse_int(tok);
    if (count < 0) throw std::runtime_error("answer line: negative list count");
    for (long long i = 0; i < count; ++i)
      rec.path.push_back(static_cast<int>(parse_int(next())));
    if (ls >> tok)
      throw std::runtime_error("answer line: trailing tokens");
  }
  return rec;
}

}  // namespace tdo
