#include "tdo/pwl.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "tdo/util.hpp"

namespace tdo {

namespace {

constexpr double kTimeTol = 1e-12;   // relative to the period
constexpr double kSlopeTol = 1e-9;
constexpr double kCollinearTol = 1e-12;

double reduce_period(double t, double period) {
  double tau = std::fmod(t, period);
  if (tau < 0) tau += period;
  if (tau >= period) tau = 0;  // fmod can land on period after the += above
  return tau;
}

}  // namespace

PwlFunction::PwlFunction(FnKind kind, double period,
                         std::vector<Breakpoint> points, bool allow_zero)
    : kind_(kind), period_(period) {
  if (!(period > 0) || !std::isfinite(period))
    throw std::invalid_argument("pwl: period must be positive and finite");
  if (points.empty()) throw std::invalid_argument("pwl: no breakpoints");

  const double ttol = kTimeTol * std::max(1.0, period);
  // merge near-duplicate times (keep the first), check ordering and domain
  std::vector<Breakpoint> merged;
  merged.reserve(points.size());
  for (const Breakpoint &p : points) {
    if (!std::isfinite(p.t) || !std::isfinite(p.v))
      throw std::invalid_argument("pwl: non-finite breakpoint");
    if (p.t < 0 || p.t >= period)
      throw std::invalid_argument("pwl: breakpoint time outside [0,period)");
    if (!merged.empty()) {
      if (p.t + ttol < merged.back().t)
        throw std::invalid_argument("pwl: breakpoint times not increasing");
      if (p.t <= merged.back().t + ttol) continue;  // duplicate, first wins
    }
    merged.push_back(p);
  }

  // prune interior breakpoints collinear with both neighbors
  std::vector<Breakpoint> kept;
  kept.reserve(merged.size());
  for (const Breakpoint &p : merged) {
    while (kept.size() >= 2) {
      const Breakpoint &a = kept[kept.size() - 2];
      const Breakpoint &b = kept.back();
      const double chord = a.v + (p.v - a.v) * (b.t - a.t) / (p.t - a.t);
      const double scale = std::max({1.0, std::fabs(a.v), std::fabs(p.v)});
      if (std::fabs(chord - b.v) <= kCollinearTol * scale)
        kept.pop_back();
      else
        break;
    }
    kept.push_back(p);
  }

  times_.reserve(kept.size());
  values_.reserve(kept.size());
  for (const Breakpoint &p : kept) {
    times_.push_back(p.t);
    values_.push_back(p.v);
  }

  const std::size_t k = times_.size();
  slopes_.resize(k);
  for (std::size_t i = 0; i + 1 < k; ++i)
    slopes_[i] = (values_[i + 1] - values_[i]) / (times_[i + 1] - times_[i]);
  {
    const double span = times_[0] + period_ - times_[k - 1];
    double rise = values_[0] - values_[k - 1];
    if (kind_ == FnKind::arrival) rise += period_;
    slopes_[k - 1] = k == 1 && kind_ != FnKind::arrival ? 0.0 : rise / span;
  }

  if (kind_ == FnKind::delay) {
    for (double v : values_) {
      if (allow_zero ? v < 0 : v <= 0)
        throw std::invalid_argument("pwl: delay values must be positive");
    }
    for (double s : slopes_)
      if (s < -1 - kTimeTol)
        throw std::invalid_argument("pwl: delay leg slope below -1 breaks FIFO");
  } else if (kind_ == FnKind::arrival) {
    for (double s : slopes_)
      if (s < -kSlopeTol)
        throw std::invalid_argument("pwl: arrival function must be non-decreasing");
  }
}

PwlFunction PwlFunction::constant(FnKind kind, double period, double value) {
  return PwlFunction(kind, period, {{0.0, value}}, value == 0.0);
}

double PwlFunction::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double PwlFunction::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

std::size_t PwlFunction::leg_index(double tau) const {
  // leg i covers [times_[i], times_[i+1]); the wrap leg covers the rest
  auto it = std::upper_bound(times_.begin(), times_.end(), tau);
  if (it == times_.begin()) return times_.size() - 1;  // before first: wrap leg
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

double PwlFunction::evaluate(double t) const {
  const double tau = reduce_period(t, period_);
  const std::size_t i = leg_index(tau);
  double value;
  if (tau < times_[0]) {
    // continuation of the wrap leg from the previous period, anchored at the
    // first breakpoint so no period offset enters the interpolation
    value = values_[0] + (tau - times_[0]) * slopes_[times_.size() - 1];
  } else {
    value = values_[i] + (tau - times_[i]) * slopes_[i];
  }
  if (kind_ == FnKind::arrival) value += t - tau;
  return value;
}

double PwlFunction::leg_slope(std::size_t i) const {
  assert(i < slopes_.size());
  return slopes_[i];
}

std::size_t PwlFunction::leg_at(double t) const {
  return leg_index(reduce_period(t, period_));
}

std::pair<double, double> PwlFunction::slope_range(double t, double tol) const {
  const std::size_t k = times_.size();
  if (k == 1) return {slopes_[0], slopes_[0]};
  const double tau = reduce_period(t, period_);
  auto cyc = [&](double x) {
    const double d = std::fabs(x - tau);
    return std::min(d, period_ - d);
  };
  // nearest breakpoint is the cyclic successor or predecessor of tau
  const auto it = std::lower_bound(times_.begin(), times_.end(), tau);
  const std::size_t succ =
      it == times_.end() ? 0 : static_cast<std::size_t>(it - times_.begin());
  const std::size_t pred = (succ + k - 1) % k;
  const std::size_t j = cyc(times_[succ]) <= cyc(times_[pred]) ? succ : pred;
  if (cyc(times_[j]) <= tol) {
    const double in = slopes_[(j + k - 1) % k];
    const double out = slopes_[j];
    return {std::min(in, out), std::max(in, out)};
  }
  const double s = slopes_[leg_index(tau)];
  return {s, s};
}

double PwlFunction::slope_right(double t) const {
  const double tau = reduce_period(t, period_);
  return slopes_[leg_index(tau)];
}

double PwlFunction::slope_left(double t) const {
  const double tau = reduce_period(t, period_);
  const std::size_t i = leg_index(tau);
  if (tau > times_[i] || (tau < times_[0] && i == times_.size() - 1))
    return slopes_[i];
  // exactly at breakpoint i: the incoming leg is the previous one, cyclically
  return slopes_[(i + slopes_.size() - 1) % slopes_.size()];
}

bool PwlFunction::fifo() const {
  for (double s : slopes_)
    if (s < -1 - kTimeTol) return false;
  return true;
}

bool PwlFunction::strictly_fifo() const {
  for (double s : slopes_)
    if (s <= -1) return false;
  return true;
}

std::vector<std::size_t> PwlFunction::split_concavity() const {
  std::vector<std::size_t> out;
  const std::size_t k = slopes_.size();
  if (k < 2) return out;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == 0 && times_[0] == 0.0) continue;  // period boundary, never split
    const double in = slopes_[(i + k - 1) % k];
    const double sout = slopes_[i];
    if (sout > in + kSlopeTol * std::max(1.0, std::fabs(in))) out.push_back(i);
  }
  return out;
}

void PwlFunction::save(std::ostream &out) const {
  out << format_double(period_) << ' ' << times_.size() << '\n';
  for (std::size_t i = 0; i < times_.size(); ++i)
    out << format_double(times_[i]) << ' ' << format_double(values_[i]) << '\n';
}

PwlFunction PwlFunction::load(std::istream &in, FnKind kind, bool allow_zero) {
  double period;
  std::size_t k;
  if (!(in >> period >> k)) throw std::runtime_error("pwl: bad function header");
  std::vector<Breakpoint> pts(k);
  for (std::size_t i = 0; i < k; ++i)
    if (!(in >> pts[i].t >> pts[i].v))
      throw std::runtime_error("pwl: truncated breakpoint list");
  return PwlFunction(kind, period, std::move(pts), allow_zero);
}

bool PwlFunction::operator==(const PwlFunction &other) const {
  return kind_ == other.kind_ && period_ == other.period_ &&
         times_ == other.times_ && values_ == other.values_;
}

PwlFunction arrival_from_delay(const PwlFunction &d) {
  if (d.kind() != FnKind::delay)
    throw std::invalid_argument("arrival_from_delay: expected a delay function");
  std::vector<Breakpoint> pts(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    pts[i] = {d.time_at(i), d.time_at(i) + d.value_at(i)};
  return PwlFunction(FnKind::arrival, d.period(), std::move(pts));
}

PwlFunction delay_from_arrival(const PwlFunction &a) {
  if (a.kind() != FnKind::arrival)
    throw std::invalid_argument("delay_from_arrival: expected an arrival function");
  std::vector<Breakpoint> pts(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    pts[i] = {a.time_at(i), a.value_at(i) - a.time_at(i)};
  return PwlFunction(FnKind::delay, a.period(), std::move(pts));
}

PwlFunction compose_arrival(const PwlFunction &g, const PwlFunction &f) {
  if (g.kind() != FnKind::arrival || f.kind() != FnKind::arrival)
    throw std::invalid_argument("compose_arrival: expected arrival functions");
  if (g.period() != f.period())
    throw std::invalid_argument("compose_arrival: period mismatch");
  const double T = f.period();

  std::vector<double> cuts;
  cuts.push_back(0.0);
  for (std::size_t i = 0; i < f.size(); ++i) cuts.push_back(f.time_at(i));

  // preimages under f of g's breakpoints (all periodic copies inside f's
  // value range over one period). Segments of f over [0,T) in order:
  // [0,t_0], [t_i,t_{i+1}], [t_last,T], endpoints included once via cuts.
  const double f0 = f.evaluate(0.0);
  struct Seg {
    double a, fa, slope, b;
  };
  std::vector<Seg> segs;
  if (f.time_at(0) > 0)
    segs.push_back({0.0, f0, f.leg_slope(f.size() - 1), f.time_at(0)});
  for (std::size_t i = 0; i + 1 < f.size(); ++i)
    segs.push_back({f.time_at(i), f.value_at(i), f.leg_slope(i), f.time_at(i + 1)});
  segs.push_back({f.time_at(f.size() - 1), f.value_at(f.size() - 1),
                  f.leg_slope(f.size() - 1), T});

  for (const Seg &s : segs) {
    if (s.slope <= 0) continue;  // flat legs produce no interior kink
    const double fb = s.fa + (s.b - s.a) * s.slope;
    for (std::size_t j = 0; j < g.size(); ++j) {
      // copies g.time_at(j) + p*T inside (s.fa, fb)
      const double base = g.time_at(j);
      double p = std::floor((s.fa - base) / T);
      for (double y = base + p * T; y < fb; y += T) {
        if (y > s.fa && y < fb) cuts.push_back(s.a + (y - s.fa) / s.slope);
      }
    }
  }

  std::sort(cuts.begin(), cuts.end());
  std::vector<Breakpoint> pts;
  pts.reserve(cuts.size());
  const double ttol = kTimeTol * std::max(1.0, T);
  for (double t : cuts) {
    if (t < 0 || t >= T) continue;
    if (!pts.empty() && t <= pts.back().t + ttol) continue;
    pts.push_back({t, g.evaluate(f.evaluate(t))});
  }
  return PwlFunction(FnKind::arrival, T, std::move(pts));
}

PwlFunction pointwise_min(const PwlFunction &f, const PwlFunction &g) {
  if (f.kind() != g.kind())
    throw std::invalid_argument("pointwise_min: kind mismatch");
  if (f.period() != g.period())
    throw std::invalid_argument("pointwise_min: period mismatch");
  const double T = f.period();

  std::vector<double> cuts;
  cuts.reserve(f.size() + g.size() + 1);
  cuts.push_back(0.0);
  for (std::size_t i = 0; i < f.size(); ++i) cuts.push_back(f.time_at(i));
  for (std::size_t i = 0; i < g.size(); ++i) cuts.push_back(g.time_at(i));
  std::sort(cuts.begin(), cuts.end());
  const double ttol = kTimeTol * std::max(1.0, T);
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a <= ttol; }),
             cuts.end());

  std::vector<Breakpoint> pts;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + T;
    const double da = f.evaluate(a) - g.evaluate(a);
    const double db = f.evaluate(b) - g.evaluate(b);
    pts.push_back({a, std::min(f.evaluate(a), g.evaluate(a))});
    if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
      const double t = a + (b - a) * (da / (da - db));
      if (t > a + ttol && t < b - ttol)
        pts.push_back({reduce_period(t, T), std::min(f.evaluate(t), g.evaluate(t))});
    }
  }
  // a crossing on the wrap leg reduces to a time before the other points
  std::sort(pts.begin(), pts.end(),
            [](const Breakpoint &x, const Breakpoint &y) { return x.t < y.t; });
  return PwlFunction(f.kind(), T, std::move(pts));
}

MaeEstimate mae_estimate(double t_s, double t_f, double d_s, double d_f,
                         double slope_out, double slope_in) {
  if (!(t_f > t_s) || !std::isfinite(t_s) || !std::isfinite(t_f))
    throw std::invalid_argument("mae_estimate: need t_s < t_f");
  if (!std::isfinite(d_s) || !std::isfinite(d_f) ||
      !std::isfinite(slope_out) || !std::isfinite(slope_in))
    throw std::invalid_argument("mae_estimate: non-finite input");
  const double sscale = std::max({1.0, std::fabs(slope_out), std::fabs(slope_in)});
  if (slope_out < slope_in - kSlopeTol * sscale)
    throw std::invalid_argument(
        "mae_estimate: slope_out < slope_in, interval spans a concavity break");

  const double len = t_f - t_s;
  const double spread = slope_out - slope_in;
  if (spread <= kSlopeTol * sscale) return {t_s, d_s, 0.0};

  const double chord = (d_f - d_s) / len;
  if (chord > slope_out + kSlopeTol * sscale ||
      chord < slope_in - kSlopeTol * sscale)
    throw std::invalid_argument(
        "mae_estimate: endpoint values inconsistent with one-sided slopes");

  double m = (d_f - d_s + t_s * slope_out - t_f * slope_in) / spread;
  m = std::min(std::max(m, t_s), t_f);
  const double upper_mid = slope_out * (m - t_s) + d_s;
  double mae = spread * (m - t_s) * (t_f - m) / len;
  if (mae < 0) mae = 0;
  assert(mae <= len * spread / 4 + 1e-9 * std::max(1.0, len * spread));
  return {m, upper_mid, mae};
}

}  // namespace tdo
