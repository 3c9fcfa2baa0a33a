#ifndef TDO_PWL_HPP
#define TDO_PWL_HPP

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

namespace tdo {

// Periodic continuous piecewise-linear functions on [0,T).
//
// Three interpretations share the representation:
//   delay    value is a travel delay, periodic: f(t+T) = f(t).
//            Leg slopes must stay >= -1 (strictly greater for strict FIFO).
//   arrival  value is an arrival time, periodic plus trend: f(t+T) = f(t)+T.
//            Legs must be non-decreasing.
//   summary  free-form periodic values (approximation data, reverse delays).
//
// The leg after the last breakpoint wraps to the first breakpoint one period
// later, so the function is continuous everywhere by construction.
enum class FnKind { delay, arrival, summary };

struct Breakpoint {
  double t;
  double v;
};

struct MaeEstimate {
  double t_mid;      // argmax of the worst-case gap, in [t_s, t_f]
  double upper_mid;  // upper approximation value at t_mid
  double mae;        // worst-case max absolute error of chord vs truth
};

class PwlFunction {
 public:
  // Breakpoints must be sorted by strictly increasing time within [0, period).
  // Interior breakpoints collinear with both neighbors are pruned; the first
  // and last are always kept. allow_zero permits zero values on delay
  // functions (auxiliary arcs only).
  PwlFunction(FnKind kind, double period, std::vector<Breakpoint> points,
              bool allow_zero = false);

  static PwlFunction constant(FnKind kind, double period, double value);

  FnKind kind() const { return kind_; }
  double period() const { return period_; }
  std::size_t size() const { return times_.size(); }
  double time_at(std::size_t i) const { return times_[i]; }
  double value_at(std::size_t i) const { return values_[i]; }

  double min_value() const;  // extremes are attained at breakpoints
  double max_value() const;

  double evaluate(double t) const;
  // One-sided slopes; at a breakpoint these are the adjacent leg slopes,
  // elsewhere both equal the containing leg's slope.
  double slope_left(double t) const;
  double slope_right(double t) const;

  // Slope of the leg starting at breakpoint i (the last leg wraps).
  double leg_slope(std::size_t i) const;

  // Index of the leg containing t (reduced into [0,T)). Times before the
  // first breakpoint fall on the wrap leg.
  std::size_t leg_at(double t) const;

  // Both adjacent leg slopes when t sits within tol of a breakpoint
  // (cyclically), as a {min, max} pair, otherwise the containing leg's slope
  // twice. Callers whose time coordinate carries float noise widen with this
  // instead of trusting an exact one-sided lookup.
  std::pair<double, double> slope_range(double t, double tol) const;

  bool fifo() const;           // every leg slope >= -1 (tolerance 1e-12)
  bool strictly_fifo() const;  // every leg slope > -1

  // Indices of breakpoints where the incoming slope is smaller than the
  // outgoing slope (cyclically, so the wrap leg counts as incoming slope of
  // the first breakpoint). A breakpoint at t=0 is never reported: the period
  // boundary is already an interval endpoint for every caller.
  std::vector<std::size_t> split_concavity() const;

  // Text form: "T k" then k lines "t v", shortest round-trip decimals.
  void save(std::ostream &out) const;
  static PwlFunction load(std::istream &in, FnKind kind, bool allow_zero = false);

  bool operator==(const PwlFunction &other) const;

 private:
  FnKind kind_;
  double period_;
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // per leg, slopes_[k-1] is the wrap leg

  // index of the leg containing reduced time tau in [0,T)
  std::size_t leg_index(double tau) const;
};

PwlFunction arrival_from_delay(const PwlFunction &d);
PwlFunction delay_from_arrival(const PwlFunction &a);

// h(t) = g(f(t)) for arrival functions sharing a period. Breakpoints are f's
// breakpoints plus preimages under f of g's breakpoints (periodic copies).
PwlFunction compose_arrival(const PwlFunction &g, const PwlFunction &f);

// Lower envelope min(f,g) with breakpoints at inputs' breakpoints and at
// crossings.
PwlFunction pointwise_min(const PwlFunction &f, const PwlFunction &g);

// Worst-case max absolute error of the chord on [t_s,t_f] against any concave
// function through (t_s,d_s),(t_f,d_f) with one-sided slopes slope_out at t_s
// and slope_in at t_f. Equal slopes (affine data) give mae = 0 with
// t_mid = t_s. Rejects slope_out < slope_in and chords outside the slope
// range: the caller must have split at concavity-spoiling points first.
MaeEstimate mae_estimate(double t_s, double t_f, double d_s, double d_f,
                         double slope_out, double slope_in);

}  // namespace tdo

#endif  // TDO_PWL_HPP
