#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbl/closed_form.hpp"
#include "pbl/integrator.hpp"

namespace pbl {

/// Scalar cocycle Phi(t, tau, w, x). Evaluations go through frames (see frame::), so the
/// pullback Phi(t, tau - t, theta_{-t} w, x) is computed without materializing the shift.
class Cocycle {
 public:
  using Map = std::function<FlowResult(double)>;
  using MapFactory = std::function<Map(double offset, double s0, double s1, const WienerPath&)>;

  Cocycle(std::string name, bool exact, double step, MapFactory factory)
      : name_(std::move(name)), exact_(exact), step_(step), factory_(std::move(factory)) {
    require(static_cast<bool>(factory_), ErrorKind::configuration, "cocycle needs an evolution");
    const WienerPath probe_path = zero_path(TimeGrid(step_ > 0 ? step_ : 1e-3, 2, 2));
    for (double x : {-1.5, -0.3, 0.0, 0.4, 2.0}) {
      const FlowResult r = (*this)(0.0, 0.0, probe_path, x);
      if (!r.finite() || r.value != x)
        fail(ErrorKind::invariant_violation, "cocycle " + name_ + " violates Phi(0, tau, w, x) = x at x = " + std::to_string(x));
    }
  }

  FlowResult operator()(double t, double tau, const WienerPath& w, double x) const {
    require(t >= 0.0, ErrorKind::domain, "cocycle time must be nonnegative");
    return factory_(tau, 0.0, t, w)(x);
  }

  /// Phi(t, tau - t, theta_{-t} w, x) = x(tau, tau - t, theta_{-tau} w, x).
  FlowResult pullback(double t, double tau, const WienerPath& w, double x) const { return pullback_map(t, tau, w)(x); }

  /// x -> Phi(t, tau - t, theta_{-t} w, x); closed forms reuse the quadrature across x.
  Map pullback_map(double t, double tau, const WienerPath& w) const {
    require(t >= 0.0, ErrorKind::domain, "pullback time must be nonnegative");
    return factory_(tau, -t, 0.0, w);
  }

  const std::string& name() const noexcept { return name_; }
  bool exact() const noexcept { return exact_; }
  /// Integrator step, or 0 for closed forms.
  double step() const noexcept { return step_; }

  /// Discretization scale used for monotonicity slack: integrator step or the path step.
  double scheme_tolerance(const WienerPath& w, double scale) const {
    return (exact_ ? w.step() : step_) * std::max(1.0, std::abs(scale));
  }

 private:
  std::string name_;
  bool exact_;
  double step_;
  MapFactory factory_;
};

inline Cocycle closed_form_pitchfork(const Coefficients& c) {
  return Cocycle("closed_form_pitchfork", true, 0.0, [c](double off, double s0, double s1, const WienerPath& w) -> Cocycle::Map {
    const auto m = frame::pitchfork(c, w, off, s0, s1);
    return [m](double x) { return FlowResult::of(m(x)); };
  });
}

inline Cocycle closed_form_transcritical(const Coefficients& c) {
  return Cocycle("closed_form_transcritical", true, 0.0,
                 [c](double off, double s0, double s1, const WienerPath& w) -> Cocycle::Map {
                   auto m = std::make_shared<frame::TranscriticalMap>(frame::transcritical(c, w, off, s0, s1));
                   return [m](double x) { return (*m)(x); };
                 });
}

inline Cocycle closed_form_linear(double delta, const LinearEnvelopeData& env) {
  return Cocycle("closed_form_linear", true, 0.0, [delta, env](double off, double s0, double s1, const WienerPath& w) -> Cocycle::Map {
    const auto m = frame::linear(delta, env, w, off, s0, s1);
    return [m](double y) { return FlowResult::of(m(y)); };
  });
}

inline Cocycle integrator_cocycle(const DriftSpec& drift, double step) {
  require(step > 0.0, ErrorKind::configuration, "integrator cocycle needs a positive step");
  return Cocycle("integrator_" + std::string(to_string(drift.family)), false, step,
                 [drift, step](double off, double s0, double s1, const WienerPath& w) -> Cocycle::Map {
                   return [drift, step, off, s0, s1, w](double x) { return frame::heun(drift, w, off, s0, s1, x, step); };
                 });
}

/// Outcome of a numerical identity check, serialized as {check, params, residual, verdict, tolerances}.
struct CheckReport {
  std::string check;
  std::map<std::string, double> params;
  double residual = 0.0;
  bool pass = false;
  std::map<std::string, double> tolerances;
  std::vector<std::map<std::string, double>> samples;
};

namespace detail {
inline double flow_distance(const FlowResult& a, const FlowResult& b) {
  if (!a.finite() && !b.finite()) return 0.0;
  if (!a.finite() || !b.finite()) return std::numeric_limits<double>::infinity();
  return std::abs(a.value - b.value);
}
}  // namespace detail

/// |Phi(t + s, tau, w, x) - Phi(t, tau + s, theta_s w, Phi(s, tau, w, x))|
inline CheckReport check_cocycle_law(const Cocycle& phi, const WienerPath& w, double tau, double t, double s, double x, double tol) {
  const FlowResult direct = phi(t + s, tau, w, x);
  const FlowResult first = phi(s, tau, w, x);
  FlowResult composed = first;
  if (first.finite()) composed = phi(t, tau + s, shift(w, s), first.value);
  CheckReport rep;
  rep.check = "cocycle_law";
  rep.params = {{"tau", tau}, {"t", t}, {"s", s}, {"x", x}, {"seed", static_cast<double>(w.seed())}};
  rep.residual = detail::flow_distance(direct, composed);
  rep.pass = rep.residual <= tol;
  rep.tolerances = {{"residual", tol}};
  return rep;
}

/// A quasi-solution as a map (tau, w) -> xi(tau, w).
using QuasiSolution = std::function<double(double, const WienerPath&)>;

/// max over samples (t, tau) of |Phi(t, tau, w, xi(tau, w)) - xi(tau + t, theta_t w)|.
inline CheckReport check_quasi_solution(const Cocycle& phi, const QuasiSolution& xi, const WienerPath& w,
                                        const std::vector<std::pair<double, double>>& samples, double tol) {
  CheckReport rep;
  rep.check = "quasi_solution";
  rep.params = {{"seed", static_cast<double>(w.seed())}, {"samples", static_cast<double>(samples.size())}};
  rep.tolerances = {{"residual", tol}};
  double worst = 0.0;
  for (const auto& [t, tau] : samples) {
    const double start = xi(tau, w);
    const FlowResult moved = phi(t, tau, w, start);
    const double target = xi(tau + t, shift(w, t));
    const double r = moved.finite() ? std::abs(moved.value - target) : std::numeric_limits<double>::infinity();
    rep.samples.push_back({{"t", t}, {"tau", tau}, {"xi", start}, {"residual", r}});
    worst = std::max(worst, r);
  }
  rep.residual = worst;
  rep.pass = worst <= tol;
  return rep;
}

struct PullbackLimit {
  double limit = 0.0;
  bool converged = false;
  bool blew_up = false;
  std::vector<double> schedule;
  std::vector<double> values;
  double residual = std::numeric_limits<double>::infinity();
};

/// Convergence needs the last two successive differences of the schedule values to be <= tol.
inline bool two_agreements(const std::vector<double>& v, double tol, double* residual = nullptr) {
  if (v.size() < 3) return false;
  const auto n = v.size();
  const double d1 = std::abs(v[n - 1] - v[n - 2]);
  const double d2 = std::abs(v[n - 2] - v[n - 3]);
  if (residual) *residual = d1;
  return d1 <= tol && d2 <= tol;
}

inline PullbackLimit pullback_limit(const Cocycle& phi, const WienerPath& w, double tau, double x0,
                                    const std::vector<double>& schedule, double tol) {
  require(!schedule.empty(), ErrorKind::configuration, "pullback schedule is empty");
  require(std::is_sorted(schedule.begin(), schedule.end()), ErrorKind::configuration, "pullback schedule must increase");
  PullbackLimit out;
  out.schedule = schedule;
  for (double t : schedule) {
    const FlowResult r = phi.pullback(t, tau, w, x0);
    if (!r.finite()) {
      out.blew_up = true;
      out.values.push_back(std::numeric_limits<double>::quiet_NaN());
      return out;
    }
    out.values.push_back(r.value);
  }
  out.converged = two_agreements(out.values, tol, &out.residual);
  out.limit = out.values.back();
  return out;
}

struct AttractorOptions {
  std::vector<double> schedule{5, 10, 20, 40};
  double tol = 1e-6;
  /// Slack for the monotone-sequence check; <= 0 means 10 x the scheme tolerance.
  double monotonicity_tol = 0.0;
  bool require_convergence = true;
  QuadratureSpec quadrature{};
};

struct AttractorInterval {
  double tau = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false;
  double residual = 0.0;
  std::vector<double> schedule;
  std::vector<double> upper_history;
  std::vector<double> lower_history;
  std::vector<double> start_values;
  double monotonicity_tol = 0.0;
};

/// Pullback of +-xi(tau - t, theta_{-t} w) along the schedule, where xi is the quasi-solution of
/// the dominating linear envelope. The upper sequence must not increase and the lower one must not
/// decrease (up to the monotonicity slack).
inline AttractorInterval attractor_endpoints(const Cocycle& phi, double delta, const LinearEnvelopeData& env,
                                             const WienerPath& w, double tau, const AttractorOptions& opt = {}) {
  require(!opt.schedule.empty(), ErrorKind::configuration, "attractor schedule is empty");
  AttractorInterval out;
  out.tau = tau;
  out.schedule = opt.schedule;
  double mono = opt.monotonicity_tol;
  for (double t : opt.schedule) {
    const WienerPath back = w.shifted(-t);
    const double xi = linear_xi(delta, env, back, tau - t, opt.quadrature).value;
    out.start_values.push_back(xi);
    auto map = phi.pullback_map(t, tau, w);
    const FlowResult up = map(xi);
    const FlowResult lo = map(-xi);
    if (!up.finite() || !lo.finite()) fail(ErrorKind::non_convergence, "pullback from the envelope exploded at t = " + std::to_string(t));
    out.upper_history.push_back(up.value);
    out.lower_history.push_back(lo.value);
  }
  if (mono <= 0.0) {
    double scale = 0.0;
    for (double v : out.upper_history) scale = std::max(scale, std::abs(v));
    for (double v : out.lower_history) scale = std::max(scale, std::abs(v));
    mono = 10.0 * phi.scheme_tolerance(w, scale);
  }
  out.monotonicity_tol = mono;
  for (std::size_t i = 1; i < opt.schedule.size(); ++i) {
    const double du = out.upper_history[i] - out.upper_history[i - 1];
    const double dl = out.lower_history[i - 1] - out.lower_history[i];
    if (du > mono || dl > mono)
      fail(ErrorKind::monotonicity_violation,
           "envelope pullback sequence not monotone between t = " + std::to_string(opt.schedule[i - 1]) + " and t = " +
               std::to_string(opt.schedule[i]) + " (upper step " + std::to_string(du) + ", lower step " +
               std::to_string(-dl) + ", slack " + std::to_string(mono) + ")");
  }
  double ru = 0, rl = 0;
  const bool cu = two_agreements(out.upper_history, opt.tol, &ru);
  const bool cl = two_agreements(out.lower_history, opt.tol, &rl);
  out.converged = cu && cl;
  out.residual = std::max(ru, rl);
  out.upper = out.upper_history.back();
  out.lower = out.lower_history.back();
  if (opt.require_convergence && !out.converged)
    fail(ErrorKind::non_convergence, "attractor endpoints did not settle within the schedule (last change " +
                                         std::to_string(out.residual) + ")");
  return out;
}

enum class StabilityVerdict { asymptotically_stable, lyapunov_stable_only, unstable };

inline std::string_view to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::asymptotically_stable: return "asymptotically_stable";
    case StabilityVerdict::lyapunov_stable_only: return "lyapunov_stable_only";
    case StabilityVerdict::unstable: return "unstable";
  }
  return "?";
}

enum class Domain { whole_line, positive };

struct StabilityOptions {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  int bisection_steps = 20;
  std::vector<double> schedule{5, 10, 20, 40};
  std::vector<double> initial_data{1e-6, 1e-2, 1e-1, 0.5, 1.0, 2.0};
  Domain domain = Domain::whole_line;
  double convergence_tol = 1e-6;
  double zero_tol = 1e-6;
};

struct StabilityReport {
  StabilityVerdict verdict = StabilityVerdict::unstable;
  std::vector<double> epsilons;
  std::vector<double> deltas;  ///< 0 where no admissible delta was found
  bool lyapunov = false;
  bool attracting = false;
  std::vector<double> initial_data;
  std::vector<double> limits;
  std::vector<int> converged;
  std::string note = "finite-window surrogate: orbit bounds and limits are checked on the schedule only";
};

/// Stability of the zero solution in the pullback sense. Lyapunov part: for each eps find, by
/// bisection on (0, eps], a delta whose pullback orbits from +-delta stay inside (-eps, eps) on the
/// schedule. Small data attracted to a nonzero limit count as instability. Attraction part: pullback
/// limits from the initial-data grid must converge to 0.
inline StabilityReport stability_probe(const Cocycle& phi, const WienerPath& w, double tau, const StabilityOptions& opt = {}) {
  StabilityReport rep;
  rep.epsilons = opt.epsilons;
  std::vector<Cocycle::Map> maps;
  maps.reserve(opt.schedule.size());
  for (double t : opt.schedule) maps.push_back(phi.pullback_map(t, tau, w));

  const bool both = opt.domain == Domain::whole_line;
  auto contained = [&](double d, double eps) {
    for (const auto& m : maps) {
      for (double x0 : {d, -d}) {
        if (x0 < 0 && !both) continue;
        const FlowResult r = m(x0);
        if (!r.finite() || std::abs(r.value) >= eps) return false;
      }
    }
    return true;
  };

  rep.lyapunov = true;
  for (double eps : opt.epsilons) {
    double found = 0.0;
    if (contained(eps, eps)) {
      found = eps;
    } else {
      double lo = 0.0, hi = eps;
      for (int i = 0; i < opt.bisection_steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (contained(mid, eps)) {
          found = mid;
          lo = mid;
        } else {
          hi = mid;
        }
      }
    }
    rep.deltas.push_back(found);
    if (found == 0.0) rep.lyapunov = false;
  }

  const double eps_min = *std::min_element(opt.epsilons.begin(), opt.epsilons.end());
  rep.attracting = true;
  for (double a : opt.initial_data) {
    for (double x0 : {a, -a}) {
      if (x0 < 0 && !both) continue;
      std::vector<double> vals;
      bool blew = false;
      for (const auto& m : maps) {
        const FlowResult r = m(x0);
        if (!r.finite()) {
          blew = true;
          break;
        }
        vals.push_back(r.value);
      }
      const bool conv = !blew && two_agreements(vals, opt.convergence_tol * std::max(1.0, std::abs(vals.empty() ? 0 : vals.back())));
      const double lim = blew ? std::numeric_limits<double>::quiet_NaN() : vals.back();
      rep.initial_data.push_back(x0);
      rep.limits.push_back(lim);
      rep.converged.push_back(conv ? 1 : 0);
      if (!(conv && std::abs(lim) <= opt.zero_tol)) rep.attracting = false;
      if (std::abs(x0) < eps_min && (blew || (conv && std::abs(lim) >= eps_min))) rep.lyapunov = false;
    }
  }
  if (!rep.lyapunov) rep.verdict = StabilityVerdict::unstable;
  else if (rep.attracting) rep.verdict = StabilityVerdict::asymptotically_stable;
  else rep.verdict = StabilityVerdict::lyapunov_stable_only;
  return rep;
}

struct TemperednessReport {
  double rate = 0.0;
  double threshold = 0.0;
  std::vector<double> times;
  std::vector<double> profile;
  bool pass = false;
};

/// Profile e^{c t} |xi(tau + t, theta_t w)| for t = 0, -dt, ..., window (window < 0). Passes when
/// the far quarter of the window stays below the threshold and the far end lies below the value at 0.
inline TemperednessReport temperedness_check(const std::function<double(double)>& value_at, double rate, double window,
                                             double dt = 1.0, double threshold = 1e-6) {
  require(window < 0.0 && dt > 0.0, ErrorKind::configuration, "temperedness window must be negative with dt > 0");
  TemperednessReport rep;
  rep.rate = rate;
  rep.threshold = threshold;
  const auto n = static_cast<int>(std::floor(-window / dt + 1e-9));
  for (int i = 0; i <= n; ++i) {
    const double t = -dt * i;
    rep.times.push_back(t);
    rep.profile.push_back(std::exp(rate * t) * std::abs(value_at(t)));
  }
  bool small = true;
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    if (rep.times[i] <= 0.75 * window && !(rep.profile[i] < threshold)) small = false;
  rep.pass = small && rep.profile.back() <= rep.profile.front();
  return rep;
}

}  // namespace pbl
