#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "pbl/closed_form.hpp"

namespace pbl {

enum class DriftFamily { pitchfork, transcritical, linear_envelope, custom };

inline std::string_view to_string(DriftFamily f) {
  switch (f) {
    case DriftFamily::pitchfork: return "pitchfork";
    case DriftFamily::transcritical: return "transcritical";
    case DriftFamily::linear_envelope: return "linear_envelope";
    case DriftFamily::custom: return "custom";
  }
  return "?";
}

/// Drift a(t, x) of dx = a(t, x) dt + delta x o dw.
struct DriftSpec {
  DriftFamily family = DriftFamily::custom;
  double lambda = 0.0;
  double delta = 0.0;
  BetaFn beta;
  GammaFn gamma;
  LinearEnvelopeData envelope;
  std::function<double(double, double)> custom;

  static DriftSpec pitchfork(const Coefficients& c, const GammaFn& gamma = GammaFn::zero()) {
    validate_pairing(c.beta, gamma, Variant::pitchfork);
    return {DriftFamily::pitchfork, c.lambda, c.delta, c.beta, gamma, {}, {}};
  }
  static DriftSpec transcritical(const Coefficients& c, const GammaFn& gamma = GammaFn::zero()) {
    validate_pairing(c.beta, gamma, Variant::transcritical);
    return {DriftFamily::transcritical, c.lambda, c.delta, c.beta, gamma, {}, {}};
  }
  static DriftSpec linear(double delta, const LinearEnvelopeData& env) {
    return {DriftFamily::linear_envelope, 0.0, delta, BetaFn{}, GammaFn{}, env, {}};
  }
  static DriftSpec from_function(double delta, std::function<double(double, double)> fn) {
    require(static_cast<bool>(fn), ErrorKind::configuration, "custom drift needs a function");
    return {DriftFamily::custom, 0.0, delta, BetaFn{}, GammaFn{}, {}, std::move(fn)};
  }

  Coefficients coefficients() const { return {lambda, delta, beta}; }

  double operator()(double t, double x) const {
    switch (family) {
      case DriftFamily::pitchfork: return lambda * x - beta(t) * x * x * x + gamma(t, x);
      case DriftFamily::transcritical: return lambda * x - beta(t) * x * x + gamma(t, x);
      case DriftFamily::linear_envelope: return -envelope.nu * x + envelope.forcing(t);
      case DriftFamily::custom: return custom(t, x);
    }
    return 0.0;
  }
};

inline constexpr double kBlowUpThreshold = 1e12;

enum class TrajectoryStatus { complete, blew_up };

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  TrajectoryStatus status = TrajectoryStatus::complete;
  double blow_up_time = std::numeric_limits<double>::quiet_NaN();

  bool blew_up() const noexcept { return status == TrajectoryStatus::blew_up; }
  double final_state() const { return states.back(); }
};

namespace frame {

/// Stratonovich-Heun over path time s0 -> s1 (either direction), coefficients at s + offset.
/// `step` must be an integer multiple or an integer fraction of the path step; in the latter case
/// the path increment is split evenly over the substeps.
inline FlowResult heun(const DriftSpec& a, const WienerPath& w, double offset, double s0, double s1, double x, double step,
                       Trajectory* record = nullptr) {
  require(std::isfinite(step) && step > 0.0, ErrorKind::configuration, "integrator step must be positive");
  const auto& g = w.grid();
  const double ratio = step / g.step();
  std::ptrdiff_t stride = 1, sub = 1;
  if (ratio >= 1.0) {
    stride = static_cast<std::ptrdiff_t>(std::llround(ratio));
    require(std::abs(ratio - static_cast<double>(stride)) <= 1e-9 * ratio, ErrorKind::alignment,
            "integrator step must be a multiple or a divisor of the path step");
  } else {
    sub = static_cast<std::ptrdiff_t>(std::llround(1.0 / ratio));
    require(std::abs(1.0 / ratio - static_cast<double>(sub)) <= 1e-9 / ratio, ErrorKind::alignment,
            "integrator step must be a multiple or a divisor of the path step");
  }
  const auto k0 = g.index(s0);
  const auto k1 = g.index(s1);
  const std::ptrdiff_t dir = k1 >= k0 ? 1 : -1;
  require((k1 - k0) % stride == 0, ErrorKind::alignment, "integration interval is not a whole number of steps");
  if (!g.contains_index(k0) || !g.contains_index(k1))
    fail(ErrorKind::insufficient_support,
         "integration interval [" + std::to_string(std::min(s0, s1)) + ", " + std::to_string(std::max(s0, s1)) +
             "] is outside the path support",
         std::max(std::abs(s0), std::abs(s1)) * 1.5);

  const double hp = g.step();
  const double h = static_cast<double>(dir) * step;
  auto push = [&](double s, double v) {
    if (record) {
      record->times.push_back(s + offset);
      record->states.push_back(v);
    }
  };
  push(g.time(k0), x);
  const auto n_outer = (k1 - k0) / (dir * stride);
  for (std::ptrdiff_t i = 0; i < n_outer; ++i) {
    const auto ka = k0 + dir * stride * i;
    const auto kb = ka + dir * stride;
    const double dw_outer = w.node(kb) - w.node(ka);
    const double dw = dw_outer / static_cast<double>(sub);
    for (std::ptrdiff_t j = 0; j < sub; ++j) {
      const double s = static_cast<double>(ka) * hp + static_cast<double>(j) * h;
      const double t = s + offset;
      const double a0 = a(t, x);
      const double xp = x + a0 * h + a.delta * x * dw;
      const double a1 = a(t + h, xp);
      const double xn = x + 0.5 * (a0 + a1) * h + 0.5 * a.delta * (x + xp) * dw;
      if (!std::isfinite(xn) || std::abs(xn) > kBlowUpThreshold) {
        const double lo = t, hi = t + h;
        if (record) {
          record->status = TrajectoryStatus::blew_up;
          record->blow_up_time = hi;
        }
        return FlowResult::exploded(std::min(lo, hi), std::max(lo, hi));
      }
      if (a.family == DriftFamily::pitchfork && x != 0.0 && (xn > 0.0) != (x > 0.0))
        fail(ErrorKind::invariant_violation, "pitchfork step changed the sign of the state at t = " + std::to_string(t) +
                                                 "; reduce the step");
      x = xn;
    }
    push(static_cast<double>(kb) * hp, x);
  }
  return FlowResult::of(x);
}

}  // namespace frame

/// Forward trajectory from (tau, x_tau) to t_end >= tau driven by w itself.
inline Trajectory integrate(const DriftSpec& a, const WienerPath& w, double tau, double t_end, double x_tau, double step) {
  require(t_end >= tau, ErrorKind::domain, "integrate runs forward in time");
  Trajectory tr;
  frame::heun(a, w, 0.0, tau, t_end, x_tau, step, &tr);
  return tr;
}

/// x(tau, tau - t, theta_{-tau} w, x0).
inline FlowResult pullback_state(const DriftSpec& a, const WienerPath& w, double tau, double t, double x0, double step) {
  require(t >= 0.0, ErrorKind::domain, "pullback time must be nonnegative");
  return frame::heun(a, w, tau, -t, 0.0, x0, step);
}

/// Backward-in-time pullback x(tau, tau + t, theta_{-tau} w, x0): started at tau + t, solved down to tau.
inline FlowResult backward_state(const DriftSpec& a, const WienerPath& w, double tau, double t, double x0, double step) {
  require(t >= 0.0, ErrorKind::domain, "backward time must be nonnegative");
  return frame::heun(a, w, tau, t, 0.0, x0, step);
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x\n";
  char buf[64];
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", tr.times[i], tr.states[i]);
    os << buf;
  }
}

}  // namespace pbl
