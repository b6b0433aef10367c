#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "pbl/coefficients.hpp"
#include "pbl/quadrature.hpp"
#include "pbl/wiener.hpp"

namespace pbl {

/// Equation data shared by the closed forms and the integrator: growth rate, noise intensity, beta.
struct Coefficients {
  double lambda = 0.0;
  double delta = 0.0;
  BetaFn beta;
};

/// Finite-time explosion, bracketed by the last finite node and the first node past the pole.
struct BlowUp {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// State at the end of an evolution, or the blow-up bracket if the solution exploded first.
struct FlowResult {
  double value = 0.0;
  std::optional<BlowUp> blow_up;

  bool finite() const noexcept { return !blow_up.has_value(); }
  static FlowResult of(double v) { return {v, std::nullopt}; }
  static FlowResult exploded(double lo, double hi) { return {std::numeric_limits<double>::quiet_NaN(), BlowUp{lo, hi}}; }
};

/// Evolutions on a frame: path time s runs from s0 to s1 >= s0 over path nodes, coefficients
/// are evaluated at s + offset. The forward cocycle uses (offset tau, 0, t); the pullback
/// x(tau, tau - t, theta_{-tau} w, .) uses (offset tau, -t, 0).
namespace frame {

inline std::pair<std::ptrdiff_t, std::ptrdiff_t> nodes(const WienerPath& w, double s0, double s1) {
  const auto& g = w.grid();
  const auto k0 = g.index(s0);
  const auto k1 = g.index(s1);
  require(k1 >= k0, ErrorKind::domain, "closed-form evolution needs s1 >= s0");
  if (!g.contains_index(k0) || !g.contains_index(k1))
    fail(ErrorKind::insufficient_support,
         "interval [" + std::to_string(s0) + ", " + std::to_string(s1) + "] is outside the path support",
         std::max(-s0, s1) * 1.5);
  return {k0, k1};
}

/// Pitchfork: x(s1) = x0 e^l / sqrt(1 + 2 x0^2 J) with
/// l = lambda (s1 - s0) + delta (w1 - w0), J = int e^{2 lambda (r - s0) + 2 delta (w(r) - w0)} beta.
struct PitchforkMap {
  double ell = 0.0;
  double log_j = kNegInf;

  double operator()(double x0) const {
    if (x0 == 0.0) return 0.0;
    const double z = std::log(2.0) + 2.0 * std::log(std::abs(x0)) + log_j;
    return x0 * std::exp(ell - 0.5 * softplus(z));
  }
};

inline PitchforkMap pitchfork(const Coefficients& c, const WienerPath& w, double offset, double s0, double s1) {
  const auto [k0, k1] = nodes(w, s0, s1);
  const double h = w.step();
  const double w0 = w.node(k0);
  PitchforkMap m;
  m.ell = c.lambda * (w.grid().time(k1) - w.grid().time(k0)) + c.delta * (w.node(k1) - w0);
  m.log_j = log_trapezoid(
      k0, k1, h,
      [&](std::ptrdiff_t k) { return 2.0 * c.lambda * static_cast<double>(k - k0) * h + 2.0 * c.delta * (w.node(k) - w0); },
      [&](std::ptrdiff_t k) { return c.beta(static_cast<double>(k) * h + offset); });
  return m;
}

/// Transcritical: x(s1) = x0 e^l / (1 + x0 K), K = int e^{lambda (r - s0) + delta (w(r) - w0)} beta.
/// Negative data explode when 1 + x0 K(s) reaches 0; K is increasing so the check uses K(s1).
struct TranscriticalMap {
  double ell = 0.0;
  double log_k = kNegInf;
  Coefficients coeff;
  WienerPath path;
  double offset = 0.0;
  std::ptrdiff_t k0 = 0;
  std::ptrdiff_t k1 = 0;

  FlowResult operator()(double x0) const {
    if (x0 == 0.0) return FlowResult::of(0.0);
    const double z = std::log(std::abs(x0)) + log_k;
    if (x0 > 0.0) return FlowResult::of(x0 * std::exp(ell - softplus(z)));
    if (z < 0.0) return FlowResult::of(x0 * std::exp(ell - std::log1p(-std::exp(z))));
    return locate(x0);
  }

 private:
  FlowResult locate(double x0) const {
    const double h = path.step();
    const double w0 = path.node(k0);
    const double target = -std::log(-x0);
    LogAccumulator acc;
    for (auto k = k0; k <= k1; ++k) {
      acc.add(coeff.lambda * static_cast<double>(k - k0) * h + coeff.delta * (path.node(k) - w0),
              coeff.beta(static_cast<double>(k) * h + offset));
      if (k > k0 && acc.log_value(h) >= target)
        return FlowResult::exploded(static_cast<double>(k - 1) * h + offset, static_cast<double>(k) * h + offset);
    }
    return FlowResult::exploded(static_cast<double>(k1 - 1) * h + offset, static_cast<double>(k1) * h + offset);
  }
};

inline TranscriticalMap transcritical(const Coefficients& c, const WienerPath& w, double offset, double s0, double s1) {
  const auto [k0, k1] = nodes(w, s0, s1);
  const double h = w.step();
  const double w0 = w.node(k0);
  TranscriticalMap m;
  m.ell = c.lambda * (w.grid().time(k1) - w.grid().time(k0)) + c.delta * (w.node(k1) - w0);
  m.log_k = log_trapezoid(
      k0, k1, h,
      [&](std::ptrdiff_t k) { return c.lambda * static_cast<double>(k - k0) * h + c.delta * (w.node(k) - w0); },
      [&](std::ptrdiff_t k) { return c.beta(static_cast<double>(k) * h + offset); });
  m.coeff = c;
  m.path = w;
  m.offset = offset;
  m.k0 = k0;
  m.k1 = k1;
  return m;
}

/// Linear envelope: y(s1) = e^m y0 + e^m K, m = -nu (s1 - s0) + delta (w1 - w0),
/// K = int e^{nu (r - s0) - delta (w(r) - w0)} (|g| + h).
struct LinearMap {
  double m = 0.0;
  double log_k = kNegInf;

  double operator()(double y0) const {
    const double forced = log_k == kNegInf ? 0.0 : std::exp(m + log_k);
    return std::exp(m) * y0 + forced;
  }
};

inline LinearMap linear(double delta, const LinearEnvelopeData& env, const WienerPath& w, double offset, double s0, double s1) {
  const auto [k0, k1] = nodes(w, s0, s1);
  const double h = w.step();
  const double w0 = w.node(k0);
  LinearMap out;
  out.m = -env.nu * (w.grid().time(k1) - w.grid().time(k0)) + delta * (w.node(k1) - w0);
  out.log_k = log_trapezoid(
      k0, k1, h,
      [&](std::ptrdiff_t k) { return env.nu * static_cast<double>(k - k0) * h - delta * (w.node(k) - w0); },
      [&](std::ptrdiff_t k) { return env.forcing(static_cast<double>(k) * h + offset); });
  return out;
}

}  // namespace frame

/// Pitchfork solution x(t, tau, w, x_tau) for t >= tau, both nodes of the path grid.
inline double exact_pitchfork(const Coefficients& c, const WienerPath& w, double tau, double t, double x_tau) {
  return frame::pitchfork(c, w, 0.0, tau, t)(x_tau);
}

/// x(tau, tau - t, theta_{-tau} w, x0): started at tau - t and observed at tau.
inline double exact_pullback_pitchfork(const Coefficients& c, const WienerPath& w, double tau, double t, double x0) {
  require(t >= 0.0, ErrorKind::domain, "pullback time must be nonnegative");
  return frame::pitchfork(c, w, tau, -t, 0.0)(x0);
}

inline FlowResult exact_transcritical(const Coefficients& c, const WienerPath& w, double tau, double t, double x_tau) {
  return frame::transcritical(c, w, 0.0, tau, t)(x_tau);
}

inline FlowResult exact_pullback_transcritical(const Coefficients& c, const WienerPath& w, double tau, double t, double x0) {
  require(t >= 0.0, ErrorKind::domain, "pullback time must be nonnegative");
  return frame::transcritical(c, w, tau, -t, 0.0)(x0);
}

inline double linear_solution(double delta, const LinearEnvelopeData& env, const WienerPath& w, double tau, double t, double y_tau) {
  return frame::linear(delta, env, w, 0.0, tau, t)(y_tau);
}

struct QuasiValue {
  double value = 0.0;
  double truncation = 0.0;  ///< R, the integral runs over [-R, 0] or [0, R]
  double tail_bound = 0.0;  ///< certified tail relative to the partial integral
  double epsilon = 0.0;     ///< tail growth of the path used in the certificate
};

struct QuasiPair {
  double plus = 0.0;
  double minus = 0.0;
  double truncation = 0.0;
  double tail_bound = 0.0;
  double epsilon = 0.0;
};

/// Nontrivial pitchfork branches +-(2 int_{-inf}^0 e^{2 lambda r + 2 delta w(r)} beta(r + tau) dr)^{-1/2}
/// for one path, reusable across tau.
class PitchforkBranches {
 public:
  PitchforkBranches(const Coefficients& c, const WienerPath& w, const QuadratureSpec& spec = {})
      : beta_(c.beta), kernel_(make_kernel(c, w, spec)) {}

  QuasiPair operator()(double tau) const {
    const double log_i = kernel_.log_integral([&](double r) { return beta_(r + tau); });
    const double plus = std::exp(-0.5 * (std::log(2.0) + log_i));
    return {plus, -plus, kernel_.truncation(), kernel_.relative_tail(log_i), kernel_.epsilon()};
  }

  const ExponentialKernel& kernel() const noexcept { return kernel_; }

 private:
  static ExponentialKernel make_kernel(const Coefficients& c, const WienerPath& w, const QuadratureSpec& spec) {
    require(c.lambda > 0.0, ErrorKind::domain, "nontrivial pitchfork branches need lambda > 0");
    return ExponentialKernel(w, Side::negative, 2.0 * c.lambda, 2.0 * c.delta, c.beta.lower(), c.beta.upper(), spec);
  }
  BetaFn beta_;
  ExponentialKernel kernel_;
};

inline QuasiPair quasi_pitchfork(const Coefficients& c, const WienerPath& w, double tau, const QuadratureSpec& spec = {}) {
  return PitchforkBranches(c, w, spec)(tau);
}

/// Nontrivial transcritical branch: (int_{-inf}^0 e^{lambda r + delta w} beta(r + tau))^{-1} for lambda > 0,
/// -(int_0^inf e^{lambda r + delta w} beta(r + tau))^{-1} for lambda < 0.
class TranscriticalBranch {
 public:
  TranscriticalBranch(const Coefficients& c, const WienerPath& w, const QuadratureSpec& spec = {})
      : beta_(c.beta), sign_(c.lambda > 0 ? 1.0 : -1.0), kernel_(make_kernel(c, w, spec)) {}

  QuasiValue operator()(double tau) const {
    const double log_i = kernel_.log_integral([&](double r) { return beta_(r + tau); });
    return {sign_ * std::exp(-log_i), kernel_.truncation(), kernel_.relative_tail(log_i), kernel_.epsilon()};
  }

 private:
  static ExponentialKernel make_kernel(const Coefficients& c, const WienerPath& w, const QuadratureSpec& spec) {
    require(c.lambda != 0.0, ErrorKind::domain, "transcritical branch is degenerate at lambda = 0");
    const Side side = c.lambda > 0 ? Side::negative : Side::positive;
    return ExponentialKernel(w, side, std::abs(c.lambda), c.delta, c.beta.lower(), c.beta.upper(), spec);
  }
  BetaFn beta_;
  double sign_;
  ExponentialKernel kernel_;
};

inline QuasiValue quasi_transcritical(const Coefficients& c, const WienerPath& w, double tau, const QuadratureSpec& spec = {}) {
  return TranscriticalBranch(c, w, spec)(tau);
}

/// xi(tau, w) = int_{-inf}^0 e^{nu s - delta w(s)} (|g(s + tau)| + h(s + tau)) ds.
inline QuasiValue linear_xi(double delta, const LinearEnvelopeData& env, const WienerPath& w, double tau,
                            const QuadratureSpec& spec = {}) {
  require(env.nu > 0.0, ErrorKind::domain, "linear envelope needs nu > 0");
  if (env.forcing_upper == 0.0) return {};
  auto forcing = [&](double r) { return env.forcing(r + tau); };
  const ExponentialKernel kernel =
      env.forcing_lower > 0.0
          ? ExponentialKernel(w, Side::negative, env.nu, -delta, env.forcing_lower, env.forcing_upper, spec)
          : ExponentialKernel(w, Side::negative, env.nu, -delta, env.forcing_upper, forcing, spec);
  const double log_i = kernel.log_integral(forcing);
  if (log_i == kNegInf) return {0.0, kernel.truncation(), 0.0, kernel.epsilon()};
  return {std::exp(log_i), kernel.truncation(), kernel.relative_tail(log_i), kernel.epsilon()};
}

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
  double truncation = 0.0;
};

/// (2 (beta_1 - c1) I)^{-1/2} <= |x^+-| <= (2 (beta_0 - c2) I)^{-1/2}, I = int_{-inf}^0 e^{2 lambda r + 2 delta w(r)} dr.
inline SandwichBounds sandwich_bounds(double lambda, double delta, const CertifiedBounds& b, const WienerPath& w,
                                      const QuadratureSpec& spec = {}) {
  require(lambda > 0.0, ErrorKind::domain, "sandwich bounds need lambda > 0");
  require(b.c2 < b.beta_0, ErrorKind::incompatible_coefficients, "sandwich bounds need c2 < beta_0");
  const ExponentialKernel kernel(w, Side::negative, 2.0 * lambda, 2.0 * delta, 1.0, 1.0, spec);
  const double log_i = kernel.log_integral([](double) { return 1.0; });
  const double lo = std::exp(-0.5 * (std::log(2.0 * (b.beta_1 - b.c1)) + log_i));
  const double hi = std::exp(-0.5 * (std::log(2.0 * (b.beta_0 - b.c2)) + log_i));
  return {lo, hi, kernel.truncation()};
}

}  // namespace pbl
