#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "pbl/error.hpp"

namespace pbl {

enum class BetaKind { constant, periodic, quasi_periodic, almost_automorphic, custom };
enum class GammaKind { zero, cubic_profile, quadratic_profile, custom };
enum class Variant { pitchfork, transcritical };

inline std::string_view to_string(BetaKind k) {
  switch (k) {
    case BetaKind::constant: return "constant";
    case BetaKind::periodic: return "periodic";
    case BetaKind::quasi_periodic: return "quasi_periodic";
    case BetaKind::almost_automorphic: return "almost_automorphic";
    case BetaKind::custom: return "custom";
  }
  return "?";
}

inline std::string_view to_string(GammaKind k) {
  switch (k) {
    case GammaKind::zero: return "zero";
    case GammaKind::cubic_profile: return "cubic_profile";
    case GammaKind::quadratic_profile: return "quadratic_profile";
    case GammaKind::custom: return "custom";
  }
  return "?";
}

inline std::string_view to_string(Variant v) { return v == Variant::pitchfork ? "pitchfork" : "transcritical"; }

/// Positive, bounded nonlinearity coefficient with certified bounds beta_0 <= beta(t) <= beta_1.
///
/// constant:            b
/// periodic:            a + b sin(2 pi t / T),                    a > |b|
/// quasi_periodic:      a + b sin t + c sin(sqrt2 t),             a > |b| + |c|
/// almost_automorphic:  a + b sin(1 / (2 + cos t + cos(sqrt2 t))), a > |b|
///
/// `offset` is added to every value; it backs the shifted comparison equations.
class BetaFn {
 public:
  BetaFn() : BetaFn(constant(1.0)) {}

  static BetaFn constant(double b) {
    require(b > 0.0 && std::isfinite(b), ErrorKind::configuration, "constant beta must be positive");
    return BetaFn(BetaKind::constant, b, 0, 0, 0, b, b);
  }
  static BetaFn periodic(double a, double b, double period) {
    require(period > 0.0, ErrorKind::configuration, "periodic beta needs T > 0");
    require(a > std::abs(b), ErrorKind::configuration, "periodic beta needs a > |b|");
    return BetaFn(BetaKind::periodic, a, b, 0, period, a - std::abs(b), a + std::abs(b));
  }
  static BetaFn quasi_periodic(double a, double b, double c) {
    require(a > std::abs(b) + std::abs(c), ErrorKind::configuration, "quasi-periodic beta needs a > |b| + |c|");
    return BetaFn(BetaKind::quasi_periodic, a, b, c, 0, a - std::abs(b) - std::abs(c), a + std::abs(b) + std::abs(c));
  }
  static BetaFn almost_automorphic(double a, double b) {
    require(a > std::abs(b), ErrorKind::configuration, "almost automorphic beta needs a > |b|");
    return BetaFn(BetaKind::almost_automorphic, a, b, 0, 0, a - std::abs(b), a + std::abs(b));
  }

  /// User function with asserted bounds, verified by sampling `check_points` uniformly on [check_lo, check_hi].
  static BetaFn custom(std::function<double(double)> fn, double beta_0, double beta_1, double check_lo = -100.0,
                       double check_hi = 100.0, int check_points = 20001) {
    require(static_cast<bool>(fn), ErrorKind::configuration, "custom beta needs a function");
    require(beta_0 > 0.0 && beta_1 >= beta_0, ErrorKind::configuration, "custom beta bounds must satisfy 0 < beta_0 <= beta_1");
    for (int i = 0; i < check_points; ++i) {
      const double t = check_lo + (check_hi - check_lo) * i / std::max(1, check_points - 1);
      const double v = fn(t);
      if (!(v >= beta_0 && v <= beta_1))
        fail(ErrorKind::configuration, "custom beta leaves its asserted bounds at t = " + std::to_string(t) +
                                           " (value " + std::to_string(v) + ")");
    }
    BetaFn f(BetaKind::custom, 0, 0, 0, 0, beta_0, beta_1);
    f.custom_ = std::move(fn);
    return f;
  }

  double operator()(double t) const {
    switch (kind_) {
      case BetaKind::constant: return a_ + offset_;
      case BetaKind::periodic: return a_ + b_ * std::sin(2.0 * std::numbers::pi * t / period_) + offset_;
      case BetaKind::quasi_periodic: return a_ + b_ * std::sin(t) + c_ * std::sin(std::numbers::sqrt2 * t) + offset_;
      case BetaKind::almost_automorphic:
        return a_ + b_ * std::sin(1.0 / (2.0 + std::cos(t) + std::cos(std::numbers::sqrt2 * t))) + offset_;
      case BetaKind::custom: return custom_(t) + offset_;
    }
    return 0.0;
  }

  /// beta - c with bounds moved accordingly; fails if positivity is lost.
  BetaFn minus(double c) const {
    BetaFn out = *this;
    out.offset_ -= c;
    out.lower_ -= c;
    out.upper_ -= c;
    require(out.lower_ > 0.0, ErrorKind::incompatible_coefficients, "beta - c is not bounded away from zero");
    return out;
  }

  BetaKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double period() const noexcept { return period_; }
  double offset() const noexcept { return offset_; }

 private:
  BetaFn(BetaKind kind, double a, double b, double c, double period, double lower, double upper)
      : kind_(kind), a_(a), b_(b), c_(c), period_(period), lower_(lower), upper_(upper) {}

  BetaKind kind_;
  double a_, b_, c_, period_;
  double lower_, upper_;
  double offset_ = 0.0;
  std::function<double(double)> custom_;
};

/// Time profile mean + amplitude * sin(frequency * t) used by the built-in perturbations.
struct Profile {
  double mean = 0.0;
  double amplitude = 0.0;
  double frequency = 1.0;

  double operator()(double t) const { return mean + amplitude * std::sin(frequency * t); }
  double lower() const { return mean - std::abs(amplitude); }
  double upper() const { return mean + std::abs(amplitude); }
};

/// Perturbation with band constants: c1 x^4 <= gamma x <= c2 x^4 (pitchfork) or
/// c1 x^3 <= gamma x <= c2 x^3 for x >= 0 (transcritical).
class GammaFn {
 public:
  GammaFn() = default;

  static GammaFn zero() { return GammaFn(); }

  /// c(t) x^3, pitchfork only.
  static GammaFn cubic_profile(Profile p) {
    check_profile(p);
    GammaFn g;
    g.kind_ = GammaKind::cubic_profile;
    g.variant_ = Variant::pitchfork;
    g.profile_ = p;
    g.c1_ = p.lower();
    g.c2_ = p.upper();
    return g;
  }

  /// c(t) x^2, transcritical only.
  static GammaFn quadratic_profile(Profile p) {
    check_profile(p);
    GammaFn g;
    g.kind_ = GammaKind::quadratic_profile;
    g.variant_ = Variant::transcritical;
    g.profile_ = p;
    g.c1_ = p.lower();
    g.c2_ = p.upper();
    return g;
  }

  /// User perturbation; the band is verified on a (t, x) sample grid.
  static GammaFn custom(std::function<double(double, double)> fn, double c1, double c2, Variant variant,
                        double t_lo = -50.0, double t_hi = 50.0, double x_abs = 10.0) {
    require(static_cast<bool>(fn), ErrorKind::configuration, "custom gamma needs a function");
    require(0.0 <= c1 && c1 <= c2, ErrorKind::configuration, "custom gamma band must satisfy 0 <= c1 <= c2");
    const int nt = 401, nx = 201;
    for (int i = 0; i < nt; ++i) {
      const double t = t_lo + (t_hi - t_lo) * i / (nt - 1);
      for (int j = 0; j < nx; ++j) {
        const double x = variant == Variant::pitchfork ? -x_abs + 2.0 * x_abs * j / (nx - 1) : x_abs * j / (nx - 1);
        const double gx = fn(t, x) * x;
        const double p = variant == Variant::pitchfork ? x * x * x * x : x * x * x;
        const double slack = 1e-12 * std::max(1.0, p);
        if (gx < c1 * p - slack || gx > c2 * p + slack)
          fail(ErrorKind::configuration, "custom gamma leaves its band at (t, x) = (" + std::to_string(t) + ", " +
                                             std::to_string(x) + ")");
      }
    }
    GammaFn g;
    g.kind_ = GammaKind::custom;
    g.variant_ = variant;
    g.custom_ = std::move(fn);
    g.c1_ = c1;
    g.c2_ = c2;
    return g;
  }

  double operator()(double t, double x) const {
    switch (kind_) {
      case GammaKind::zero: return 0.0;
      case GammaKind::cubic_profile: return profile_(t) * x * x * x;
      case GammaKind::quadratic_profile: return profile_(t) * x * x;
      case GammaKind::custom: return custom_(t, x);
    }
    return 0.0;
  }

  GammaKind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == GammaKind::zero; }
  /// Which equation family the band refers to; zero fits both.
  Variant variant() const noexcept { return variant_; }
  bool fits(Variant v) const noexcept { return is_zero() || variant_ == v; }
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  const Profile& profile() const noexcept { return profile_; }

 private:
  static void check_profile(const Profile& p) {
    require(std::isfinite(p.mean) && std::isfinite(p.amplitude) && std::isfinite(p.frequency), ErrorKind::configuration,
            "gamma profile parameters must be finite");
    require(p.lower() >= 0.0, ErrorKind::configuration, "gamma profile must stay nonnegative");
  }

  GammaKind kind_ = GammaKind::zero;
  Variant variant_ = Variant::pitchfork;
  Profile profile_{};
  std::function<double(double, double)> custom_;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

struct CertifiedBounds {
  double beta_0 = 0.0;
  double beta_1 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Checks c2 < beta_0 and that the perturbation belongs to the requested equation.
inline CertifiedBounds validate_pairing(const BetaFn& beta, const GammaFn& gamma, Variant variant) {
  if (!gamma.fits(variant))
    fail(ErrorKind::incompatible_coefficients, std::string(to_string(gamma.kind())) + " perturbation does not fit the " +
                                                   std::string(to_string(variant)) + " equation");
  if (!(gamma.c2() < beta.lower()))
    fail(ErrorKind::incompatible_coefficients, "perturbation band upper constant " + std::to_string(gamma.c2()) +
                                                   " must be below beta_0 = " + std::to_string(beta.lower()));
  return {beta.lower(), beta.upper(), gamma.c1(), gamma.c2()};
}

inline CertifiedBounds validate_pairing(const BetaFn& beta, const GammaFn& gamma) {
  return validate_pairing(beta, gamma, gamma.variant());
}

/// Forcing data of the dominating linear equation dy = (-nu y + |g| + h) dt + delta y o dw.
/// `forcing_lower` / `forcing_upper` bound |g(t)| + h(t) and drive the truncation certificate.
struct LinearEnvelopeData {
  double nu = 1.0;
  std::function<double(double)> g = [](double) { return 0.0; };
  std::function<double(double)> h = [](double) { return 0.0; };
  double forcing_lower = 0.0;
  double forcing_upper = 0.0;

  double forcing(double t) const { return std::abs(g(t)) + h(t); }

  static LinearEnvelopeData constant(double nu, double c) {
    require(nu > 0.0, ErrorKind::configuration, "linear envelope needs nu > 0");
    require(c >= 0.0, ErrorKind::configuration, "linear envelope forcing must be nonnegative");
    LinearEnvelopeData d;
    d.nu = nu;
    d.h = [c](double) { return c; };
    d.forcing_lower = c;
    d.forcing_upper = c;
    return d;
  }
};

/// Smallest c with |lambda + 1| |x| - (beta_0 - c2) |x|^3 / 2 <= c, times (1 + margin).
/// The maximizer of the cubic is x* = sqrt(2 |lambda + 1| / (3 (beta_0 - c2))).
inline double young_constant(double lambda, double beta_0, double c2, double margin = 0.1) {
  const double k = beta_0 - c2;
  require(k > 0.0, ErrorKind::incompatible_coefficients, "young constant needs c2 < beta_0");
  const double a = std::abs(lambda + 1.0);
  if (a == 0.0) return 0.0;
  const double x = std::sqrt(2.0 * a / (3.0 * k));
  return (1.0 + margin) * (a * x - 0.5 * k * x * x * x);
}

/// Envelope used for the attractor bounds of the general pitchfork: nu = 1, h = young constant.
inline LinearEnvelopeData pitchfork_envelope(double lambda, const CertifiedBounds& b, double margin = 0.1) {
  return LinearEnvelopeData::constant(1.0, young_constant(lambda, b.beta_0, b.c2, margin));
}

}  // namespace pbl
