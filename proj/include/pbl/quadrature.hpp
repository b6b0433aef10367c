#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "pbl/wiener.hpp"

namespace pbl {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b)
inline double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log(1 + e^z)
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double max_truncation = std::numeric_limits<double>::infinity();
};

/// log of the trapezoid sum over nodes k0..k1 (k0 <= k1) of exp(expo(k)) * weight(k), step h.
/// Returns -inf for an empty interval or a vanishing sum.
template <class Expo, class Weight>
double log_trapezoid(std::ptrdiff_t k0, std::ptrdiff_t k1, double h, Expo&& expo, Weight&& weight) {
  if (k1 <= k0) return kNegInf;
  double m = kNegInf;
  for (auto k = k0; k <= k1; ++k) m = std::max(m, expo(k));
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (auto k = k0; k <= k1; ++k) {
    const double w = (k == k0 || k == k1) ? 0.5 : 1.0;
    s += w * std::exp(expo(k) - m) * weight(k);
  }
  if (!(s > 0.0)) return kNegInf;
  return m + std::log(s * h);
}

/// Running trapezoid in log space along increasing k, for cumulative integrals.
class LogAccumulator {
 public:
  void add(double expo, double weight) {
    if (have_prev_) add_scaled(prev_expo_, 0.5 * prev_weight_), add_scaled(expo, 0.5 * weight);
    prev_expo_ = expo;
    prev_weight_ = weight;
    have_prev_ = true;
  }
  /// log of the trapezoid integral so far (step applied).
  double log_value(double h) const { return s_ > 0.0 ? m_ + std::log(s_ * h) : kNegInf; }

 private:
  void add_scaled(double e, double w) {
    if (!(w > 0.0)) return;
    if (e > m_) {
      s_ = s_ * std::exp(m_ - e) + w;
      m_ = e;
    } else {
      s_ += w * std::exp(e - m_);
    }
  }
  double m_ = kNegInf;
  double s_ = 0.0;
  double prev_expo_ = 0.0;
  double prev_weight_ = 0.0;
  bool have_prev_ = false;
};

/// Improper integral over one half-line of exp(-decay |r| + noise w(r)) f(r) with a certified
/// truncation point R. With eps = sup |w(r)/r| over |r| >= R (measured on the path), the tail is
/// bounded by f_upper exp(-(decay - |noise| eps) R) / (decay - |noise| eps). R is accepted once that
/// bound is below rel_tol times the partial integral; eps is only trusted on a tail window at least
/// as long as R itself.
class ExponentialKernel {
 public:
  template <class CertWeight>
  ExponentialKernel(const WienerPath& path, Side side, double decay, double noise, double f_upper,
                    CertWeight&& cert_weight, const QuadratureSpec& spec = {})
      : side_(side), step_(path.step()), sign_(side == Side::negative ? -1 : 1) {
    require(decay > 0.0, ErrorKind::domain, "exponential weight must decay");
    require(f_upper >= 0.0, ErrorKind::configuration, "integrand bound must be nonnegative");
    const auto& g = path.grid();
    const std::size_t avail = side == Side::negative ? g.n_neg() : g.n_pos();
    const double an = std::abs(noise);
    // Ladder of candidate truncation lengths (node counts).
    const std::size_t usable = an > 0.0 ? avail / 2 : avail;
    std::size_t cap = usable;
    if (std::isfinite(spec.max_truncation)) cap = std::min(cap, static_cast<std::size_t>(spec.max_truncation / step_));
    std::vector<std::size_t> ladder;
    for (double r = std::max(1.0, 16.0 * step_);; r *= std::numbers::sqrt2) {
      const auto d = static_cast<std::size_t>(std::ceil(r / step_ - 1e-9));
      if (d >= cap) break;
      ladder.push_back(d);
    }
    if (cap >= 2) ladder.push_back(cap);
    if (ladder.empty())
      fail(ErrorKind::insufficient_support, "path too short for the improper integral", 4.0 * std::max(1.0, avail * step_));
    const auto eps = an > 0.0 ? tail_growth(path, side, ladder) : std::vector<double>(ladder.size(), 0.0);

    auto expo = [&](std::size_t j) {
      const auto k = static_cast<std::ptrdiff_t>(j) * sign_;
      return -decay * static_cast<double>(j) * step_ + noise * path.node(k);
    };
    LogAccumulator acc;
    std::size_t j = 0, li = 0;
    double last_rate = 0, last_logtail = 0, last_target = 0;
    bool ok = false;
    for (; li < ladder.size(); ++li) {
      for (; j <= ladder[li]; ++j) acc.add(expo(j), cert_weight(static_cast<double>(sign_) * static_cast<double>(j) * step_));
      const double R = static_cast<double>(ladder[li]) * step_;
      const double rate = decay - an * eps[li];
      last_rate = rate;
      if (!(rate > 0.0)) continue;
      const double logtail = f_upper > 0.0 ? std::log(f_upper / rate) - rate * R : kNegInf;
      const double target = std::log(spec.rel_tol) + acc.log_value(step_);
      last_logtail = logtail;
      last_target = target;
      if (logtail <= target) {
        ok = true;
        nodes_ = ladder[li];
        epsilon_ = eps[li];
        log_tail_ = logtail;
        break;
      }
    }
    if (!ok) {
      const double R = static_cast<double>(ladder.back()) * step_;
      double need = 3.0 * static_cast<double>(avail) * step_;
      if (last_rate > 0.0) need = std::max(1.5 * static_cast<double>(avail) * step_, 2.5 * (R + (last_logtail - last_target) / last_rate));
      const double have = static_cast<double>(avail) * step_;
      fail(ErrorKind::insufficient_support,
           "no certified truncation within " + std::to_string(have) + " time units (tried R up to " + std::to_string(R) +
               ", decay " + std::to_string(decay) + ", noise " + std::to_string(noise) + ")",
           need);
    }
    // Cache the normalized exponential weights on [0, R].
    double m = kNegInf;
    for (std::size_t i = 0; i <= nodes_; ++i) m = std::max(m, expo(i));
    log_scale_ = m;
    weights_.resize(nodes_ + 1);
    for (std::size_t i = 0; i <= nodes_; ++i) {
      const double w = (i == 0 || i == nodes_) ? 0.5 : 1.0;
      weights_[i] = w * std::exp(expo(i) - m);
    }
  }

  ExponentialKernel(const WienerPath& path, Side side, double decay, double noise, double f_lower, double f_upper,
                    const QuadratureSpec& spec = {})
      : ExponentialKernel(path, side, decay, noise, f_upper, [f_lower](double) { return f_lower; }, spec) {
    require(f_lower > 0.0, ErrorKind::configuration, "certification needs a positive lower bound");
  }

  /// log of the truncated integral with integrand factor f(r), r the signed time.
  template <class F>
  double log_integral(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
      s += weights_[i] * f(static_cast<double>(sign_) * static_cast<double>(i) * step_);
    return s > 0.0 ? log_scale_ + std::log(s * step_) : kNegInf;
  }

  double truncation() const noexcept { return static_cast<double>(nodes_) * step_; }
  double epsilon() const noexcept { return epsilon_; }
  double log_tail_bound() const noexcept { return log_tail_; }
  double relative_tail(double log_value) const { return std::exp(log_tail_ - log_value); }
  Side side() const noexcept { return side_; }

 private:
  Side side_;
  double step_;
  std::ptrdiff_t sign_;
  std::size_t nodes_ = 0;
  double epsilon_ = 0.0;
  double log_tail_ = kNegInf;
  double log_scale_ = 0.0;
  std::vector<double> weights_;
};

/// Time after which exp(-(decay - |noise| eps) t) falls below rel_tol, using the path's own
/// tail growth on the given side; used to scale pullback schedules.
inline double decay_horizon(const WienerPath& path, Side side, double decay, double noise, double rel_tol) {
  require(decay > 0.0, ErrorKind::domain, "horizon needs a positive decay rate");
  const auto& g = path.grid();
  const std::size_t avail = side == Side::negative ? g.n_neg() : g.n_pos();
  const double an = std::abs(noise);
  const std::size_t cap = an > 0.0 ? avail / 2 : avail;
  std::vector<std::size_t> ladder;
  for (double r = 1.0;; r *= std::numbers::sqrt2) {
    const auto d = static_cast<std::size_t>(std::ceil(r / g.step() - 1e-9));
    if (d >= cap) break;
    ladder.push_back(d);
  }
  if (cap >= 1) ladder.push_back(cap);
  const auto eps = an > 0.0 ? tail_growth(path, side, ladder) : std::vector<double>(ladder.size(), 0.0);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const double R = static_cast<double>(ladder[i]) * g.step();
    const double rate = decay - an * eps[i];
    if (rate > 0.0 && -rate * R <= std::log(rel_tol)) return R;
  }
  fail(ErrorKind::insufficient_support, "path too short to resolve the decay horizon", 3.0 * static_cast<double>(avail) * g.step());
}

}  // namespace pbl
