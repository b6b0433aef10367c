#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pbl/error.hpp"

namespace pbl {

/// Uniform grid of nodes k*step for k in [-n_neg, n_pos]; the origin is always a node.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double step, std::size_t n_neg, std::size_t n_pos) : step_(step), n_neg_(n_neg), n_pos_(n_pos) {
    require(std::isfinite(step) && step > 0.0, ErrorKind::configuration, "grid step must be positive");
  }

  /// Builds the grid on [t_min, t_max]; both endpoints must be integer multiples of `step`.
  static TimeGrid from_bounds(double t_min, double t_max, double step) {
    require(std::isfinite(step) && step > 0.0, ErrorKind::configuration, "grid step must be positive");
    require(t_min < 0.0 && t_max > 0.0, ErrorKind::configuration, "grid must satisfy t_min < 0 < t_max");
    const auto n_neg = nodes_for(-t_min, step);
    const auto n_pos = nodes_for(t_max, step);
    return TimeGrid(step, n_neg, n_pos);
  }

  double step() const noexcept { return step_; }
  std::size_t n_neg() const noexcept { return n_neg_; }
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t size() const noexcept { return n_neg_ + n_pos_ + 1; }
  std::ptrdiff_t k_min() const noexcept { return -static_cast<std::ptrdiff_t>(n_neg_); }
  std::ptrdiff_t k_max() const noexcept { return static_cast<std::ptrdiff_t>(n_pos_); }
  double t_min() const noexcept { return static_cast<double>(k_min()) * step_; }
  double t_max() const noexcept { return static_cast<double>(k_max()) * step_; }
  double time(std::ptrdiff_t k) const noexcept { return static_cast<double>(k) * step_; }
  bool contains_index(std::ptrdiff_t k) const noexcept { return k >= k_min() && k <= k_max(); }

  /// Nearest node index if `t` is a node (up to rounding), otherwise nullopt.
  std::optional<std::ptrdiff_t> try_index(double t) const noexcept {
    const double q = t / step_;
    const double r = std::nearbyint(q);
    if (std::abs(q - r) > 1e-6) return std::nullopt;
    return static_cast<std::ptrdiff_t>(r);
  }

  std::ptrdiff_t index(double t) const {
    auto k = try_index(t);
    if (!k) fail(ErrorKind::alignment, "time " + std::to_string(t) + " is not a multiple of step " + std::to_string(step_));
    return *k;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  static std::size_t nodes_for(double extent, double step) {
    const double q = extent / step;
    const double r = std::nearbyint(q);
    require(std::abs(q - r) <= 1e-6 * std::max(1.0, q), ErrorKind::alignment,
            "grid bound " + std::to_string(extent) + " is not a multiple of step " + std::to_string(step));
    return static_cast<std::size_t>(r);
  }

  double step_ = 1.0;
  std::size_t n_neg_ = 0;
  std::size_t n_pos_ = 0;
};

/// Immutable piecewise-linear two-sided path with value 0 at the origin.
/// Storage is shared: shifting re-anchors the same samples without copying.
class WienerPath {
 public:
  WienerPath() = default;

  /// `values` are node values on `grid`, ordered from t_min to t_max.
  WienerPath(TimeGrid grid, std::vector<double> values, std::uint64_t seed = 0)
      : grid_(grid), seed_(seed) {
    require(values.size() == grid.size(), ErrorKind::configuration, "path values do not match the grid");
    const auto origin = static_cast<std::ptrdiff_t>(grid.n_neg());
    require(values[static_cast<std::size_t>(origin)] == 0.0, ErrorKind::configuration, "path must vanish at t = 0");
    storage_ = std::make_shared<const std::vector<double>>(std::move(values));
    origin_ = origin;
    base_ = 0.0;
    data_ = storage_->data() + origin_;
  }

  const TimeGrid& grid() const noexcept { return grid_; }
  double step() const noexcept { return grid_.step(); }
  double t_min() const noexcept { return grid_.t_min(); }
  double t_max() const noexcept { return grid_.t_max(); }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Accumulated shift relative to the sampled path.
  double origin_shift() const noexcept { return origin_shift_; }

  /// Node value at signed index k (unchecked).
  double node(std::ptrdiff_t k) const noexcept {
    return data_[k] - base_;
  }

  double at(std::ptrdiff_t k) const {
    if (!grid_.contains_index(k)) fail(ErrorKind::out_of_support, "node index " + std::to_string(k) + " outside path support");
    return node(k);
  }

  /// Linear interpolation between nodes.
  double eval(double t) const {
    const double q = t / step();
    if (!(q >= static_cast<double>(grid_.k_min()) - 1e-9 && q <= static_cast<double>(grid_.k_max()) + 1e-9))
      fail(ErrorKind::out_of_support, "time " + std::to_string(t) + " outside path support");
    const double r = std::nearbyint(q);
    if (std::abs(q - r) <= 1e-9) return node(static_cast<std::ptrdiff_t>(r));
    auto k = static_cast<std::ptrdiff_t>(std::floor(q));
    k = std::clamp(k, grid_.k_min(), grid_.k_max() - 1);
    const double w = q - static_cast<double>(k);
    return (1.0 - w) * node(k) + w * node(k + 1);
  }

  /// Node values from t_min to t_max.
  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(grid_.size());
    for (auto k = grid_.k_min(); k <= grid_.k_max(); ++k) out.push_back(node(k));
    return out;
  }

  /// theta_t: r -> w(r + t) - w(t), for a node-aligned t inside the support.
  WienerPath shifted(double t) const {
    const auto m = grid_.index(t);
    if (!grid_.contains_index(m))
      fail(ErrorKind::insufficient_support, "shift " + std::to_string(t) + " leaves the path support", std::abs(t));
    WienerPath out = *this;
    out.origin_ = origin_ + m;
    out.base_ = (*storage_)[static_cast<std::size_t>(origin_ + m)];
    out.data_ = storage_->data() + out.origin_;
    const auto n_neg = static_cast<std::ptrdiff_t>(grid_.n_neg()) + m;
    const auto n_pos = static_cast<std::ptrdiff_t>(grid_.n_pos()) - m;
    out.grid_ = TimeGrid(step(), static_cast<std::size_t>(n_neg), static_cast<std::size_t>(n_pos));
    out.origin_shift_ = origin_shift_ + grid_.time(m);
    return out;
  }

 private:
  TimeGrid grid_;
  std::shared_ptr<const std::vector<double>> storage_ = std::make_shared<const std::vector<double>>(1, 0.0);
  std::ptrdiff_t origin_ = 0;
  const double* data_ = storage_->data();
  double base_ = 0.0;
  std::uint64_t seed_ = 0;
  double origin_shift_ = 0.0;
};

/// Shift with an optional window [lo, hi] that the shifted path must cover.
inline WienerPath shift(const WienerPath& path, double t, std::optional<std::pair<double, double>> window = std::nullopt) {
  WienerPath out = path.shifted(t);
  if (window) {
    const auto [lo, hi] = *window;
    if (lo < out.t_min() - 1e-9 * out.step() || hi > out.t_max() + 1e-9 * out.step()) {
      const double need = std::max(out.t_min() - lo, hi - out.t_max());
      fail(ErrorKind::insufficient_support,
           "shifted path covers [" + std::to_string(out.t_min()) + ", " + std::to_string(out.t_max()) +
               "] but the window needs [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
           std::max(std::abs(path.t_min()), path.t_max()) + need);
    }
  }
  return out;
}

namespace detail {

/// SplitMix64 finalizer, used to derive independent engine seeds from (seed, stream).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Two-sided Brownian path; the forward and backward halves come from separate streams.
/// Increments accumulate outward from 0, so widening the grid keeps existing nodes.
inline WienerPath sample_path(std::uint64_t seed, const TimeGrid& grid) {
  std::vector<double> values(grid.size(), 0.0);
  const double sd = std::sqrt(grid.step());
  const std::size_t origin = grid.n_neg();
  {
    std::mt19937_64 eng(detail::mix_seed(seed, 0));
    std::normal_distribution<double> normal(0.0, sd);
    double acc = 0.0;
    for (std::size_t i = 1; i <= grid.n_pos(); ++i) {
      acc += normal(eng);
      values[origin + i] = acc;
    }
  }
  {
    std::mt19937_64 eng(detail::mix_seed(seed, 1));
    std::normal_distribution<double> normal(0.0, sd);
    double acc = 0.0;
    for (std::size_t i = 1; i <= grid.n_neg(); ++i) {
      acc += normal(eng);
      values[origin - i] = acc;
    }
  }
  return WienerPath(grid, std::move(values), seed);
}

inline WienerPath zero_path(const TimeGrid& grid) { return WienerPath(grid, std::vector<double>(grid.size(), 0.0)); }

/// w(t) = slope * t on the grid; handy for sublinearity fixtures.
inline WienerPath linear_path(const TimeGrid& grid, double slope) {
  std::vector<double> values(grid.size());
  for (auto k = grid.k_min(); k <= grid.k_max(); ++k)
    values[static_cast<std::size_t>(k - grid.k_min())] = k == 0 ? 0.0 : slope * grid.time(k);
  return WienerPath(grid, std::move(values));
}

struct SublinearityReport {
  double sup_negative = 0.0;  ///< sup |w(r)/r| over r <= -T0
  double sup_positive = 0.0;  ///< sup |w(r)/r| over r >= T0
  double sup = 0.0;
  double recommended_epsilon = 0.0;
  double t0 = 1.0;
};

inline SublinearityReport sublinearity_report(const WienerPath& path, double t0 = 1.0) {
  require(t0 > 0.0, ErrorKind::configuration, "sublinearity threshold must be positive");
  SublinearityReport rep;
  rep.t0 = t0;
  const auto& g = path.grid();
  for (auto k = g.k_min(); k <= g.k_max(); ++k) {
    const double t = g.time(k);
    if (std::abs(t) < t0 - 1e-12) continue;
    const double v = std::abs(path.node(k) / t);
    if (t < 0) rep.sup_negative = std::max(rep.sup_negative, v);
    else rep.sup_positive = std::max(rep.sup_positive, v);
  }
  rep.sup = std::max(rep.sup_negative, rep.sup_positive);
  rep.recommended_epsilon = rep.sup;
  return rep;
}

enum class Side { negative, positive };

/// For each distance d in `distances` (node counts, any order) returns max |w(r)/r| over
/// the part of the chosen half-line at least d nodes from the origin. One outward pass.
inline std::vector<double> tail_growth(const WienerPath& path, Side side, std::span<const std::size_t> distances) {
  const auto& g = path.grid();
  const std::size_t n = side == Side::negative ? g.n_neg() : g.n_pos();
  const double sign = side == Side::negative ? -1.0 : 1.0;
  std::vector<std::size_t> order(distances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return distances[a] > distances[b]; });
  std::vector<double> out(distances.size(), 0.0);
  auto dist = [&](std::size_t i) { return std::max<std::size_t>(distances[order[i]], 1); };
  std::size_t next = 0;
  for (; next < order.size() && dist(next) > n; ++next) out[order[next]] = std::numeric_limits<double>::quiet_NaN();
  double running = 0.0;
  for (std::size_t j = n; j >= 1 && next < order.size(); --j) {
    const auto k = static_cast<std::ptrdiff_t>(j) * static_cast<std::ptrdiff_t>(sign);
    running = std::max(running, std::abs(path.node(k)) / (static_cast<double>(j) * g.step()));
    for (; next < order.size() && dist(next) == j; ++next) out[order[next]] = running;
  }
  return out;
}

}  // namespace pbl
