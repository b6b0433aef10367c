#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "pbl/wiener.hpp"

namespace pbl {

/// Binary path file: 32-byte little-endian header then node values as f64.
/// Header: magic "WPTH", u32 version, u64 seed, f64 step, u32 n_neg, u32 n_pos.
namespace path_file {

inline constexpr char kMagic[4] = {'W', 'P', 'T', 'H'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 32;

inline void write(const std::filesystem::path& file, const WienerPath& path) {
  const auto& g = path.grid();
  require(g.n_neg() <= UINT32_MAX && g.n_pos() <= UINT32_MAX, ErrorKind::io, "path too long for the cache format");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot open " + file.string() + " for writing");
  const std::uint64_t seed = path.seed();
  const double step = g.step();
  const auto n_neg = static_cast<std::uint32_t>(g.n_neg());
  const auto n_pos = static_cast<std::uint32_t>(g.n_pos());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), 4);
  out.write(reinterpret_cast<const char*>(&seed), 8);
  out.write(reinterpret_cast<const char*>(&step), 8);
  out.write(reinterpret_cast<const char*>(&n_neg), 4);
  out.write(reinterpret_cast<const char*>(&n_pos), 4);
  const auto values = path.values();
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) fail(ErrorKind::io, "short write to " + file.string());
}

inline WienerPath read(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + file.string());
  char magic[4];
  std::uint32_t version = 0, n_neg = 0, n_pos = 0;
  std::uint64_t seed = 0;
  double step = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&seed), 8);
  in.read(reinterpret_cast<char*>(&step), 8);
  in.read(reinterpret_cast<char*>(&n_neg), 4);
  in.read(reinterpret_cast<char*>(&n_pos), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) fail(ErrorKind::io, file.string() + " is not a path file");
  if (version != kVersion) fail(ErrorKind::io, "unsupported path file version " + std::to_string(version));
  const TimeGrid grid(step, n_neg, n_pos);
  std::vector<double> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) fail(ErrorKind::io, "truncated path file " + file.string());
  return WienerPath(grid, std::move(values), seed);
}

inline std::string file_name(std::uint64_t seed, const TimeGrid& grid) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "wpth_s%llu_h%a_n%zu_p%zu.bin", static_cast<unsigned long long>(seed), grid.step(),
                grid.n_neg(), grid.n_pos());
  return buf;
}

}  // namespace path_file

/// Samples through an optional on-disk cache directory.
inline WienerPath sample_path_cached(std::uint64_t seed, const TimeGrid& grid,
                                     const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir) return sample_path(seed, grid);
  std::filesystem::create_directories(*cache_dir);
  const auto file = *cache_dir / path_file::file_name(seed, grid);
  if (std::filesystem::exists(file)) {
    WienerPath p = path_file::read(file);
    if (p.seed() == seed && p.grid() == grid) return p;
  }
  WienerPath p = sample_path(seed, grid);
  path_file::write(file, p);
  return p;
}

enum class PathKind { brownian, zero };

/// Lazily widened path for one seed. Widening resamples on a larger grid; because
/// sampling is outward-cumulative the already-seen nodes do not change.
class PathSource {
 public:
  PathSource(PathKind kind, std::uint64_t seed, double step, double t_min, double t_max,
             std::optional<std::filesystem::path> cache_dir = std::nullopt,
             std::size_t max_nodes = 40'000'000)
      : kind_(kind), seed_(seed), step_(step), max_nodes_(max_nodes), cache_dir_(std::move(cache_dir)) {
    current_ = make(TimeGrid::from_bounds(t_min, t_max, step));
  }

  PathSource(const PathSource& other)
      : kind_(other.kind_), seed_(other.seed_), step_(other.step_), max_nodes_(other.max_nodes_),
        cache_dir_(other.cache_dir_), current_(other.path()) {}

  PathKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double step() const noexcept { return step_; }

  WienerPath path() const {
    std::lock_guard lock(mutex_);
    return current_;
  }

  /// Path whose support contains [t_lo, t_hi]; grows the stored path if needed.
  WienerPath covering(double t_lo, double t_hi) {
    std::lock_guard lock(mutex_);
    if (current_.t_min() <= t_lo && current_.t_max() >= t_hi) return current_;
    const double lo = std::min(current_.t_min(), std::floor(t_lo / step_) * step_);
    const double hi = std::max(current_.t_max(), std::ceil(t_hi / step_) * step_);
    const auto grid = TimeGrid::from_bounds(lo, hi, step_);
    if (grid.size() > max_nodes_)
      fail(ErrorKind::insufficient_support,
           "covering [" + std::to_string(t_lo) + ", " + std::to_string(t_hi) + "] needs " + std::to_string(grid.size()) +
               " nodes, above the limit " + std::to_string(max_nodes_),
           std::max(-t_lo, t_hi));
    current_ = make(grid);
    return current_;
  }

 private:
  WienerPath make(const TimeGrid& grid) const {
    if (kind_ == PathKind::zero) return zero_path(grid);
    return sample_path_cached(seed_, grid, cache_dir_);
  }

  PathKind kind_;
  std::uint64_t seed_;
  double step_;
  std::size_t max_nodes_;
  std::optional<std::filesystem::path> cache_dir_;
  mutable std::mutex mutex_;
  WienerPath current_;
};

}  // namespace pbl
