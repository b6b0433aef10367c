#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pbl/error.hpp"

namespace pbl {

/// Branch values on the uniform tau grid tau0 + i * dtau for one fixed path.
struct QuasiSolutionTrace {
  double tau0 = 0.0;
  double dtau = 1.0;
  std::vector<double> values;
  std::string label;

  std::size_t size() const noexcept { return values.size(); }
  double tau(std::size_t i) const noexcept { return tau0 + dtau * static_cast<double>(i); }
  double span() const noexcept { return values.empty() ? 0.0 : dtau * static_cast<double>(values.size() - 1); }
};

inline QuasiSolutionTrace make_trace(const std::function<double(double)>& branch, double tau0, double dtau, std::size_t n,
                                     std::string label = {}) {
  require(dtau > 0.0 && n >= 2, ErrorKind::configuration, "trace needs dtau > 0 and at least two samples");
  QuasiSolutionTrace tr{tau0, dtau, {}, std::move(label)};
  tr.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) tr.values.push_back(branch(tau0 + dtau * static_cast<double>(i)));
  return tr;
}

namespace detail {
inline std::size_t trace_shift(const QuasiSolutionTrace& tr, double t, const char* what) {
  const double q = t / tr.dtau;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) > 1e-6 * std::max(1.0, q))
    fail(ErrorKind::alignment, std::string(what) + " " + std::to_string(t) + " is not a multiple of the trace spacing");
  return static_cast<std::size_t>(r);
}

/// sup_i |v[i + m] - v[i]| over i < limit.
inline double shift_residual(const QuasiSolutionTrace& tr, std::size_t m, std::size_t limit) {
  double r = 0.0;
  for (std::size_t i = 0; i < limit; ++i) r = std::max(r, std::abs(tr.values[i + m] - tr.values[i]));
  return r;
}
}  // namespace detail

struct PeriodReport {
  double period = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// sup |trace(tau + T) - trace(tau)|; needs at least three periods of trace.
inline PeriodReport detect_period(const QuasiSolutionTrace& tr, double period, double tol) {
  require(period > 0.0, ErrorKind::configuration, "period must be positive");
  const std::size_t m = detail::trace_shift(tr, period, "period");
  if (tr.span() < 3.0 * period - 1e-9 * period)
    fail(ErrorKind::coverage, "trace spans " + std::to_string(tr.span()) + ", a period test needs 3T = " + std::to_string(3 * period));
  PeriodReport rep{period, detail::shift_residual(tr, m, tr.size() - m), tol, false};
  rep.pass = rep.residual <= tol;
  return rep;
}

struct AlmostPeriodScan {
  double eps = 0.0;
  double window = 0.0;
  double density = 0.0;
  std::vector<double> shifts;     ///< every candidate t0
  std::vector<double> residuals;  ///< sup residual per candidate
  std::vector<double> hits;
  double max_gap = 0.0;
  bool pass = false;
};

/// eps-almost periods t0 in [0, window] (multiples of the trace spacing). All candidates are compared
/// over the same tau range [tau0, tau_end - window]. Passes when every sub-interval of [0, window] of
/// length `density` contains a hit.
inline AlmostPeriodScan almost_period_scan(const QuasiSolutionTrace& tr, double eps, double window, double density) {
  require(eps > 0.0 && window > 0.0 && density > 0.0, ErrorKind::configuration, "scan needs positive eps, window, density");
  const std::size_t jmax = detail::trace_shift(tr, window, "scan window");
  if (tr.span() < window + density - 1e-9)
    fail(ErrorKind::coverage, "trace spans " + std::to_string(tr.span()) + ", the scan needs window + density = " +
                                  std::to_string(window + density));
  AlmostPeriodScan rep;
  rep.eps = eps;
  rep.window = window;
  rep.density = density;
  const std::size_t limit = tr.size() - jmax;
  for (std::size_t j = 0; j <= jmax; ++j) {
    const double t0 = tr.dtau * static_cast<double>(j);
    const double r = detail::shift_residual(tr, j, limit);
    rep.shifts.push_back(t0);
    rep.residuals.push_back(r);
    if (r <= eps) rep.hits.push_back(t0);
  }
  double prev = 0.0, gap = 0.0;
  for (double h : rep.hits) {
    gap = std::max(gap, h - prev);
    prev = h;
  }
  gap = std::max(gap, window - prev);
  rep.max_gap = gap;
  rep.pass = gap <= density + 1e-12;
  return rep;
}

enum class ProbeVerdict { pass, fail, inconclusive };

inline std::string_view to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::pass: return "pass";
    case ProbeVerdict::fail: return "fail";
    case ProbeVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct AutomorphyReport {
  std::vector<double> probes;
  std::vector<double> sequence;          ///< tau_n
  std::vector<std::size_t> subsequence;  ///< indices n_m into `sequence`
  std::vector<double> limit;             ///< zeta(p) for each probe
  double forward_residual = 0.0;
  double backward_residual = 0.0;
  double tol = 0.0;
  ProbeVerdict verdict = ProbeVerdict::inconclusive;
};

/// Two-sided limit test along a shift sequence tau_n. The subsequence is the largest set of n whose
/// probe vectors (xi(p + tau_n))_p lie in one sup-norm ball of radius tol / 2 around a member; its
/// last element stands in for the limit zeta. The backward limit is approximated by last-minus-previous
/// shift: |xi(p + tau_{n_M} - tau_{n_{M-1}}) - xi(p)|. Fewer than `min_length` members is inconclusive.
inline AutomorphyReport automorphy_probe(const std::function<double(double)>& xi, const std::vector<double>& taus, double tol,
                                         const std::vector<double>& probes, std::size_t min_length = 4) {
  require(tol > 0.0 && !probes.empty() && !taus.empty(), ErrorKind::configuration, "automorphy probe needs tol, probes, sequence");
  AutomorphyReport rep;
  rep.probes = probes;
  rep.sequence = taus;
  rep.tol = tol;
  const std::size_t n = taus.size(), np = probes.size();
  std::vector<double> v(n * np);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p = 0; p < np; ++p) v[i * np + p] = xi(probes[p] + taus[i]);
  auto dist = [&](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t p = 0; p < np; ++p) d = std::max(d, std::abs(v[a * np + p] - v[b * np + p]));
    return d;
  };
  std::vector<std::size_t> best;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (dist(i, c) <= 0.5 * tol) members.push_back(i);
    if (members.size() > best.size()) best = std::move(members);
  }
  rep.subsequence = best;
  if (best.size() < std::max<std::size_t>(min_length, 2)) {
    rep.verdict = ProbeVerdict::inconclusive;
    return rep;
  }
  const std::size_t last = best.back(), prev = best[best.size() - 2];
  for (std::size_t p = 0; p < np; ++p) rep.limit.push_back(v[last * np + p]);
  for (std::size_t i : best) rep.forward_residual = std::max(rep.forward_residual, dist(i, last));
  const double back_shift = taus[last] - taus[prev];
  for (std::size_t p = 0; p < np; ++p)
    rep.backward_residual = std::max(rep.backward_residual, std::abs(xi(probes[p] + back_shift) - xi(probes[p])));
  rep.verdict = rep.forward_residual <= tol && rep.backward_residual <= tol ? ProbeVerdict::pass : ProbeVerdict::fail;
  return rep;
}

}  // namespace pbl
