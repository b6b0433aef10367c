#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pbl/recurrence.hpp"
#include "support.hpp"

using namespace pbl;
using pbl::testing::kind_of;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Trace, GridAndSpan) {
  const auto tr = make_trace([](double t) { return 2 * t; }, -1.0, 0.5, 5, "line");
  EXPECT_EQ(tr.size(), 5u);
  EXPECT_DOUBLE_EQ(tr.tau(4), 1.0);
  EXPECT_DOUBLE_EQ(tr.span(), 2.0);
  EXPECT_DOUBLE_EQ(tr.values[1], -1.0);
  EXPECT_EQ(tr.label, "line");
  EXPECT_EQ(kind_of([] { make_trace([](double) { return 0.0; }, 0, 0.0, 5); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { make_trace([](double) { return 0.0; }, 0, 1.0, 1); }), ErrorKind::configuration);
}

TEST(Period, DetectsTrueAndRejectsWrongPeriods) {
  const double dt = 2 * kPi / 64;
  const auto tr = make_trace([](double t) { return std::sin(t) + 0.3 * std::cos(2 * t); }, 0.0, dt, 64 * 4 + 1);
  const PeriodReport ok = detect_period(tr, 2 * kPi, 1e-12);
  EXPECT_TRUE(ok.pass) << ok.residual;
  const PeriodReport half = detect_period(tr, kPi, 1e-3);
  EXPECT_FALSE(half.pass);
  // sup |sin(t + pi) - sin(t)| over a full period is 2 for the first harmonic alone; the second cancels
  EXPECT_NEAR(half.residual, 2.0, 1e-2);
}

TEST(Period, NeedsThreePeriodsAndAlignedShift) {
  const double dt = 0.1;
  const auto tr = make_trace([](double t) { return std::sin(t); }, 0.0, dt, 100);
  EXPECT_EQ(kind_of([&] { detect_period(tr, 4.0, 1e-6); }), ErrorKind::coverage);
  EXPECT_EQ(kind_of([&] { detect_period(tr, 1.05, 1e-6); }), ErrorKind::alignment);
  EXPECT_EQ(kind_of([&] { detect_period(tr, -1.0, 1e-6); }), ErrorKind::configuration);
}

TEST(AlmostPeriod, PeriodicTraceHasDenseHits) {
  // period 2: hits at every multiple of 2 in [0, 20]
  const auto tr = make_trace([](double t) { return std::sin(kPi * t); }, 0.0, 0.05, 801);
  const AlmostPeriodScan s = almost_period_scan(tr, 1e-9, 20.0, 2.5);
  EXPECT_TRUE(s.pass);
  ASSERT_EQ(s.hits.size(), 11u);
  for (std::size_t i = 0; i < s.hits.size(); ++i) EXPECT_NEAR(s.hits[i], 2.0 * i, 1e-12);
  EXPECT_NEAR(s.max_gap, 2.0, 1e-12);
  EXPECT_EQ(s.shifts.size(), 401u);
  EXPECT_FALSE(almost_period_scan(tr, 1e-9, 20.0, 1.5).pass);
}

TEST(AlmostPeriod, QuasiPeriodicSumOracle) {
  // f = sin t + sin(sqrt2 t); sup_t |f(t + s) - f(t)| <= 2 (|sin(s/2)| + |sin(sqrt2 s/2)|).
  const double r2 = std::sqrt(2.0), dt = 0.01;
  const auto tr = make_trace([&](double t) { return std::sin(t) + std::sin(r2 * t); }, 0.0, dt, 20001);
  const double eps = 0.3;
  const AlmostPeriodScan s = almost_period_scan(tr, eps, 100.0, 50.0);
  for (std::size_t j = 0; j < s.shifts.size(); ++j) {
    const double t0 = s.shifts[j];
    const double bound = 2 * (std::abs(std::sin(t0 / 2)) + std::abs(std::sin(r2 * t0 / 2)));
    ASSERT_LE(s.residuals[j], bound + 1e-12) << "shift " << t0;
  }
  // every shift whose bound falls below eps must be a hit
  for (std::size_t j = 0; j < s.shifts.size(); ++j) {
    const double t0 = s.shifts[j];
    if (2 * (std::abs(std::sin(t0 / 2)) + std::abs(std::sin(r2 * t0 / 2))) <= eps) {
      EXPECT_NE(std::find(s.hits.begin(), s.hits.end(), t0), s.hits.end()) << t0;
    }
  }
  EXPECT_FALSE(s.hits.empty());
  EXPECT_EQ(s.hits.front(), 0.0);
}

TEST(AlmostPeriod, CoverageAndParameterErrors) {
  const auto tr = make_trace([](double t) { return t; }, 0.0, 0.1, 101);
  EXPECT_EQ(kind_of([&] { almost_period_scan(tr, 0.1, 8.0, 3.0); }), ErrorKind::coverage);
  EXPECT_EQ(kind_of([&] { almost_period_scan(tr, 0.1, 5.05, 1.0); }), ErrorKind::alignment);
  EXPECT_EQ(kind_of([&] { almost_period_scan(tr, 0.0, 5.0, 1.0); }), ErrorKind::configuration);
  // a strictly increasing trace has no nonzero almost period
  const AlmostPeriodScan s = almost_period_scan(tr, 0.05, 5.0, 1.0);
  EXPECT_EQ(s.hits.size(), 1u);
  EXPECT_NEAR(s.max_gap, 5.0, 1e-12);
  EXPECT_FALSE(s.pass);
}

TEST(Automorphy, PeriodicFunctionPasses) {
  std::vector<double> taus;
  for (int n = 1; n <= 20; ++n) taus.push_back(2 * kPi * n);
  const auto xi = [](double t) { return std::cos(t); };
  const AutomorphyReport r = automorphy_probe(xi, taus, 1e-9, {0.0, 1.0, 2.5});
  EXPECT_EQ(r.verdict, ProbeVerdict::pass);
  EXPECT_EQ(r.subsequence.size(), 20u);
  EXPECT_LT(r.forward_residual, 1e-9);
  EXPECT_LT(r.backward_residual, 1e-9);
  ASSERT_EQ(r.limit.size(), 3u);
  EXPECT_NEAR(r.limit[1], std::cos(1.0), 1e-9);
}

TEST(Automorphy, BackwardShiftCanFail) {
  // along tau_n = n^2 the values of t -> t are unbounded: no two probe vectors are close
  std::vector<double> taus;
  for (int n = 1; n <= 10; ++n) taus.push_back(n * n);
  const AutomorphyReport none = automorphy_probe([](double t) { return t; }, taus, 0.1, {0.0});
  EXPECT_EQ(none.verdict, ProbeVerdict::inconclusive);
  EXPECT_EQ(none.subsequence.size(), 1u);
  // cos t plus a unit step at t = 5: forward vectors along 2 pi n coincide, the backward shift misses by 1
  std::vector<double> per;
  for (int n = 1; n <= 10; ++n) per.push_back(2 * kPi * n);
  const auto step = [](double t) { return std::cos(t) + (t >= 5.0 ? 1.0 : 0.0); };
  const AutomorphyReport r = automorphy_probe(step, per, 0.1, {0.0, 3.0}, 4);
  EXPECT_EQ(r.subsequence.size(), 10u);
  EXPECT_LT(r.forward_residual, 1e-9);
  EXPECT_NEAR(r.backward_residual, 1.0, 1e-9);
  EXPECT_EQ(r.verdict, ProbeVerdict::fail);
  EXPECT_EQ(to_string(r.verdict), "fail");
}

TEST(Automorphy, RejectsEmptyInput) {
  EXPECT_EQ(kind_of([] { automorphy_probe([](double) { return 0.0; }, {}, 0.1, {0.0}); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { automorphy_probe([](double) { return 0.0; }, {1.0}, 0.1, {}); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { automorphy_probe([](double) { return 0.0; }, {1.0}, 0.0, {0.0}); }), ErrorKind::configuration);
}

TEST(AlmostPeriod, RandomWalkIsANegativeControl) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> step(0.0, std::sqrt(0.05));
  double x = 0.0;
  const auto tr = make_trace([&](double) { return x += step(rng); }, 0.0, 0.05, 4201);
  const AlmostPeriodScan s = almost_period_scan(tr, 0.05, 200.0, 10.0);
  EXPECT_FALSE(s.pass);
  EXPECT_GT(s.max_gap, 10.0);
}

TEST(Recurrence, PeriodicPassImpliesHitsAtMultiples) {
  const double T = 2 * kPi, dt = T / 64;
  const auto tr = make_trace([](double t) { return std::exp(std::sin(t)); }, 0.0, dt, 64 * 12 + 1);
  const PeriodReport p = detect_period(tr, T, 1e-9);
  ASSERT_TRUE(p.pass);
  const AlmostPeriodScan s = almost_period_scan(tr, 1e-9, 6 * T, T);
  for (int k = 0; k <= 6; ++k) {
    const double t0 = k * 64 * dt;
    const bool hit = std::any_of(s.hits.begin(), s.hits.end(), [&](double h) { return std::abs(h - t0) < 1e-9; });
    EXPECT_TRUE(hit) << "multiple " << k;
  }
  EXPECT_TRUE(s.pass);
}

TEST(Recurrence, AlmostPeriodicTraceProbesWithinTwiceEps) {
  // sin t + sin(sqrt2 t) is almost periodic; probe along its own eps-almost periods
  const double r2 = std::sqrt(2.0), dt = 0.01, eps = 0.3;
  const auto f = [&](double t) { return std::sin(t) + std::sin(r2 * t); };
  const auto tr = make_trace(f, 0.0, dt, 30001);
  const AlmostPeriodScan s = almost_period_scan(tr, eps, 200.0, 100.0);
  ASSERT_GE(s.hits.size(), 5u);
  std::vector<double> taus(s.hits.begin() + 1, s.hits.end());
  const AutomorphyReport r = automorphy_probe(f, taus, eps, {0.0, 1.0, r2}, 2);
  EXPECT_LE(r.forward_residual, 2 * eps);
  EXPECT_LE(r.backward_residual, 2 * eps);
}
