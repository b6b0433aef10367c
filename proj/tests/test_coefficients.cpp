#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbl/coefficients.hpp"
#include "support.hpp"

using namespace pbl;
using pbl::testing::kind_of;

namespace {

// min / max of f over a dense sample of [lo, hi].
std::pair<double, double> sampled_range(const BetaFn& f, double lo, double hi, int n = 400001) {
  double mn = INFINITY, mx = -INFINITY;
  for (int i = 0; i < n; ++i) {
    const double v = f(lo + (hi - lo) * i / (n - 1));
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

}  // namespace

TEST(Beta, AnalyticBoundsOfBuiltInKinds) {
  const BetaFn p = BetaFn::periodic(2, 1, 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(p.lower(), 1.0);
  EXPECT_DOUBLE_EQ(p.upper(), 3.0);
  const BetaFn q = BetaFn::quasi_periodic(3, 1, 1);
  EXPECT_DOUBLE_EQ(q.lower(), 1.0);
  EXPECT_DOUBLE_EQ(q.upper(), 5.0);
  const BetaFn a = BetaFn::almost_automorphic(2, 1);
  EXPECT_DOUBLE_EQ(a.lower(), 1.0);
  EXPECT_DOUBLE_EQ(a.upper(), 3.0);
  const BetaFn c = BetaFn::constant(4);
  EXPECT_DOUBLE_EQ(c.lower(), 4.0);
  EXPECT_DOUBLE_EQ(c(123.0), 4.0);
}

TEST(Beta, SampledValuesStayInsideAndApproachTheBounds) {
  for (const BetaFn& f : {BetaFn::periodic(2, 1, 2 * std::numbers::pi), BetaFn::quasi_periodic(3, 1, 1)}) {
    const auto [mn, mx] = sampled_range(f, -400, 400);
    EXPECT_GE(mn, f.lower());
    EXPECT_LE(mx, f.upper());
    EXPECT_LT(mn - f.lower(), 2e-2);
    EXPECT_LT(f.upper() - mx, 2e-2);
  }
  // sin(1 / (2 + cos t + cos sqrt2 t)) has its argument in [1/4, inf), so the bounds hold but are not sharp below.
  const BetaFn a = BetaFn::almost_automorphic(2, 1);
  const auto [mn, mx] = sampled_range(a, -400, 400);
  EXPECT_GE(mn, a.lower());
  EXPECT_LE(mx, a.upper());
}

TEST(Beta, PeriodicKindRepeats) {
  const double T = 5.0;
  const BetaFn p = BetaFn::periodic(3, -2, T);
  for (double t : {-7.3, 0.0, 1.1, 42.0}) EXPECT_NEAR(p(t + T), p(t), 1e-13);
  EXPECT_NEAR(p(T / 4), 1.0, 1e-15);
}

TEST(Beta, QuasiPeriodicKindIsNotTwoPiPeriodic) {
  const BetaFn q = BetaFn::quasi_periodic(3, 1, 1);
  double worst = 0;
  for (double t = 0; t < 20; t += 0.01) worst = std::max(worst, std::abs(q(t + 2 * std::numbers::pi) - q(t)));
  EXPECT_GT(worst, 0.5);
}

TEST(Beta, MinusShiftsValuesAndBounds) {
  const BetaFn p = BetaFn::periodic(2, 1, 6);
  const BetaFn m = p.minus(0.4);
  EXPECT_DOUBLE_EQ(m(1.3), p(1.3) - 0.4);
  EXPECT_DOUBLE_EQ(m.lower(), 0.6);
  EXPECT_DOUBLE_EQ(m.upper(), 2.6);
  EXPECT_EQ(kind_of([&] { p.minus(1.0); }), ErrorKind::incompatible_coefficients);
}

TEST(Beta, RejectsInvalidParameters) {
  EXPECT_EQ(kind_of([] { BetaFn::constant(0); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { BetaFn::periodic(1, 1, 2); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { BetaFn::periodic(2, 1, 0); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { BetaFn::quasi_periodic(2, 1, 1); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { BetaFn::almost_automorphic(1, -1); }), ErrorKind::configuration);
}

TEST(Beta, CustomBoundsAreVerified) {
  const BetaFn ok = BetaFn::custom([](double t) { return 2 + std::cos(t); }, 1, 3);
  EXPECT_DOUBLE_EQ(ok(0), 3.0);
  EXPECT_EQ(ok.kind(), BetaKind::custom);
  EXPECT_EQ(kind_of([] { BetaFn::custom([](double t) { return 2 + std::cos(t); }, 1.5, 3); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { BetaFn::custom([](double) { return 1.0; }, 0.0, 1.0); }), ErrorKind::configuration);
}

TEST(Gamma, CubicProfileBand) {
  const GammaFn g = GammaFn::cubic_profile({0.3, 0.1, 2.0});
  EXPECT_DOUBLE_EQ(g.c1(), 0.2);
  EXPECT_DOUBLE_EQ(g.c2(), 0.4);
  EXPECT_TRUE(g.fits(Variant::pitchfork));
  EXPECT_FALSE(g.fits(Variant::transcritical));
  // c1 x^4 <= gamma(t, x) x <= c2 x^4 on a sample
  for (double t = -10; t <= 10; t += 0.37)
    for (double x = -3; x <= 3; x += 0.25) {
      const double v = g(t, x) * x, p = x * x * x * x;
      ASSERT_GE(v, g.c1() * p - 1e-12);
      ASSERT_LE(v, g.c2() * p + 1e-12);
    }
}

TEST(Gamma, QuadraticProfileBandOnPositiveHalfLine) {
  const GammaFn g = GammaFn::quadratic_profile({0.5, 0.25, 1.0});
  EXPECT_TRUE(g.fits(Variant::transcritical));
  for (double t = -5; t <= 5; t += 0.5)
    for (double x = 0; x <= 4; x += 0.5) {
      const double v = g(t, x) * x, p = x * x * x;
      ASSERT_GE(v, g.c1() * p - 1e-12);
      ASSERT_LE(v, g.c2() * p + 1e-12);
    }
}

TEST(Gamma, ZeroFitsBothAndRejectsNegativeProfiles) {
  const GammaFn z = GammaFn::zero();
  EXPECT_TRUE(z.is_zero());
  EXPECT_TRUE(z.fits(Variant::pitchfork) && z.fits(Variant::transcritical));
  EXPECT_EQ(z(1.0, 5.0), 0.0);
  EXPECT_EQ(kind_of([] { GammaFn::cubic_profile({0.1, 0.2, 1.0}); }), ErrorKind::configuration);
}

TEST(Gamma, CustomBandIsChecked) {
  const GammaFn ok = GammaFn::custom([](double, double x) { return 0.2 * x * x * x; }, 0.1, 0.3, Variant::pitchfork);
  EXPECT_EQ(ok.kind(), GammaKind::custom);
  EXPECT_DOUBLE_EQ(ok(0, 2), 1.6);
  EXPECT_EQ(kind_of([] { GammaFn::custom([](double, double x) { return 0.5 * x * x * x; }, 0.1, 0.3, Variant::pitchfork); }),
            ErrorKind::configuration);
}

TEST(Pairing, AcceptsAndRejects) {
  const BetaFn b = BetaFn::periodic(2, 1, 6);
  const auto ok = validate_pairing(b, GammaFn::cubic_profile({0.3, 0, 0}), Variant::pitchfork);
  EXPECT_DOUBLE_EQ(ok.beta_0, 1.0);
  EXPECT_DOUBLE_EQ(ok.beta_1, 3.0);
  EXPECT_DOUBLE_EQ(ok.c2, 0.3);
  EXPECT_EQ(kind_of([&] { validate_pairing(b, GammaFn::cubic_profile({1.0, 0, 0}), Variant::pitchfork); }),
            ErrorKind::incompatible_coefficients);
  EXPECT_EQ(kind_of([&] { validate_pairing(b, GammaFn::quadratic_profile({0.1, 0, 0}), Variant::pitchfork); }),
            ErrorKind::incompatible_coefficients);
  Error e(ErrorKind::incompatible_coefficients, "x");
  EXPECT_TRUE(e.is_configuration());
}

TEST(Envelope, YoungConstantMatchesBruteForceMaximum) {
  for (double lam : {-2.0, -0.1, 0.5, 3.0})
    for (double k : {0.5, 2.0}) {
      double best = 0.0;
      for (double x = 0; x <= 10; x += 1e-5) best = std::max(best, std::abs(lam + 1) * x - 0.5 * k * x * x * x);
      EXPECT_NEAR(young_constant(lam, k + 0.2, 0.2, 0.0), best, 1e-9 * std::max(1.0, best));
      EXPECT_NEAR(young_constant(lam, k + 0.2, 0.2, 0.1), 1.1 * best, 1e-9 * std::max(1.0, best));
    }
  EXPECT_EQ(young_constant(-1.0, 1.0, 0.0), 0.0);
  EXPECT_EQ(kind_of([] { young_constant(1.0, 1.0, 1.0); }), ErrorKind::incompatible_coefficients);
}

TEST(Envelope, DominatesThePitchforkDrift) {
  // lambda x - (beta_0 - c2) x^3 <= -x + h for x >= 0: the linear envelope is a super-solution of |x|.
  const double lam = 0.7;
  const CertifiedBounds b{1.0, 3.0, 0.0, 0.3};
  const auto env = pitchfork_envelope(lam, b);
  for (double x = 0; x <= 5; x += 1e-3) ASSERT_LE(lam * x - (b.beta_0 - b.c2) * x * x * x, -x + env.forcing(0.0) + 1e-12);
  EXPECT_EQ(kind_of([] { LinearEnvelopeData::constant(0.0, 1.0); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { LinearEnvelopeData::constant(1.0, -1.0); }), ErrorKind::configuration);
}
