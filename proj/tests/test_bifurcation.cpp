#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pbl/bifurcation.hpp"
#include "pbl/io.hpp"
#include "support.hpp"

using namespace pbl;
using pbl::testing::kind_of;

namespace {

// Zero noise path, constant beta: the branches are the roots of lambda x = beta x^3 (or x^2).
SweepConfig deterministic(Scenario s, std::vector<double> lambdas) {
  SweepConfig cfg;
  cfg.scenario = s;
  cfg.beta = BetaFn::constant(2.0);
  cfg.lambdas = std::move(lambdas);
  cfg.path_kind = PathKind::zero;
  cfg.path_step = 1e-3;
  return cfg;
}

// Trapezoid bias of the closed forms at path step h is O(h^2) relative.
constexpr double kRel = 1e-6;

}  // namespace

TEST(LambdaGrid, GeometricAndSymmetric) {
  const auto g = geometric_lambda_grid(1.0, 0.01, 3, true);
  ASSERT_EQ(g.size(), 7u);
  const std::vector<double> want{-1.0, -0.1, -0.01, 0.0, 0.01, 0.1, 1.0};
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], want[i], 1e-15);
  EXPECT_EQ(geometric_lambda_grid(1.0, 0.01, 3).size(), 6u);
  EXPECT_EQ(kind_of([] { geometric_lambda_grid(0.1, 1.0, 3); }), ErrorKind::configuration);
  EXPECT_EQ(kind_of([] { geometric_lambda_grid(1.0, 0.1, 1); }), ErrorKind::configuration);
}

TEST(Schedule, DoublesUntilTheAnchorPassesTheHorizon) {
  const std::vector<double> base{5, 10, 20, 40};
  EXPECT_EQ(detail::scaled_schedule(base, 3.0), base);
  EXPECT_EQ(detail::scaled_schedule(base, 10.0), base);
  EXPECT_EQ(detail::scaled_schedule(base, 12.0), (std::vector<double>{10, 20, 40, 80}));
  EXPECT_EQ(detail::scaled_schedule(base, 70.0), (std::vector<double>{40, 80, 160, 320}));
  EXPECT_EQ(detail::scaled_schedule({3, 6}, 7.0), (std::vector<double>{12, 24}));
}

TEST(PitchforkSweep, DeterministicRootsAndVerdicts) {
  const auto d = pitchfork_sweep(deterministic(Scenario::pitchfork, {-1.0, -0.5, 0.5, 1.0}));
  ASSERT_EQ(d.rows.size(), 4u);
  EXPECT_DOUBLE_EQ(d.bounds.beta_0, 2.0);
  for (const DiagramRow& r : d.rows) {
    SCOPED_TRACE(r.lambda);
    EXPECT_EQ(r.status, "ok") << r.message;
    EXPECT_EQ(r.handle, "closed_form_pitchfork");
    if (r.lambda < 0) {
      EXPECT_LT(std::abs(r.x_plus), 1e-6);
      EXPECT_LT(std::abs(r.x_minus), 1e-6);
      EXPECT_EQ(r.stability, "asymptotically_stable");
      EXPECT_TRUE(std::isnan(r.lower_bound));
    } else {
      const double root = std::sqrt(r.lambda / 2.0);
      EXPECT_NEAR(r.x_plus, root, kRel * root);
      EXPECT_NEAR(r.x_minus, -root, kRel * root);
      // constant beta: the sandwich collapses onto the branch
      EXPECT_NEAR(r.lower_bound, root, kRel * root);
      EXPECT_NEAR(r.upper_bound, root, kRel * root);
      EXPECT_EQ(r.stability, "unstable");
      EXPECT_GT(r.truncation_R, 0.0);
    }
    ASSERT_TRUE(r.stability_report.has_value());
  }
}

TEST(PitchforkSweep, IntegratorHandleWithCubicForcing) {
  // gamma = 0.3 x^3 lowers the effective cubic coefficient to 1.7
  SweepConfig cfg = deterministic(Scenario::pitchfork, {1.0});
  cfg.gamma = GammaFn::cubic_profile({0.3, 0.0, 0.0});
  cfg.stability = false;
  const auto d = pitchfork_sweep(cfg);
  ASSERT_EQ(d.rows.size(), 1u);
  const DiagramRow& r = d.rows[0];
  EXPECT_EQ(r.status, "ok") << r.message;
  EXPECT_EQ(r.handle, "integrator_pitchfork");
  EXPECT_EQ(r.stability, "not_evaluated");
  // Heun's fixed points are the zeros of the drift
  EXPECT_NEAR(r.x_plus, std::sqrt(1.0 / 1.7), 1e-6);
  EXPECT_NEAR(r.x_minus, -std::sqrt(1.0 / 1.7), 1e-6);
  // beta - c1 and beta - c2 coincide, so the sandwich is sharp up to quadrature error
  EXPECT_NEAR(r.lower_bound, std::sqrt(1.0 / 1.7), 1e-5);
  EXPECT_NEAR(r.upper_bound, std::sqrt(1.0 / 1.7), 1e-5);
}

TEST(TranscriticalSweep, DeterministicBranchAndDegeneratePoint) {
  const auto d = transcritical_sweep(deterministic(Scenario::transcritical, {-1.0, -0.3, 0.0, 0.3, 1.0}));
  ASSERT_EQ(d.rows.size(), 5u);
  for (const DiagramRow& r : d.rows) {
    SCOPED_TRACE(r.lambda);
    if (r.lambda == 0.0) {
      EXPECT_EQ(r.status, "degenerate");
      continue;
    }
    EXPECT_EQ(r.status, "ok") << r.message;
    EXPECT_NEAR(r.x_plus, r.lambda / 2.0, kRel * std::abs(r.lambda));
    EXPECT_EQ(r.x_minus, 0.0);
    EXPECT_EQ(r.stability, r.lambda < 0 ? "asymptotically_stable" : "unstable");
    EXPECT_LE(r.lower_bound, r.x_plus + 1e-12);
    EXPECT_GE(r.upper_bound, r.x_plus - 1e-12);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeRows) {
  SweepConfig cfg;
  cfg.beta = BetaFn::periodic(2, 1, 2 * std::numbers::pi);
  cfg.lambdas = {-0.5, 0.5};
  cfg.seeds = {7, 11, 13};
  cfg.path_step = 1e-2;
  cfg.stability = false;
  const auto a = pitchfork_sweep(cfg);
  cfg.threads = 3;
  const auto b = pitchfork_sweep(cfg);
  ASSERT_EQ(a.rows.size(), 6u);
  EXPECT_EQ(io::render([&](std::ostream& os) { io::write_diagram_csv(os, a); }),
            io::render([&](std::ostream& os) { io::write_diagram_csv(os, b); }));
}

TEST(Sweep, GrowsShortPathsAndReportsHardLimits) {
  SweepConfig cfg = deterministic(Scenario::pitchfork, {0.5});
  cfg.t_min = -5.0;
  cfg.t_max = 5.0;
  cfg.stability = false;
  const auto grown = pitchfork_sweep(cfg);
  EXPECT_EQ(grown.rows[0].status, "ok") << grown.rows[0].message;
  EXPECT_NEAR(grown.rows[0].x_plus, 0.5, kRel);
  cfg.max_nodes = 20'000;
  const auto capped = pitchfork_sweep(cfg);
  EXPECT_EQ(capped.rows[0].status, "insufficient_support");
  EXPECT_FALSE(capped.rows[0].message.empty());
}

TEST(Sweep, ConfigurationErrors) {
  SweepConfig cfg = deterministic(Scenario::pitchfork, {});
  EXPECT_EQ(kind_of([&] { pitchfork_sweep(cfg); }), ErrorKind::configuration);
  cfg.lambdas = {1.0};
  cfg.base_schedule = {10, 5};
  EXPECT_EQ(kind_of([&] { pitchfork_sweep(cfg); }), ErrorKind::configuration);
  cfg.base_schedule = {5, 10, 20};
  cfg.gamma = GammaFn::cubic_profile({2.5, 0.0, 0.0});
  EXPECT_EQ(kind_of([&] { pitchfork_sweep(cfg); }), ErrorKind::incompatible_coefficients);
  cfg.gamma = GammaFn::quadratic_profile({0.5, 0.0, 0.0});
  EXPECT_EQ(kind_of([&] { pitchfork_sweep(cfg); }), ErrorKind::incompatible_coefficients);
}

TEST(RecurrenceSweep, PeriodicBranchOnZeroPath) {
  SweepConfig cfg = deterministic(Scenario::pitchfork, {-0.5, 0.5});
  cfg.beta = BetaFn::periodic(2, 1, 2 * std::numbers::pi);
  cfg.t_min = -60;
  cfg.path_step = 1e-4;
  const auto reps = recurrence_sweep(cfg);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].status, "trivial");
  EXPECT_TRUE(reps[0].pass);
  EXPECT_EQ(reps[1].test, "period");
  EXPECT_EQ(reps[1].beta_class, "periodic");
  EXPECT_TRUE(reps[1].pass) << reps[1].residual << " " << reps[1].message;
  cfg.gamma = GammaFn::cubic_profile({0.1, 0.0, 0.0});
  EXPECT_EQ(kind_of([&] { recurrence_sweep(cfg); }), ErrorKind::configuration);
}

TEST(RecurrenceSweep, TranscriticalBranchOnNegativeLambdaUsesTheFuture) {
  SweepConfig cfg = deterministic(Scenario::transcritical, {-1.0, 0.0});
  cfg.beta = BetaFn::periodic(2, 1, 2 * std::numbers::pi);
  cfg.t_min = -10;
  cfg.t_max = 60;
  cfg.path_step = 1e-4;
  const auto reps = recurrence_sweep(cfg);
  ASSERT_EQ(reps.size(), 2u);
  EXPECT_EQ(reps[0].branch, "x_lambda");
  EXPECT_TRUE(reps[0].pass) << reps[0].residual << " " << reps[0].message;
  EXPECT_EQ(reps[1].status, "trivial");
}

TEST(Io, DiagramWriters) {
  BifurcationDiagram d;
  DiagramRow r;
  r.lambda = 0.1;
  r.seed = 7;
  r.x_plus = 1.0 / 3.0;
  r.x_minus = -1.0 / 3.0;
  d.rows.push_back(r);
  const std::string csv = io::render([&](std::ostream& os) { io::write_diagram_csv(os, d); });
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, io::diagram_header());
  EXPECT_EQ(line.substr(0, 6), "0.1000");
  // 17 significant digits round-trip
  const auto third = line.find(",0.33");
  ASSERT_NE(third, std::string::npos);
  EXPECT_EQ(std::stod(line.substr(third + 1)), 1.0 / 3.0);
  EXPECT_NE(line.find(",nan,"), std::string::npos);
  EXPECT_NE(line.find("not_evaluated,"), std::string::npos);
  const auto j = io::to_json(d);
  EXPECT_TRUE(j["rows"][0]["lower_bound"].is_null());
  EXPECT_EQ(j["rows"][0]["x_plus"].get<double>(), 1.0 / 3.0);
  EXPECT_EQ(j["scenario"], "pitchfork");
  const std::string dat = io::render([&](std::ostream& os) { io::write_diagram_gnuplot(os, d); });
  EXPECT_EQ(dat.substr(0, 9), "# lambda ");
  EXPECT_EQ(io::num(0.1), "0.10000000000000001");
}

TEST(Io, ReportsSerialize) {
  CheckReport c;
  c.check = "cocycle_law";
  c.params = {{"t", 1.0}};
  c.residual = std::numeric_limits<double>::infinity();
  const auto jc = io::to_json(c);
  EXPECT_EQ(jc["verdict"], "fail");
  EXPECT_TRUE(jc["residual"].is_null());
  EXPECT_EQ(jc["params"]["t"], 1.0);
  const auto tr = make_trace([](double t) { return t; }, 0.0, 0.5, 3);
  EXPECT_EQ(io::render([&](std::ostream& os) { io::write_trace_csv(os, tr); }), "tau,value\n0,0\n0.5,0.5\n1,1\n");
  EXPECT_EQ(kind_of([] { io::write_text("/nonexistent-dir/x.txt", "a"); }), ErrorKind::io);
}
