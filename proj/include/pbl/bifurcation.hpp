#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pbl/cocycle.hpp"
#include "pbl/path_cache.hpp"
#include "pbl/recurrence.hpp"

namespace pbl {

enum class Scenario { pitchfork, transcritical };

inline std::string_view to_string(Scenario s) { return s == Scenario::pitchfork ? "pitchfork" : "transcritical"; }

/// Symmetric lambda grid, geometric towards 0: +-lambda_max * ratio^k down to min_abs, optionally with 0.
inline std::vector<double> geometric_lambda_grid(double lambda_max, double min_abs, int per_side, bool include_zero = false) {
  require(lambda_max > min_abs && min_abs > 0.0 && per_side >= 2, ErrorKind::configuration, "invalid lambda grid bounds");
  const double ratio = std::pow(min_abs / lambda_max, 1.0 / (per_side - 1));
  std::vector<double> pos;
  for (int k = 0; k < per_side; ++k) pos.push_back(lambda_max * std::pow(ratio, k));
  std::vector<double> out;
  for (double v : pos) out.push_back(-v);
  if (include_zero) out.push_back(0.0);
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(*it);
  return out;
}

struct SweepConfig {
  Scenario scenario = Scenario::pitchfork;
  double delta = 0.5;
  BetaFn beta;
  GammaFn gamma;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds{7};
  std::vector<double> taus{0.0};
  PathKind path_kind = PathKind::brownian;
  double path_step = 1e-3;
  double t_min = -200.0;
  double t_max = 50.0;
  std::size_t max_nodes = 40'000'000;
  std::optional<std::filesystem::path> cache_dir;
  double integrator_step = 1e-3;
  QuadratureSpec quadrature{};
  std::vector<double> base_schedule{5, 10, 20, 40};
  double pullback_tol = 1e-6;
  bool stability = true;
  StabilityOptions stability_options{};
  int threads = 1;
  int max_extensions = 8;
};

struct DiagramRow {
  double lambda = 0.0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  /// Pitchfork: upper / lower attractor endpoint (the branches x^+- when lambda > 0).
  /// Transcritical: x_plus is the nontrivial branch x_lambda, x_minus the trivial solution 0.
  double x_plus = std::numeric_limits<double>::quiet_NaN();
  double x_minus = std::numeric_limits<double>::quiet_NaN();
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double upper_bound = std::numeric_limits<double>::quiet_NaN();
  std::string stability = "not_evaluated";
  double truncation_R = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  std::string message;
  std::string handle;
  std::vector<double> schedule;
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<StabilityReport> stability_report;
};

struct BifurcationDiagram {
  Scenario scenario = Scenario::pitchfork;
  SweepConfig config;
  CertifiedBounds bounds;
  std::vector<DiagramRow> rows;
};

namespace detail {

/// Doubles the base schedule until the third-to-last time passes the horizon, so the last two
/// differences compare already-settled values.
inline std::vector<double> scaled_schedule(const std::vector<double>& base, double horizon) {
  const double anchor = base[base.size() >= 3 ? base.size() - 3 : 0];
  double m = 1.0;
  while (anchor * m < horizon) m *= 2.0;
  std::vector<double> out;
  for (double t : base) out.push_back(t * m);
  return out;
}

/// Runs `body` on a path from `src`, growing the path while it reports insufficient support.
template <class Body>
void with_extension(PathSource& src, const SweepConfig& cfg, Side primary, Body&& body) {
  for (int attempt = 0;; ++attempt) {
    const WienerPath w = src.path();
    try {
      body(w);
      return;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::insufficient_support || attempt >= cfg.max_extensions) throw;
      const double need = std::max(e.required_extent(), 0.0);
      if (primary == Side::negative) src.covering(-std::max(need, 2.0 * -w.t_min()), w.t_max());
      else src.covering(w.t_min(), std::max(need, 2.0 * w.t_max()));
    }
  }
}

/// Makes sure the negative side covers pullbacks up to `reach` plus room for the envelope integral.
inline void cover_pullbacks(PathSource& src, double reach) {
  const WienerPath w = src.path();
  const double lo = -(reach + std::max(200.0, 0.25 * reach));
  if (w.t_min() > lo) src.covering(lo, w.t_max());
}

inline void pitchfork_row(const SweepConfig& cfg, const CertifiedBounds& bounds, PathSource& src, DiagramRow& row) {
  const Coefficients c{row.lambda, cfg.delta, cfg.beta};
  const bool closed = cfg.gamma.is_zero();
  const Cocycle phi = closed ? closed_form_pitchfork(c)
                             : integrator_cocycle(DriftSpec::pitchfork(c, cfg.gamma), cfg.integrator_step);
  row.handle = phi.name();
  with_extension(src, cfg, Side::negative, [&](const WienerPath& w0) {
    double horizon = cfg.base_schedule.back();
    if (row.lambda != 0.0)
      horizon = decay_horizon(w0, Side::negative, std::abs(row.lambda), cfg.delta, cfg.quadrature.rel_tol);
    row.schedule = scaled_schedule(cfg.base_schedule, horizon);
    cover_pullbacks(src, row.schedule.back());
    const WienerPath w = src.path();
    if (row.lambda > 0.0) {
      const auto sw = sandwich_bounds(row.lambda, cfg.delta, bounds, w, cfg.quadrature);
      row.lower_bound = sw.lower;
      row.upper_bound = sw.upper;
    }
    if (closed && row.lambda > 0.0) {
      const QuasiPair q = quasi_pitchfork(c, w, row.tau, cfg.quadrature);
      row.x_plus = q.plus;
      row.x_minus = q.minus;
      row.truncation_R = q.truncation;
      row.residual = q.tail_bound;
    } else {
      const auto env = pitchfork_envelope(row.lambda, bounds);
      AttractorOptions opt;
      opt.schedule = row.schedule;
      opt.tol = cfg.pullback_tol;
      opt.quadrature = cfg.quadrature;
      opt.require_convergence = false;
      const AttractorInterval a = attractor_endpoints(phi, cfg.delta, env, w, row.tau, opt);
      row.x_plus = a.upper;
      row.x_minus = a.lower;
      row.residual = a.residual;
      row.truncation_R = linear_xi(cfg.delta, env, w, row.tau, cfg.quadrature).truncation;
      if (!a.converged) row.status = "not_converged";
    }
    if (cfg.stability) {
      StabilityOptions so = cfg.stability_options;
      so.schedule = row.schedule;
      so.domain = Domain::whole_line;
      row.stability_report = stability_probe(phi, w, row.tau, so);
      row.stability = std::string(to_string(row.stability_report->verdict));
    }
  });
}

inline void transcritical_row(const SweepConfig& cfg, const CertifiedBounds& bounds, PathSource& src, DiagramRow& row) {
  if (row.lambda == 0.0) {
    row.status = "degenerate";
    row.message = "branches coalesce at lambda = 0";
    return;
  }
  const Coefficients c{row.lambda, cfg.delta, cfg.beta};
  const bool closed = cfg.gamma.is_zero();
  const DriftSpec drift = DriftSpec::transcritical(c, cfg.gamma);
  const Cocycle phi = closed ? closed_form_transcritical(c) : integrator_cocycle(drift, cfg.integrator_step);
  row.handle = phi.name();
  const Side primary = row.lambda > 0.0 ? Side::negative : Side::positive;
  with_extension(src, cfg, primary, [&](const WienerPath& w0) {
    const double horizon = decay_horizon(w0, primary, std::abs(row.lambda), cfg.delta, cfg.quadrature.rel_tol);
    row.schedule = scaled_schedule(cfg.base_schedule, horizon);
    cover_pullbacks(src, row.schedule.back());
    if (primary == Side::positive && src.path().t_max() < row.schedule.back() + 1.0)
      src.covering(src.path().t_min(), row.schedule.back() + 1.0);
    const WienerPath w = src.path();
    // Comparison branches: beta - c2 is a super-solution equation, beta - c1 a sub-solution one.
    const Coefficients hi{row.lambda, cfg.delta, cfg.beta.minus(bounds.c2)};
    const Coefficients lo{row.lambda, cfg.delta, cfg.beta.minus(bounds.c1)};
    const QuasiValue qa = quasi_transcritical(hi, w, row.tau, cfg.quadrature);
    const QuasiValue qb = quasi_transcritical(lo, w, row.tau, cfg.quadrature);
    row.lower_bound = std::min(qa.value, qb.value);
    row.upper_bound = std::max(qa.value, qb.value);
    row.truncation_R = std::max(qa.truncation, qb.truncation);
    if (closed) {
      const QuasiValue q = quasi_transcritical(c, w, row.tau, cfg.quadrature);
      row.x_plus = q.value;
      row.residual = q.tail_bound;
    } else {
      std::vector<double> vals;
      for (double t : row.schedule) {
        const FlowResult r = row.lambda > 0.0 ? phi.pullback(t, row.tau, w, 1.0)
                                              : backward_state(drift, w, row.tau, t, -1.0, cfg.integrator_step);
        if (!r.finite()) fail(ErrorKind::non_convergence, "branch pullback exploded at t = " + std::to_string(t));
        vals.push_back(r.value);
      }
      row.x_plus = vals.back();
      double res = 0;
      if (!two_agreements(vals, cfg.pullback_tol, &res)) row.status = "not_converged";
      row.residual = res;
    }
    row.x_minus = 0.0;
    if ((row.x_plus > 0.0) != (row.lambda > 0.0)) {
      row.status = "invariant_violation";
      row.message = "sign of the nontrivial branch differs from the sign of lambda";
    }
    if (cfg.stability) {
      StabilityOptions so = cfg.stability_options;
      so.schedule = row.schedule;
      so.domain = Domain::positive;
      row.stability_report = stability_probe(phi, w, row.tau, so);
      row.stability = std::string(to_string(row.stability_report->verdict));
    }
  });
}

}  // namespace detail

inline BifurcationDiagram run_sweep(const SweepConfig& cfg) {
  require(!cfg.lambdas.empty() && !cfg.seeds.empty() && !cfg.taus.empty(), ErrorKind::configuration,
          "sweep needs lambdas, seeds and taus");
  require(!cfg.base_schedule.empty() && std::is_sorted(cfg.base_schedule.begin(), cfg.base_schedule.end()),
          ErrorKind::configuration, "pullback schedule must be nonempty and increasing");
  BifurcationDiagram d;
  d.scenario = cfg.scenario;
  d.config = cfg;
  d.bounds = validate_pairing(cfg.beta, cfg.gamma, cfg.scenario == Scenario::pitchfork ? Variant::pitchfork : Variant::transcritical);

  std::vector<std::unique_ptr<PathSource>> sources;
  for (auto seed : cfg.seeds)
    sources.push_back(std::make_unique<PathSource>(cfg.path_kind, seed, cfg.path_step, cfg.t_min, cfg.t_max, cfg.cache_dir, cfg.max_nodes));

  struct Task {
    std::size_t source;
    DiagramRow row;
  };
  std::vector<Task> tasks;
  for (double lam : cfg.lambdas)
    for (double tau : cfg.taus)
      for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        DiagramRow r;
        r.lambda = lam;
        r.tau = tau;
        r.seed = cfg.seeds[s];
        tasks.push_back({s, r});
      }

  auto run_one = [&](Task& task) {
    try {
      if (cfg.scenario == Scenario::pitchfork) detail::pitchfork_row(cfg, d.bounds, *sources[task.source], task.row);
      else detail::transcritical_row(cfg, d.bounds, *sources[task.source], task.row);
    } catch (const Error& e) {
      task.row.status = std::string(to_string(e.kind()));
      task.row.message = e.what();
    }
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    for (auto& t : tasks) run_one(t);
  } else {
    for (std::size_t i = 0; i < tasks.size(); i += static_cast<std::size_t>(threads)) {
      std::vector<std::future<void>> batch;
      for (std::size_t j = i; j < std::min(tasks.size(), i + static_cast<std::size_t>(threads)); ++j)
        batch.push_back(std::async(std::launch::async, [&, j] { run_one(tasks[j]); }));
      for (auto& f : batch) f.get();
    }
  }
  for (auto& t : tasks) d.rows.push_back(std::move(t.row));
  return d;
}

inline BifurcationDiagram pitchfork_sweep(SweepConfig cfg) {
  cfg.scenario = Scenario::pitchfork;
  return run_sweep(cfg);
}

inline BifurcationDiagram transcritical_sweep(SweepConfig cfg) {
  cfg.scenario = Scenario::transcritical;
  return run_sweep(cfg);
}

struct RecurrenceOptions {
  double tau0 = 0.0;
  double dtau = 2.0 * std::numbers::pi / 64.0;
  double span = 6.0 * std::numbers::pi;
  double period_tol = 1e-6;
  double scan_eps = 0.05;
  double scan_window = 200.0;
  double scan_density = 10.0;
  double probe_tol = 0.05;
  std::vector<double> probes{0.0, 1.0, std::numbers::sqrt2};
  std::vector<double> sequence;  ///< defaults to 2 pi n, n = 1..64
};

struct RecurrenceReport {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string branch;
  std::string beta_class;
  std::string test;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string status = "ok";
  std::string message;
};

/// Checks that each nontrivial closed-form branch inherits the recurrence class of beta:
/// periodic -> period test, quasi-periodic -> almost-period scan, almost automorphic -> two-sided probe.
inline std::vector<RecurrenceReport> recurrence_sweep(const SweepConfig& cfg, const RecurrenceOptions& opt = {}) {
  require(cfg.gamma.is_zero(), ErrorKind::configuration, "recurrence sweep works on the closed-form branches (gamma = 0)");
  std::vector<RecurrenceReport> out;
  std::vector<double> seq = opt.sequence;
  if (seq.empty())
    for (int n = 1; n <= 64; ++n) seq.push_back(2.0 * std::numbers::pi * n);
  for (auto seed : cfg.seeds) {
    PathSource src(cfg.path_kind, seed, cfg.path_step, cfg.t_min, cfg.t_max, cfg.cache_dir, cfg.max_nodes);
    for (double lam : cfg.lambdas) {
      RecurrenceReport rep;
      rep.lambda = lam;
      rep.seed = seed;
      rep.beta_class = std::string(to_string(cfg.beta.kind()));
      rep.branch = cfg.scenario == Scenario::pitchfork ? "x_plus" : "x_lambda";
      try {
        const bool pf = cfg.scenario == Scenario::pitchfork;
        if (pf ? lam <= 0.0 : lam == 0.0) {
          rep.status = "trivial";
          rep.message = "only the zero solution, which is trivially recurrent";
          rep.pass = true;
          out.push_back(rep);
          continue;
        }
        const Side side = (pf || lam > 0) ? Side::negative : Side::positive;
        std::function<double(double)> branch;
        detail::with_extension(src, cfg, side, [&](const WienerPath& w) {
          const Coefficients c{lam, cfg.delta, cfg.beta};
          if (pf) {
            auto b = std::make_shared<PitchforkBranches>(c, w, cfg.quadrature);
            branch = [b](double tau) { return (*b)(tau).plus; };
          } else {
            auto b = std::make_shared<TranscriticalBranch>(c, w, cfg.quadrature);
            branch = [b](double tau) { return (*b)(tau).value; };
          }
        });
        switch (cfg.beta.kind()) {
          case BetaKind::constant:
          case BetaKind::periodic: {
            const double period = cfg.beta.kind() == BetaKind::periodic ? cfg.beta.period() : opt.dtau;
            const double dtau = cfg.beta.kind() == BetaKind::periodic ? period / std::round(period / opt.dtau) : opt.dtau;
            const auto n = static_cast<std::size_t>(std::ceil(std::max(opt.span, 3.0 * period) / dtau)) + 1;
            const auto tr = make_trace(branch, opt.tau0, dtau, n, rep.branch);
            const PeriodReport pr = detect_period(tr, period, opt.period_tol);
            rep.test = "period";
            rep.residual = pr.residual;
            rep.tol = opt.period_tol;
            rep.pass = pr.pass;
            break;
          }
          case BetaKind::quasi_periodic: {
            const double dtau = 0.05;
            const auto n = static_cast<std::size_t>(std::ceil((opt.scan_window + 6.0 * opt.scan_density) / dtau)) + 1;
            const auto tr = make_trace(branch, opt.tau0, dtau, n, rep.branch);
            const AlmostPeriodScan sc = almost_period_scan(tr, opt.scan_eps, opt.scan_window, opt.scan_density);
            rep.test = "almost_period_scan";
            rep.residual = sc.max_gap;
            rep.tol = opt.scan_density;
            rep.pass = sc.pass;
            break;
          }
          case BetaKind::almost_automorphic:
          case BetaKind::custom: {
            const AutomorphyReport ar = automorphy_probe(branch, seq, opt.probe_tol, opt.probes);
            rep.test = "automorphy_probe";
            rep.residual = std::max(ar.forward_residual, ar.backward_residual);
            rep.tol = opt.probe_tol;
            rep.pass = ar.verdict == ProbeVerdict::pass;
            if (ar.verdict == ProbeVerdict::inconclusive) rep.status = "inconclusive";
            break;
          }
        }
      } catch (const Error& e) {
        rep.status = std::string(to_string(e.kind()));
        rep.message = e.what();
        rep.pass = false;
      }
      out.push_back(rep);
    }
  }
  return out;
}

}  // namespace pbl
