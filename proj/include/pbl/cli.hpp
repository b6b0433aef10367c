#pragma once

/// Command-line front end. Needs CLI11, nlohmann/json and OpenSSL (SHA-256 for the manifest).

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbl/config.hpp"
#include "pbl/io.hpp"

namespace pbl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, computation_error = 1, config_error = 2 };

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) fail(ErrorKind::io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

/// Collects artifacts of one invocation, then writes manifest.json (deterministic) and timing.json.
class Output {
 public:
  Output(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)), start_(std::chrono::steady_clock::now()) {
    fs::create_directories(dir_);
  }

  void text(const std::string& name, const std::string& content) {
    io::write_text(dir_ / name, content);
    artifacts_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  void finish(const json& config) {
    std::sort(artifacts_.begin(), artifacts_.end(), [](const json& a, const json& b) { return a["file"] < b["file"]; });
    const std::string canon = config.dump();
    const json manifest = {{"tool", "pbl"},
                           {"version", kVersion},
                           {"command", command_},
                           {"config", config},
                           {"config_hash", sha256_hex(canon)},
                           {"artifacts", artifacts_}};
    io::write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    io::write_text(dir_ / "timing.json", json{{"command", command_}, {"wall_seconds", secs}}.dump(2) + "\n");
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::vector<json> artifacts_;
};

/// Options shared by the subcommands; strings are parsed after CLI11 so errors map to exit code 2.
struct Common {
  std::string config_file;
  std::string beta = "periodic:2,1,6.283185307179586";
  std::string gamma = "zero";
  std::string lambdas;
  std::string seeds = "7";
  std::string taus;
  double delta = 0.5;
  double t_min = -200, t_max = 50, step = 1e-3, rel_tol = 1e-8;
  std::string schedule = "5,10,20,40";
  double integrator_step = 1e-3;
  bool zero_path = false;
  bool no_stability = false;
  int threads = 1;
  std::string out = "out";
  std::string path_cache;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, bool with_lambda_grid) {
    app = sub;
    sub->add_option("--config", config_file, "JSON experiment file (flags override it)");
    sub->add_option("--beta", beta, "beta descriptor, e.g. periodic:2,1,6.2831853");
    sub->add_option("--gamma", gamma, "gamma descriptor: zero | cubic:mean[,amp[,freq]] | quadratic:...");
    sub->add_option("--delta", delta, "noise intensity");
    if (with_lambda_grid) sub->add_option("--lambda-grid", lambdas, "comma separated lambda values");
    sub->add_option("--seed,--seeds", seeds, "comma separated seeds");
    sub->add_option("--tau", taus, "comma separated tau values");
    sub->add_option("--t-min", t_min, "path grid lower bound");
    sub->add_option("--t-max", t_max, "path grid upper bound");
    sub->add_option("--step", step, "path grid step");
    sub->add_option("--rel-tol", rel_tol, "relative tolerance of the improper integrals");
    sub->add_option("--schedule", schedule, "base pullback schedule");
    sub->add_option("--integrator-step", integrator_step, "Stratonovich-Heun step");
    sub->add_flag("--zero-path", zero_path, "use w = 0 instead of a Brownian path");
    sub->add_flag("--no-stability", no_stability, "skip the stability probe");
    sub->add_option("--threads", threads, "worker threads for sweeps");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--path-cache", path_cache, "directory for cached sample paths (env PBL_PATH_CACHE)");
  }

  bool given(const char* flag) const { return app->count(flag) > 0; }

  /// File values first, then explicitly given flags, then flag defaults for anything still unset.
  SweepConfig build(Scenario scenario) const {
    SweepConfig cfg;
    cfg.scenario = scenario;
    cfg.beta = config::parse_beta(beta);
    cfg.gamma = config::parse_gamma(gamma);
    cfg.delta = delta;
    cfg.t_min = t_min;
    cfg.t_max = t_max;
    cfg.path_step = step;
    cfg.quadrature.rel_tol = rel_tol;
    cfg.base_schedule = config::detail::parse_list(schedule, "--schedule");
    cfg.integrator_step = integrator_step;
    cfg.threads = threads;
    cfg.seeds = parse_seeds(seeds);
    cfg.taus = {0.0};
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) fail(ErrorKind::configuration, "cannot read config file " + config_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        fail(ErrorKind::configuration, std::string("config file is not valid JSON: ") + e.what());
      }
      config::apply_json(j, cfg);
    }
    if (given("--beta")) cfg.beta = config::parse_beta(beta);
    if (given("--gamma")) cfg.gamma = config::parse_gamma(gamma);
    if (given("--delta")) cfg.delta = delta;
    if (!lambdas.empty()) cfg.lambdas = config::detail::parse_list(lambdas, "--lambda-grid");
    if (given("--seed")) cfg.seeds = parse_seeds(seeds);
    if (!taus.empty()) cfg.taus = config::detail::parse_list(taus, "--tau");
    if (given("--t-min")) cfg.t_min = t_min;
    if (given("--t-max")) cfg.t_max = t_max;
    if (given("--step")) cfg.path_step = step;
    if (given("--rel-tol")) cfg.quadrature.rel_tol = rel_tol;
    if (given("--schedule")) cfg.base_schedule = config::detail::parse_list(schedule, "--schedule");
    if (given("--integrator-step")) cfg.integrator_step = integrator_step;
    if (zero_path) cfg.path_kind = PathKind::zero;
    if (no_stability) cfg.stability = false;
    if (given("--threads")) cfg.threads = threads;
    std::string cache = path_cache;
    if (cache.empty())
      if (const char* env = std::getenv("PBL_PATH_CACHE")) cache = env;
    if (!cache.empty()) cfg.cache_dir = fs::path(cache);
    return cfg;
  }

  static std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    for (double v : config::detail::parse_list(s, "--seed")) {
      if (v < 0 || v != std::floor(v)) fail(ErrorKind::configuration, "seeds must be nonnegative integers");
      out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
  }
};

inline WienerPath path_for(const SweepConfig& cfg, std::uint64_t seed) {
  const auto grid = TimeGrid::from_bounds(cfg.t_min, cfg.t_max, cfg.path_step);
  if (cfg.path_kind == PathKind::zero) return zero_path(grid);
  return sample_path_cached(seed, grid, cfg.cache_dir);
}

inline bool row_failed(const DiagramRow& r) {
  return r.status != "ok" && r.status != "degenerate" && r.status != "not_converged";
}

inline int run_sweep_command(const Common& c, Scenario scenario, const std::string& name) {
  SweepConfig cfg = c.build(scenario);
  if (cfg.lambdas.empty()) cfg.lambdas = {-1.0, -0.1, 0.1, 1.0};
  config::validate(cfg);
  const BifurcationDiagram d = run_sweep(cfg);
  Output out(c.out, name);
  out.text("diagram.csv", io::render([&](std::ostream& os) { io::write_diagram_csv(os, d); }));
  out.text("diagram.dat", io::render([&](std::ostream& os) { io::write_diagram_gnuplot(os, d); }));
  out.json_file("diagram.json", io::to_json(d));
  out.finish(config::canonical(cfg));
  bool failed = false;
  for (const auto& r : d.rows) {
    std::cout << io::num(r.lambda) << " seed " << r.seed << " tau " << io::num(r.tau) << ": x+ " << io::num(r.x_plus)
              << " x- " << io::num(r.x_minus) << " [" << r.stability << "] " << r.status << '\n';
    failed = failed || row_failed(r);
  }
  return failed ? computation_error : ok;
}

struct VerifyOptions {
  std::string variant = "pitchfork";
  std::string handle = "both";
  double lambda = 1.0;
  std::string ts = "1,2,5";
  std::string ss = "0.5,1";
  std::string xs = "-1,0.5,2";
  std::string taus = "-3,0,3";
  double tol_closed = 1e-6;
  double tol_integrator = -1;
};

inline int run_verify(const Common& c, const VerifyOptions& v) {
  SweepConfig cfg = c.build(v.variant == "transcritical" ? Scenario::transcritical : Scenario::pitchfork);
  cfg.lambdas = {v.lambda};
  if (v.variant != "pitchfork" && v.variant != "transcritical" && v.variant != "linear")
    fail(ErrorKind::configuration, "variant must be pitchfork, transcritical or linear");
  if (v.handle != "closed_form" && v.handle != "integrator" && v.handle != "both")
    fail(ErrorKind::configuration, "handle must be closed_form, integrator or both");
  config::validate(cfg);
  const auto ts = config::detail::parse_list(v.ts, "--t");
  const auto ss = config::detail::parse_list(v.ss, "--s");
  const auto xs = config::detail::parse_list(v.xs, "--x");
  const auto taus = c.taus.empty() ? config::detail::parse_list(v.taus, "--tau") : cfg.taus;
  const double tol_int = v.tol_integrator > 0 ? v.tol_integrator : 5e-2 * cfg.integrator_step / 1e-3;
  const Coefficients co{v.lambda, cfg.delta, cfg.beta};
  const auto env = LinearEnvelopeData::constant(1.0, young_constant(v.lambda, cfg.beta.lower(), 0.0));

  std::vector<std::pair<Cocycle, double>> handles;
  const bool closed = v.handle != "integrator", integ = v.handle != "closed_form";
  if (closed) {
    if (v.variant == "pitchfork") handles.emplace_back(closed_form_pitchfork(co), v.tol_closed);
    else if (v.variant == "transcritical") handles.emplace_back(closed_form_transcritical(co), v.tol_closed);
    else handles.emplace_back(closed_form_linear(cfg.delta, env), v.tol_closed);
  }
  if (integ) {
    DriftSpec d = v.variant == "pitchfork"       ? DriftSpec::pitchfork(co, cfg.gamma)
                  : v.variant == "transcritical" ? DriftSpec::transcritical(co, cfg.gamma)
                                                 : DriftSpec::linear(cfg.delta, env);
    handles.emplace_back(integrator_cocycle(d, cfg.integrator_step), tol_int);
  }

  json reports = json::array();
  bool all = true;
  for (auto seed : cfg.seeds) {
    const WienerPath w = path_for(cfg, seed);
    QuasiSolution xi;
    if (v.variant == "pitchfork" && v.lambda > 0 && cfg.gamma.is_zero())
      xi = [&](double tau, const WienerPath& p) { return quasi_pitchfork(co, p, tau, cfg.quadrature).plus; };
    else if (v.variant == "transcritical" && v.lambda != 0 && cfg.gamma.is_zero())
      xi = [&](double tau, const WienerPath& p) { return quasi_transcritical(co, p, tau, cfg.quadrature).value; };
    else if (v.variant == "linear")
      xi = [&](double tau, const WienerPath& p) { return linear_xi(cfg.delta, env, p, tau, cfg.quadrature).value; };
    for (const auto& [phi, tol] : handles) {
      for (double tau : taus)
        for (double t : ts)
          for (double s : ss)
            for (double x : xs) {
              if (v.variant == "transcritical" && x < 0) continue;
              auto rep = check_cocycle_law(phi, w, tau, t, s, x, tol);
              rep.check = "cocycle_law:" + phi.name();
              all = all && rep.pass;
              reports.push_back(io::to_json(rep));
            }
      if (xi) {
        std::vector<std::pair<double, double>> samples;
        for (double t : ts)
          for (double tau : taus) samples.emplace_back(t, tau);
        auto rep = check_quasi_solution(phi, xi, w, samples, tol);
        rep.check = "quasi_solution:" + phi.name();
        all = all && rep.pass;
        reports.push_back(io::to_json(rep));
      }
    }
  }
  Output out(c.out, "verify-cocycle");
  out.json_file("cocycle_report.json", {{"variant", v.variant}, {"lambda", v.lambda}, {"reports", reports}});
  json canon = config::canonical(cfg);
  canon["verify"] = {{"variant", v.variant}, {"handle", v.handle}, {"t", ts}, {"s", ss}, {"x", xs}, {"taus", taus},
                     {"tol_closed", v.tol_closed}, {"tol_integrator", tol_int}};
  out.finish(canon);
  std::cout << reports.size() << " checks, " << (all ? "all passed" : "FAILURES present") << '\n';
  return all ? ok : computation_error;
}

inline int run_attractor(const Common& c, double lambda) {
  SweepConfig cfg = c.build(Scenario::pitchfork);
  cfg.lambdas = {lambda};
  config::validate(cfg);
  const auto bounds = validate_pairing(cfg.beta, cfg.gamma, Variant::pitchfork);
  const Coefficients co{lambda, cfg.delta, cfg.beta};
  const Cocycle phi = cfg.gamma.is_zero() ? closed_form_pitchfork(co)
                                          : integrator_cocycle(DriftSpec::pitchfork(co, cfg.gamma), cfg.integrator_step);
  const auto env = pitchfork_envelope(lambda, bounds);
  json rows = json::array();
  bool all = true;
  for (auto seed : cfg.seeds) {
    PathSource src(cfg.path_kind, seed, cfg.path_step, cfg.t_min, cfg.t_max, cfg.cache_dir, cfg.max_nodes);
    detail::cover_pullbacks(src, cfg.base_schedule.back());
    const WienerPath w = src.path();
    for (double tau : cfg.taus) {
      json row = {{"seed", seed}, {"tau", tau}};
      try {
        AttractorOptions opt;
        opt.schedule = cfg.base_schedule;
        opt.tol = cfg.pullback_tol;
        opt.quadrature = cfg.quadrature;
        opt.require_convergence = false;
        const AttractorInterval a = attractor_endpoints(phi, cfg.delta, env, w, tau, opt);
        row["interval"] = io::to_json(a);
        if (lambda > 0) {
          const auto sw = sandwich_bounds(lambda, cfg.delta, bounds, w, cfg.quadrature);
          const bool inside = std::abs(a.upper) >= sw.lower - 1e-3 && std::abs(a.upper) <= sw.upper + 1e-3 &&
                              std::abs(a.lower) >= sw.lower - 1e-3 && std::abs(a.lower) <= sw.upper + 1e-3;
          row["sandwich"] = {{"lower", sw.lower}, {"upper", sw.upper}, {"inside", inside}};
        }
        row["status"] = a.converged ? "ok" : "not_converged";
      } catch (const Error& e) {
        row["status"] = std::string(to_string(e.kind()));
        row["message"] = e.what();
        all = false;
      }
      rows.push_back(row);
    }
  }
  Output out(c.out, "attractor");
  out.json_file("attractor.json", {{"lambda", lambda}, {"handle", phi.name()}, {"rows", rows}});
  out.finish(config::canonical(cfg));
  std::cout << rows.dump(2) << '\n';
  return all ? ok : computation_error;
}

struct RecurrenceCli {
  double lambda = 0.5;
  std::string scenario = "pitchfork";
  double eps = 0.05, window = 200, density = 10, probe_tol = 0.05, period_tol = 1e-6;
};

inline int run_recurrence(const Common& c, const RecurrenceCli& r) {
  if (r.scenario != "pitchfork" && r.scenario != "transcritical") fail(ErrorKind::configuration, "scenario must be pitchfork or transcritical");
  SweepConfig cfg = c.build(r.scenario == "pitchfork" ? Scenario::pitchfork : Scenario::transcritical);
  cfg.lambdas = {r.lambda};
  config::validate(cfg);
  RecurrenceOptions opt;
  opt.scan_eps = r.eps;
  opt.scan_window = r.window;
  opt.scan_density = r.density;
  opt.probe_tol = r.probe_tol;
  opt.period_tol = r.period_tol;
  const auto reports = recurrence_sweep(cfg, opt);
  Output out(c.out, "recurrence");
  json arr = json::array();
  bool all = true;
  for (const auto& rep : reports) {
    arr.push_back(io::to_json(rep));
    all = all && rep.pass;
  }
  // Trace of the branch on the first seed for plotting.
  {
    const WienerPath w = path_for(cfg, cfg.seeds.front());
    const Coefficients co{r.lambda, cfg.delta, cfg.beta};
    if ((r.scenario == "pitchfork" && r.lambda > 0) || (r.scenario == "transcritical" && r.lambda != 0)) {
      std::function<double(double)> branch;
      if (r.scenario == "pitchfork") {
        auto b = std::make_shared<PitchforkBranches>(co, w, cfg.quadrature);
        branch = [b](double tau) { return (*b)(tau).plus; };
      } else {
        auto b = std::make_shared<TranscriticalBranch>(co, w, cfg.quadrature);
        branch = [b](double tau) { return (*b)(tau).value; };
      }
      const double dtau = cfg.beta.kind() == BetaKind::quasi_periodic ? 0.05 : opt.dtau;
      const double span = cfg.beta.kind() == BetaKind::quasi_periodic ? r.window + r.density : opt.span;
      const auto tr = make_trace(branch, 0.0, dtau, static_cast<std::size_t>(std::ceil(span / dtau)) + 1, "branch");
      out.text("trace.csv", io::render([&](std::ostream& os) { io::write_trace_csv(os, tr); }));
      if (cfg.beta.kind() == BetaKind::quasi_periodic) {
        const auto sc = almost_period_scan(tr, r.eps, r.window, r.density);
        out.text("scan.csv", io::render([&](std::ostream& os) { io::write_scan_csv(os, sc); }));
      }
    }
  }
  out.json_file("recurrence.json", {{"reports", arr}});
  json canon = config::canonical(cfg);
  canon["recurrence"] = {{"eps", r.eps}, {"window", r.window}, {"density", r.density}, {"probe_tol", r.probe_tol},
                         {"period_tol", r.period_tol}};
  out.finish(canon);
  std::cout << arr.dump(2) << '\n';
  return all ? ok : computation_error;
}

struct IntegrateCli {
  std::string family = "pitchfork";
  double lambda = 1.0, tau = 0.0, t_end = 5.0, x0 = 0.5;
};

inline int run_integrate(const Common& c, const IntegrateCli& a) {
  SweepConfig cfg = c.build(a.family == "transcritical" ? Scenario::transcritical : Scenario::pitchfork);
  cfg.lambdas = {a.lambda};
  config::validate(cfg);
  const Coefficients co{a.lambda, cfg.delta, cfg.beta};
  DriftSpec d;
  if (a.family == "pitchfork") d = DriftSpec::pitchfork(co, cfg.gamma);
  else if (a.family == "transcritical") d = DriftSpec::transcritical(co, cfg.gamma);
  else if (a.family == "linear") d = DriftSpec::linear(cfg.delta, pitchfork_envelope(a.lambda, validate_pairing(cfg.beta, cfg.gamma)));
  else fail(ErrorKind::configuration, "family must be pitchfork, transcritical or linear");
  const WienerPath w = path_for(cfg, cfg.seeds.front());
  const Trajectory tr = integrate(d, w, a.tau, a.t_end, a.x0, cfg.integrator_step);
  Output out(c.out, "integrate");
  out.text("trajectory.csv", io::render([&](std::ostream& os) { write_trajectory_csv(os, tr); }));
  json summary = {{"status", tr.blew_up() ? "blew_up" : "complete"}, {"final_state", io::jnum(tr.final_state())},
                  {"blow_up_time", io::jnum(tr.blow_up_time)}};
  out.json_file("integrate.json", summary);
  json canon = config::canonical(cfg);
  canon["integrate"] = {{"family", a.family}, {"lambda", a.lambda}, {"tau", a.tau}, {"t_end", a.t_end}, {"x0", a.x0}};
  out.finish(canon);
  std::cout << summary.dump() << '\n';
  return ok;
}

/// Oracle battery with known answers; artifacts are byte-identical across runs.
inline int run_selftest(const std::string& dir) {
  struct Row {
    std::string name;
    double value, expected, tol;
  };
  std::vector<Row> rows;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); };
  {
    const WienerPath w0 = zero_path(TimeGrid::from_bounds(-120, 10, 2e-5));
    for (double lam : {0.1, 1.0, 4.0})
      for (double b : {1.0, 4.0}) {
        const Coefficients c{lam, 0.0, BetaFn::constant(b)};
        rows.push_back({"quasi_pitchfork_w0_l" + io::num(lam) + "_b" + io::num(b), quasi_pitchfork(c, w0, 0.0).plus,
                        std::sqrt(lam / b), 1e-8});
      }
  }
  {
    // slow decay at lambda = 0.1 needs a truncation near 200
    const WienerPath w0 = zero_path(TimeGrid::from_bounds(-250, 250, 1e-4));
    for (double lam : {-1.0, -0.1, 0.1, 1.0}) {
      const Coefficients c{lam, 0.0, BetaFn::constant(2.0)};
      rows.push_back({"quasi_transcritical_w0_l" + io::num(lam), quasi_transcritical(c, w0, 0.0).value, lam / 2.0, 1e-8});
    }
  }
  {
    const WienerPath w0 = zero_path(TimeGrid::from_bounds(-10, 10, 1e-3));
    const auto env = LinearEnvelopeData::constant(1.0, 0.0);
    rows.push_back({"linear_decay", linear_solution(0.0, env, w0, 0.0, 1.0, 2.0), 2.0 * std::exp(-1.0), 1e-12});
    const Coefficients c{1.0, 0.5, BetaFn::periodic(2, 1, 2 * std::numbers::pi)};
    rows.push_back({"pitchfork_identity", exact_pitchfork(c, w0, 0.0, 0.0, 0.7), 0.7, 0.0});
    rows.push_back({"pitchfork_zero_fixed", exact_pitchfork(c, w0, 0.0, 5.0, 0.0), 0.0, 0.0});
  }
  {
    const WienerPath w = sample_path(7, TimeGrid::from_bounds(-200, 50, 1e-3));
    const Coefficients c{1.0, 0.5, BetaFn::periodic(2, 1, 2 * std::numbers::pi)};
    const auto law = check_cocycle_law(closed_form_pitchfork(c), w, 0.0, 2.0, 1.0, 0.8, 1e-10);
    rows.push_back({"cocycle_law_seed7", law.residual, 0.0, 1e-10});
    rows.push_back({"path_origin", w.node(0), 0.0, 0.0});
  }
  bool all = true;
  json checks = json::array();
  std::ostringstream csv;
  csv << "name,value,expected,residual,tol,verdict\n";
  for (const auto& r : rows) {
    const double res = r.expected == 0.0 ? std::abs(r.value) : rel(r.value, r.expected);
    const bool pass = res <= r.tol;
    all = all && pass;
    checks.push_back({{"check", r.name}, {"params", json::object()}, {"residual", res}, {"verdict", pass ? "pass" : "fail"},
                      {"tolerances", {{"residual", r.tol}}}});
    csv << r.name << ',' << io::num(r.value) << ',' << io::num(r.expected) << ',' << io::num(res) << ',' << io::num(r.tol) << ','
        << (pass ? "pass" : "fail") << '\n';
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << r.name << " residual " << io::num(res) << '\n';
  }
  Output out(dir, "selftest");
  out.text("selftest.csv", csv.str());
  out.json_file("selftest.json", {{"checks", checks}, {"all_passed", all}});
  out.finish({{"selftest", kVersion}});
  return all ? ok : computation_error;
}

inline int run(int argc, char** argv) {
  CLI::App app{"pullback attractors and bifurcations of scalar Stratonovich equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common pf, tc, vc, at, rc, ig;
  auto* s_pf = app.add_subcommand("pitchfork-sweep", "pitchfork bifurcation diagram over a lambda grid");
  pf.attach(s_pf, true);
  auto* s_tc = app.add_subcommand("transcritical-sweep", "transcritical bifurcation diagram over a lambda grid");
  tc.attach(s_tc, true);

  VerifyOptions vo;
  auto* s_vc = app.add_subcommand("verify-cocycle", "cocycle law and quasi-solution identity checks");
  vc.attach(s_vc, false);
  s_vc->add_option("--variant", vo.variant, "pitchfork | transcritical | linear");
  s_vc->add_option("--handle", vo.handle, "closed_form | integrator | both");
  s_vc->add_option("--lambda", vo.lambda, "growth rate");
  s_vc->add_option("--t", vo.ts, "comma separated t values");
  s_vc->add_option("--s", vo.ss, "comma separated s values");
  s_vc->add_option("--x", vo.xs, "comma separated initial data");
  s_vc->add_option("--tol", vo.tol_closed, "tolerance for closed-form handles");
  s_vc->add_option("--tol-integrator", vo.tol_integrator, "tolerance for integrator handles");

  double at_lambda = 1.0;
  auto* s_at = app.add_subcommand("attractor", "attractor endpoints of the general pitchfork");
  at.attach(s_at, false);
  s_at->add_option("--lambda", at_lambda, "growth rate");

  RecurrenceCli ro;
  auto* s_rc = app.add_subcommand("recurrence", "recurrence tests of the nontrivial branch");
  rc.attach(s_rc, false);
  s_rc->add_option("--lambda", ro.lambda, "growth rate");
  s_rc->add_option("--scenario", ro.scenario, "pitchfork | transcritical");
  s_rc->add_option("--eps", ro.eps, "almost-period tolerance");
  s_rc->add_option("--window", ro.window, "almost-period window length");
  s_rc->add_option("--density", ro.density, "required density of almost periods");
  s_rc->add_option("--probe-tol", ro.probe_tol, "automorphy probe tolerance");
  s_rc->add_option("--period-tol", ro.period_tol, "period test tolerance");

  IntegrateCli io_;
  auto* s_ig = app.add_subcommand("integrate", "single Stratonovich-Heun trajectory");
  ig.attach(s_ig, false);
  s_ig->add_option("--family", io_.family, "pitchfork | transcritical | linear");
  s_ig->add_option("--lambda", io_.lambda, "growth rate");
  s_ig->add_option("--tau0", io_.tau, "initial time");
  s_ig->add_option("--t-end", io_.t_end, "final time");
  s_ig->add_option("--x0", io_.x0, "initial state");

  std::string st_out = "selftest_out";
  auto* s_st = app.add_subcommand("selftest", "known-answer battery with deterministic artifacts");
  s_st->add_option("--out", st_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }
  try {
    if (*s_pf) return run_sweep_command(pf, Scenario::pitchfork, "pitchfork-sweep");
    if (*s_tc) return run_sweep_command(tc, Scenario::transcritical, "transcritical-sweep");
    if (*s_vc) return run_verify(vc, vo);
    if (*s_at) return run_attractor(at, at_lambda);
    if (*s_rc) return run_recurrence(rc, ro);
    if (*s_ig) return run_integrate(ig, io_);
    if (*s_st) return run_selftest(st_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_configuration() ? config_error : computation_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return computation_error;
  }
  return config_error;
}

}  // namespace pbl::cli
