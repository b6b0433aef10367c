#pragma once

/// Experiment configuration: JSON descriptors, compact flag syntax, validation, canonical form.

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbl/bifurcation.hpp"

namespace pbl::config {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorKind::configuration, what); }

inline void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
}

inline double number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) bad(where + " is missing '" + key + "'");
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) bad(where + "." + key + " must be finite");
  return v;
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j, key, where) : fallback;
}

inline std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) bad(where + " must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      bad("cannot parse '" + item + "' in " + where);
    }
  }
  if (out.empty()) bad(where + " is empty");
  return out;
}

}  // namespace detail

/// Table of values on [0, period) with linear interpolation and periodic extension.
inline BetaFn tabulated_beta(std::vector<double> values, double period, double beta_0, double beta_1) {
  if (values.size() < 2) detail::bad("custom beta needs at least two tabulated values");
  if (!(period > 0.0)) detail::bad("custom beta needs a positive period");
  auto fn = [values, period](double t) {
    const double u = t / period - std::floor(t / period);
    const double q = u * static_cast<double>(values.size());
    const auto i = static_cast<std::size_t>(q) % values.size();
    const double w = q - std::floor(q);
    return (1.0 - w) * values[i] + w * values[(i + 1) % values.size()];
  };
  return BetaFn::custom(fn, beta_0, beta_1, 0.0, period, 4 * static_cast<int>(values.size()) + 1);
}

inline BetaFn beta_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) detail::bad("beta descriptor needs a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    detail::only_keys(j, {"kind", "b"}, "beta");
    return BetaFn::constant(detail::number(j, "b", "beta"));
  }
  if (kind == "periodic") {
    detail::only_keys(j, {"kind", "a", "b", "T"}, "beta");
    return BetaFn::periodic(detail::number(j, "a", "beta"), detail::number(j, "b", "beta"), detail::number(j, "T", "beta"));
  }
  if (kind == "quasi_periodic") {
    detail::only_keys(j, {"kind", "a", "b", "c"}, "beta");
    return BetaFn::quasi_periodic(detail::number(j, "a", "beta"), detail::number(j, "b", "beta"), detail::number(j, "c", "beta"));
  }
  if (kind == "almost_automorphic") {
    detail::only_keys(j, {"kind", "a", "b"}, "beta");
    return BetaFn::almost_automorphic(detail::number(j, "a", "beta"), detail::number(j, "b", "beta"));
  }
  if (kind == "custom") {
    detail::only_keys(j, {"kind", "values", "period", "beta_0", "beta_1"}, "beta");
    if (!j.contains("values")) detail::bad("custom beta needs 'values'");
    return tabulated_beta(detail::numbers(j.at("values"), "beta.values"), detail::number(j, "period", "beta"),
                          detail::number(j, "beta_0", "beta"), detail::number(j, "beta_1", "beta"));
  }
  detail::bad("unknown beta kind '" + kind + "'");
}

inline GammaFn gamma_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) detail::bad("gamma descriptor needs a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero") {
    detail::only_keys(j, {"kind"}, "gamma");
    return GammaFn::zero();
  }
  if (kind == "cubic_profile" || kind == "quadratic_profile") {
    detail::only_keys(j, {"kind", "mean", "amplitude", "frequency"}, "gamma");
    const Profile p{detail::number(j, "mean", "gamma"), detail::number_or(j, "amplitude", 0.0, "gamma"),
                    detail::number_or(j, "frequency", 1.0, "gamma")};
    return kind == "cubic_profile" ? GammaFn::cubic_profile(p) : GammaFn::quadratic_profile(p);
  }
  if (kind == "custom") detail::bad("custom gamma is only available through the library API");
  detail::bad("unknown gamma kind '" + kind + "'");
}

inline json to_json(const BetaFn& b) {
  switch (b.kind()) {
    case BetaKind::constant: return {{"kind", "constant"}, {"b", b.a()}};
    case BetaKind::periodic: return {{"kind", "periodic"}, {"a", b.a()}, {"b", b.b()}, {"T", b.period()}};
    case BetaKind::quasi_periodic: return {{"kind", "quasi_periodic"}, {"a", b.a()}, {"b", b.b()}, {"c", b.c()}};
    case BetaKind::almost_automorphic: return {{"kind", "almost_automorphic"}, {"a", b.a()}, {"b", b.b()}};
    case BetaKind::custom: return {{"kind", "custom"}, {"beta_0", b.lower()}, {"beta_1", b.upper()}};
  }
  return {};
}

inline json to_json(const GammaFn& g) {
  switch (g.kind()) {
    case GammaKind::zero: return {{"kind", "zero"}};
    case GammaKind::cubic_profile:
    case GammaKind::quadratic_profile:
      return {{"kind", std::string(to_string(g.kind()))},
              {"mean", g.profile().mean},
              {"amplitude", g.profile().amplitude},
              {"frequency", g.profile().frequency}};
    case GammaKind::custom: return {{"kind", "custom"}, {"c1", g.c1()}, {"c2", g.c2()}};
  }
  return {};
}

/// "periodic:2,1,6.2831853", "constant:2", "quasi_periodic:3,1,1", "almost_automorphic:3,1".
inline BetaFn parse_beta(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (colon == std::string::npos) detail::bad("beta descriptor '" + text + "' needs kind:params");
  const auto p = detail::parse_list(text.substr(colon + 1), "--beta");
  auto want = [&](std::size_t n) {
    if (p.size() != n) detail::bad("beta kind " + kind + " takes " + std::to_string(n) + " parameters");
  };
  if (kind == "constant") return want(1), BetaFn::constant(p[0]);
  if (kind == "periodic") return want(3), BetaFn::periodic(p[0], p[1], p[2]);
  if (kind == "quasi_periodic") return want(3), BetaFn::quasi_periodic(p[0], p[1], p[2]);
  if (kind == "almost_automorphic") return want(2), BetaFn::almost_automorphic(p[0], p[1]);
  detail::bad("unknown beta kind '" + kind + "'");
}

/// "zero", "cubic:mean[,amplitude[,frequency]]", "quadratic:mean[,amplitude[,frequency]]".
inline GammaFn parse_gamma(const std::string& text) {
  if (text == "zero") return GammaFn::zero();
  const auto colon = text.find(':');
  if (colon == std::string::npos) detail::bad("gamma descriptor '" + text + "' needs kind:params");
  const std::string kind = text.substr(0, colon);
  const auto p = detail::parse_list(text.substr(colon + 1), "--gamma");
  if (p.size() > 3) detail::bad("gamma takes at most three parameters");
  const Profile prof{p[0], p.size() > 1 ? p[1] : 0.0, p.size() > 2 ? p[2] : 1.0};
  if (kind == "cubic") return GammaFn::cubic_profile(prof);
  if (kind == "quadratic") return GammaFn::quadratic_profile(prof);
  detail::bad("unknown gamma kind '" + kind + "'");
}

/// Keys accepted at the top level of an experiment file; docs/config.schema.json mirrors this.
inline const std::set<std::string>& experiment_keys() {
  static const std::set<std::string> k{"scenario", "coefficients", "delta",     "lambdas",         "seeds",
                                       "taus",     "grid",         "path",      "integrator_step", "rel_tol",
                                       "schedule", "pullback_tol", "stability", "threads"};
  return k;
}

/// Applies a JSON experiment object onto `cfg` (missing keys keep their current values).
inline void apply_json(const json& j, SweepConfig& cfg) {
  detail::only_keys(j, experiment_keys(), "config");
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    if (!s.is_string() || (s != "pitchfork" && s != "transcritical")) detail::bad("scenario must be pitchfork or transcritical");
    cfg.scenario = s == "pitchfork" ? Scenario::pitchfork : Scenario::transcritical;
  }
  if (j.contains("coefficients")) {
    const auto& c = j.at("coefficients");
    detail::only_keys(c, {"beta", "gamma"}, "coefficients");
    if (c.contains("beta")) cfg.beta = beta_from_json(c.at("beta"));
    if (c.contains("gamma")) cfg.gamma = gamma_from_json(c.at("gamma"));
  }
  if (j.contains("delta")) cfg.delta = detail::number(j, "delta", "config");
  if (j.contains("lambdas")) cfg.lambdas = detail::numbers(j.at("lambdas"), "lambdas");
  if (j.contains("taus")) cfg.taus = detail::numbers(j.at("taus"), "taus");
  if (j.contains("seeds")) {
    if (!j.at("seeds").is_array()) detail::bad("seeds must be an array of nonnegative integers");
    cfg.seeds.clear();
    for (const auto& s : j.at("seeds")) {
      if (!s.is_number_unsigned()) detail::bad("seeds must be nonnegative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::only_keys(g, {"t_min", "t_max", "step"}, "grid");
    cfg.t_min = detail::number_or(g, "t_min", cfg.t_min, "grid");
    cfg.t_max = detail::number_or(g, "t_max", cfg.t_max, "grid");
    cfg.path_step = detail::number_or(g, "step", cfg.path_step, "grid");
  }
  if (j.contains("path")) {
    const auto& p = j.at("path");
    if (!p.is_string() || (p != "brownian" && p != "zero")) detail::bad("path must be brownian or zero");
    cfg.path_kind = p == "zero" ? PathKind::zero : PathKind::brownian;
  }
  if (j.contains("integrator_step")) cfg.integrator_step = detail::number(j, "integrator_step", "config");
  if (j.contains("rel_tol")) cfg.quadrature.rel_tol = detail::number(j, "rel_tol", "config");
  if (j.contains("schedule")) cfg.base_schedule = detail::numbers(j.at("schedule"), "schedule");
  if (j.contains("pullback_tol")) cfg.pullback_tol = detail::number(j, "pullback_tol", "config");
  if (j.contains("stability")) {
    if (!j.at("stability").is_boolean()) detail::bad("stability must be a boolean");
    cfg.stability = j.at("stability").get<bool>();
  }
  if (j.contains("threads")) {
    if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1) detail::bad("threads must be a positive integer");
    cfg.threads = j.at("threads").get<int>();
  }
}

/// Semantic checks that go beyond the schema; runs before any computation.
inline void validate(const SweepConfig& cfg) {
  if (cfg.lambdas.empty()) detail::bad("lambda grid is empty");
  if (cfg.seeds.empty()) detail::bad("seed list is empty");
  if (cfg.taus.empty()) detail::bad("tau list is empty");
  if (!(cfg.path_step > 0.0)) detail::bad("grid step must be positive");
  if (!(cfg.t_min < 0.0 && cfg.t_max > 0.0)) detail::bad("grid must satisfy t_min < 0 < t_max");
  TimeGrid::from_bounds(cfg.t_min, cfg.t_max, cfg.path_step);
  if (!(cfg.integrator_step > 0.0)) detail::bad("integrator step must be positive");
  if (!(cfg.quadrature.rel_tol > 0.0 && cfg.quadrature.rel_tol < 1.0)) detail::bad("rel_tol must lie in (0, 1)");
  if (cfg.base_schedule.size() < 3) detail::bad("schedule needs at least three pullback times");
  for (std::size_t i = 0; i < cfg.base_schedule.size(); ++i)
    if (!(cfg.base_schedule[i] > 0.0) || (i > 0 && !(cfg.base_schedule[i] > cfg.base_schedule[i - 1])))
      detail::bad("schedule must be positive and strictly increasing");
  validate_pairing(cfg.beta, cfg.gamma, cfg.scenario == Scenario::pitchfork ? Variant::pitchfork : Variant::transcritical);
}

/// Canonical JSON of everything that influences numerical output; hashed into the manifest.
inline json canonical(const SweepConfig& cfg) {
  json seeds = json::array();
  for (auto s : cfg.seeds) seeds.push_back(s);
  return {{"scenario", std::string(to_string(cfg.scenario))},
          {"coefficients", {{"beta", to_json(cfg.beta)}, {"gamma", to_json(cfg.gamma)}}},
          {"delta", cfg.delta},
          {"lambdas", cfg.lambdas},
          {"seeds", seeds},
          {"taus", cfg.taus},
          {"grid", {{"t_min", cfg.t_min}, {"t_max", cfg.t_max}, {"step", cfg.path_step}}},
          {"path", cfg.path_kind == PathKind::zero ? "zero" : "brownian"},
          {"integrator_step", cfg.integrator_step},
          {"rel_tol", cfg.quadrature.rel_tol},
          {"schedule", cfg.base_schedule},
          {"pullback_tol", cfg.pullback_tol},
          {"stability", cfg.stability}};
}

}  // namespace pbl::config
