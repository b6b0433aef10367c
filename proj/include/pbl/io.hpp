#pragma once

/// CSV / JSON / gnuplot serialization. Needs nlohmann/json (vendored as json.hpp).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "pbl/bifurcation.hpp"

namespace pbl::io {

using nlohmann::json;

/// 17 significant digits, so values round-trip exactly.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// NaN and infinities become null.
inline json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const CheckReport& r) {
  json p = json::object(), t = json::object();
  for (const auto& [k, v] : r.params) p[k] = jnum(v);
  for (const auto& [k, v] : r.tolerances) t[k] = jnum(v);
  json out = {{"check", r.check}, {"params", p}, {"residual", jnum(r.residual)}, {"verdict", r.pass ? "pass" : "fail"}, {"tolerances", t}};
  if (!r.samples.empty()) {
    json s = json::array();
    for (const auto& m : r.samples) {
      json e = json::object();
      for (const auto& [k, v] : m) e[k] = jnum(v);
      s.push_back(e);
    }
    out["samples"] = s;
  }
  return out;
}

inline json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(jnum(x));
  return a;
}

inline json to_json(const StabilityReport& r) {
  json conv = json::array();
  for (int c : r.converged) conv.push_back(c != 0);
  return {{"verdict", std::string(to_string(r.verdict))},
          {"epsilons", vec(r.epsilons)},
          {"deltas", vec(r.deltas)},
          {"lyapunov", r.lyapunov},
          {"attracting", r.attracting},
          {"initial_data", vec(r.initial_data)},
          {"limits", vec(r.limits)},
          {"converged", conv},
          {"note", r.note}};
}

inline json to_json(const AttractorInterval& a) {
  return {{"tau", a.tau},
          {"lower", jnum(a.lower)},
          {"upper", jnum(a.upper)},
          {"converged", a.converged},
          {"residual", jnum(a.residual)},
          {"schedule", vec(a.schedule)},
          {"upper_history", vec(a.upper_history)},
          {"lower_history", vec(a.lower_history)},
          {"start_values", vec(a.start_values)},
          {"monotonicity_tol", jnum(a.monotonicity_tol)}};
}

inline json to_json(const TemperednessReport& r) {
  return {{"check", "temperedness"},
          {"params", {{"rate", r.rate}}},
          {"residual", jnum(r.profile.empty() ? 0.0 : r.profile.back())},
          {"verdict", r.pass ? "pass" : "fail"},
          {"tolerances", {{"threshold", r.threshold}}},
          {"times", vec(r.times)},
          {"profile", vec(r.profile)}};
}

inline json to_json(const RecurrenceReport& r) {
  return {{"lambda", r.lambda}, {"seed", r.seed},       {"branch", r.branch}, {"beta_class", r.beta_class},
          {"test", r.test},     {"residual", jnum(r.residual)}, {"tol", jnum(r.tol)}, {"verdict", r.pass ? "pass" : "fail"},
          {"status", r.status}, {"message", r.message}};
}

inline const char* diagram_header() {
  return "lambda,tau,seed,x_plus,x_minus,lower_bound,upper_bound,stability,truncation_R,status";
}

inline void write_diagram_csv(std::ostream& os, const BifurcationDiagram& d) {
  os << diagram_header() << '\n';
  for (const auto& r : d.rows)
    os << num(r.lambda) << ',' << num(r.tau) << ',' << r.seed << ',' << num(r.x_plus) << ',' << num(r.x_minus) << ','
       << num(r.lower_bound) << ',' << num(r.upper_bound) << ',' << r.stability << ',' << num(r.truncation_R) << ','
       << r.status << '\n';
}

/// Whitespace-separated columns with a commented header, for `plot 'diagram.dat' using 1:4`.
inline void write_diagram_gnuplot(std::ostream& os, const BifurcationDiagram& d) {
  os << "# lambda tau seed x_plus x_minus lower_bound upper_bound\n";
  for (const auto& r : d.rows)
    os << num(r.lambda) << ' ' << num(r.tau) << ' ' << r.seed << ' ' << num(r.x_plus) << ' ' << num(r.x_minus) << ' '
       << num(r.lower_bound) << ' ' << num(r.upper_bound) << '\n';
}

inline json to_json(const BifurcationDiagram& d) {
  json rows = json::array();
  for (const auto& r : d.rows) {
    json e = {{"lambda", r.lambda},         {"tau", r.tau},
              {"seed", r.seed},             {"x_plus", jnum(r.x_plus)},
              {"x_minus", jnum(r.x_minus)}, {"lower_bound", jnum(r.lower_bound)},
              {"upper_bound", jnum(r.upper_bound)}, {"stability", r.stability},
              {"truncation_R", jnum(r.truncation_R)}, {"status", r.status},
              {"message", r.message},       {"handle", r.handle},
              {"schedule", vec(r.schedule)}, {"residual", jnum(r.residual)}};
    if (r.stability_report) e["stability_report"] = to_json(*r.stability_report);
    rows.push_back(e);
  }
  return {{"scenario", std::string(to_string(d.scenario))},
          {"bounds", {{"beta_0", d.bounds.beta_0}, {"beta_1", d.bounds.beta_1}, {"c1", d.bounds.c1}, {"c2", d.bounds.c2}}},
          {"rows", rows}};
}

inline void write_scan_csv(std::ostream& os, const AlmostPeriodScan& s) {
  os << "t0,sup_residual\n";
  for (std::size_t i = 0; i < s.shifts.size(); ++i) os << num(s.shifts[i]) << ',' << num(s.residuals[i]) << '\n';
}

inline void write_trace_csv(std::ostream& os, const QuasiSolutionTrace& tr) {
  os << "tau,value\n";
  for (std::size_t i = 0; i < tr.size(); ++i) os << num(tr.tau(i)) << ',' << num(tr.values[i]) << '\n';
}

inline void write_text(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + file.string());
  out << content;
  if (!out) fail(ErrorKind::io, "short write to " + file.string());
}

template <class Writer>
std::string render(Writer&& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

}  // namespace pbl::io
