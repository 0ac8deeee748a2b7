#pragma once

// Scenario runner behind the zyglab command-line tool: parses a JSON
// scenario, runs the named checks and assembles a deterministic report.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flows.hpp"
#include "isometry.hpp"
#include "moebius.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "zygmund.hpp"

namespace zyglab {

inline constexpr const char* kToolName = "zyglab";
inline constexpr const char* kToolVersion = "0.1.0";

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"domain",  "extreme-point", "flow-group-law",
                                              "generator", "hermitian-exponential", "isometry",
                                              "norm",    "unboundedness"};
  return names;
}

inline std::map<std::string, double> default_tolerances() {
  return {{"argmax", 1e-4},
          {"closed_form", 1e-8},
          {"domain", 1e-8},
          {"extreme_point", 1e-9},
          {"fixed_point", 1e-10},
          {"flow_group_law", 1e-9},
          {"generator_field", 1e-6},
          {"hermitian_exponential", 1e-8},
          {"hermitian_group", 1e-12},
          {"isometry", 1e-6},
          {"norm", 1e-9},
          {"rate_high", 2.3},
          {"rate_low", 1.7},
          {"unboundedness", 1e-6},
          {"unboundedness_trivial", 1e-10}};
}

inline std::map<std::string, int> default_parameters() {
  return {{"closed_form_operators", 10}, {"closed_form_points", 100}, {"extreme_functions", 3},
          {"extreme_operators", 10},     {"extreme_points", 100},     {"field_points", 1000},
          {"group_points", 200},         {"isometry_operators", 100}};
}

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::vector<Json> suite_specs;
  std::vector<AnalyticFunction> suite;
  std::optional<OperatorSpec> op;
  std::vector<IsometryFlow> flows;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances = default_tolerances();
  std::map<std::string, int> parameters = default_parameters();
  NormSettings settings;
  std::string output_path;
  std::string output_format = "json";

  /// Canonical JSON of the effective configuration; hashed into reports.
  Json canonical() const {
    Json flows_json = Json::array();
    for (const auto& f : flows) flows_json.push_back(to_json(f));
    return Json{{"seed", seed},
                {"suite", suite_specs},
                {"operator", op ? to_json(*op) : Json(nullptr)},
                {"flows", flows_json},
                {"checks", checks},
                {"tolerances", tolerances},
                {"parameters", parameters},
                {"settings", settings_json()}};
  }

  Json settings_json() const {
    return Json{{"radii", settings.radii},
                {"angles", settings.angles},
                {"r_max", settings.r_max},
                {"simplex_tolerance", settings.simplex_tolerance},
                {"refine_seeds", settings.refine_seeds},
                {"derivative_nodes", settings.evaluation.derivative_nodes},
                {"quadrature_order", settings.evaluation.quadrature_order},
                {"max_subdivisions", settings.evaluation.max_subdivisions},
                {"prng", "splitmix64"}};
  }

  void set_tolerance(const std::string& name, double value) {
    if (!tolerances.contains(name)) io::invalid("/tolerances/" + name, "unknown tolerance name");
    if (!(std::isfinite(value) && value > 0.0)) io::invalid("/tolerances/" + name, "tolerance must be strictly positive");
    tolerances[name] = value;
  }
};

/// FNV-1a 64.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(v));
  return buffer;
}

inline ScenarioConfig parse_scenario(const Json& j) {
  if (!j.is_object()) io::invalid("", "scenario must be a JSON object");
  static const std::set<std::string> allowed{"seed",      "suite",      "operator", "flows",  "checks",
                                             "tolerances", "parameters", "settings", "output", "description"};
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) io::invalid("/" + key, "unknown key");

  ScenarioConfig config;
  if (j.contains("seed")) config.seed = io::unsigned_integer(j, "seed", "");

  if (j.contains("suite")) {
    const Json& suite = j.at("suite");
    if (!suite.is_array()) io::invalid("/suite", "expected an array");
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const std::string path = "/suite/" + std::to_string(i);
      config.suite.push_back(parse_function(suite[i], path));
      config.suite_specs.push_back(suite[i]);
    }
  }

  if (j.contains("operator") && !j.at("operator").is_null()) config.op = parse_operator(j.at("operator"), "/operator");

  if (j.contains("flows")) {
    const Json& flows = j.at("flows");
    if (!flows.is_array()) io::invalid("/flows", "expected an array");
    for (std::size_t i = 0; i < flows.size(); ++i)
      config.flows.push_back(parse_isometry_flow(flows[i], "/flows/" + std::to_string(i)));
  }

  if (j.contains("checks")) {
    const Json& checks = j.at("checks");
    if (!checks.is_array()) io::invalid("/checks", "expected an array");
    const auto& names = known_checks();
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const std::string path = "/checks/" + std::to_string(i);
      if (!checks[i].is_string()) io::invalid(path, "expected a check name");
      const std::string name = checks[i].get<std::string>();
      if (std::find(names.begin(), names.end(), name) == names.end())
        io::invalid(path, "unknown check '" + name + "'");
      if (std::find(config.checks.begin(), config.checks.end(), name) == config.checks.end())
        config.checks.push_back(name);
    }
    std::sort(config.checks.begin(), config.checks.end());
  }

  if (j.contains("tolerances")) {
    const Json& tol = j.at("tolerances");
    if (!tol.is_object()) io::invalid("/tolerances", "expected an object");
    for (const auto& [name, value] : tol.items()) {
      if (!value.is_number()) io::invalid("/tolerances/" + name, "expected a number");
      config.set_tolerance(name, value.get<double>());
    }
  }

  if (j.contains("parameters")) {
    const Json& params = j.at("parameters");
    if (!params.is_object()) io::invalid("/parameters", "expected an object");
    for (const auto& [name, value] : params.items()) {
      const std::string path = "/parameters/" + name;
      if (!config.parameters.contains(name)) io::invalid(path, "unknown parameter");
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1) io::invalid(path, "expected a positive integer");
      config.parameters[name] = value.get<int>();
    }
  }

  if (j.contains("settings")) {
    const Json& s = j.at("settings");
    if (!s.is_object()) io::invalid("/settings", "expected an object");
    auto positive_int = [&](const char* key, int& slot) {
      if (!s.contains(key)) return;
      const Json& v = s.at(key);
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
        io::invalid(std::string("/settings/") + key, "expected a positive integer");
      slot = v.get<int>();
    };
    positive_int("radii", config.settings.radii);
    positive_int("angles", config.settings.angles);
    positive_int("refine_seeds", config.settings.refine_seeds);
    positive_int("derivative_nodes", config.settings.evaluation.derivative_nodes);
    positive_int("quadrature_order", config.settings.evaluation.quadrature_order);
    config.settings.r_max = io::number_or(s, "r_max", config.settings.r_max, "/settings");
    config.settings.simplex_tolerance =
        io::number_or(s, "simplex_tolerance", config.settings.simplex_tolerance, "/settings");
    io::guarded("/settings", [&] {
      config.settings.validate();
      return 0;
    });
  }

  if (j.contains("output")) {
    const Json& out = j.at("output");
    if (!out.is_object()) io::invalid("/output", "expected an object");
    if (out.contains("path")) config.output_path = io::text(out, "path", "/output");
    if (out.contains("format")) {
      config.output_format = io::text(out, "format", "/output");
      if (config.output_format != "json" && config.output_format != "csv")
        io::invalid("/output/format", "expected json or csv");
    }
  }
  return config;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::config_invalid, path + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
}

/// Worker count from ZYGLAB_THREADS; absent or invalid means 1.
inline unsigned threads_from_environment() {
  const char* raw = std::getenv("ZYGLAB_THREADS");
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (*end != '\0' || value < 1) throw Error(ErrorKind::config_invalid, "ZYGLAB_THREADS must be a positive integer");
  return static_cast<unsigned>(value);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct Metric {
  std::string name;
  double measured = 0.0;
  /// Unset for informational metrics.
  std::optional<double> tolerance;
  /// Comparison is measured <= tolerance unless `lower_bound` is set.
  bool lower_bound = false;

  std::optional<bool> passed() const {
    if (!tolerance) return std::nullopt;
    if (!std::isfinite(measured)) return false;
    return lower_bound ? measured >= *tolerance : measured <= *tolerance;
  }
};

enum class CheckStatus { pass, fail, skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "fail";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
  double duration_seconds = 0.0;

  void gate(const std::string& metric, double measured, double tolerance) {
    metrics.push_back({metric, measured, tolerance});
  }
  void info(const std::string& metric, double measured) { metrics.push_back({metric, measured, std::nullopt}); }

  void settle() {
    if (status == CheckStatus::skip) return;
    for (const auto& m : metrics)
      if (m.passed() == false) status = CheckStatus::fail;
  }
};

struct RunReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  Json settings;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
  }

  Json to_json(bool include_durations = true) const {
    Json list = Json::array();
    for (const auto& c : checks) {
      Json metrics = Json::array();
      for (const auto& m : c.metrics) {
        Json entry{{"name", m.name}, {"measured", std::isfinite(m.measured) ? Json(m.measured) : Json("non-finite")}};
        entry["tolerance"] = m.tolerance ? Json(*m.tolerance) : Json(nullptr);
        const auto p = m.passed();
        entry["pass"] = p ? Json(*p) : Json(nullptr);
        if (m.lower_bound) entry["comparison"] = ">=";
        metrics.push_back(entry);
      }
      Json item{{"name", c.name}, {"status", zyglab::to_string(c.status)}, {"metrics", metrics}, {"notes", c.notes}};
      if (include_durations) item["duration_seconds"] = c.duration_seconds;
      list.push_back(item);
    }
    return Json{{"tool", kToolName},
                {"version", kToolVersion},
                {"seed", seed},
                {"config_hash", config_hash},
                {"settings", settings},
                {"checks", list},
                {"status", passed() ? "pass" : "fail"}};
  }

  /// One row per metric: check,status,metric,measured,tolerance,pass.
  std::string to_csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "check,status,metric,measured,tolerance,pass\n";
    for (const auto& c : checks) {
      if (c.metrics.empty()) out << c.name << ',' << zyglab::to_string(c.status) << ",,,,\n";
      for (const auto& m : c.metrics) {
        out << c.name << ',' << zyglab::to_string(c.status) << ',' << m.name << ',' << m.measured << ',';
        if (m.tolerance) out << *m.tolerance;
        out << ',';
        const auto p = m.passed();
        if (p) out << (*p ? "true" : "false");
        out << '\n';
      }
    }
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

namespace checks {

/// Independent stream per check so results do not depend on which other
/// checks run.
inline SplitMix64 stream(std::uint64_t seed, const std::string& check) { return SplitMix64(seed ^ fnv1a64(check)); }

/// Area-uniform point with |z| <= radius.
inline Complex disc_point(SplitMix64& rng, double radius) { return std::polar(radius * std::sqrt(rng.uniform()), rng.angle()); }

/// sup (1-r^2) r^{k-2} / (k-2)! for z^k / k!.
inline double monomial_seminorm(int k) {
  if (k == 2) return 1.0;
  const double m = k - 2;
  const double r2 = m / k;
  return (2.0 / k) * std::pow(r2, 0.5 * m) / std::tgamma(m + 1.0);
}

inline void norm(const ScenarioConfig& config, CheckResult& result) {
  if (config.suite.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("empty suite");
    return;
  }
  const double tol = config.tolerances.at("norm");
  double oracle_gap = 0.0, argmax_gap = 0.0, route_gap = 0.0;
  bool any_oracle = false, any_peaking = false;
  for (std::size_t i = 0; i < config.suite.size(); ++i) {
    const AnalyticFunction& f = config.suite[i];
    const ZygmundNormReport report = zygmund_norm(f, config.settings);
    for (const auto& w : report.warnings) result.notes.push_back(f.label() + ": " + w);
    // Same maximizer re-evaluated by Cauchy differentiation.
    const Complex second = cauchy_derivative(f, report.argmax, 2, config.settings.evaluation);
    const double rescaled = (1.0 - std::norm(report.argmax)) * std::abs(second);
    route_gap = std::max(route_gap, std::abs(rescaled - report.seminorm) / std::max(1.0, report.seminorm));
    const Json& spec = config.suite_specs[i];
    const std::string type = spec.value("type", "");
    if (type == "monomial") {
      any_oracle = true;
      oracle_gap = std::max(oracle_gap, std::abs(report.seminorm - monomial_seminorm(spec.at("k").get<int>())));
    } else if (type == "peaking") {
      any_oracle = any_peaking = true;
      const Complex z0{spec.value("z0_re", 0.0), spec.value("z0_im", 0.0)};
      oracle_gap = std::max(oracle_gap, std::abs(report.seminorm - 1.0));
      if (z0 != Complex{}) argmax_gap = std::max(argmax_gap, std::abs(report.argmax - z0));
    }
  }
  if (any_oracle) result.gate("max_seminorm_oracle_deviation", oracle_gap, tol);
  if (any_peaking) result.gate("max_peaking_argmax_distance", argmax_gap, config.tolerances.at("argmax"));
  // The Cauchy route carries its own truncation error, so it gates at the
  // closed-form tolerance rather than the oracle tolerance.
  result.gate("max_cross_route_relative_deviation", route_gap, config.tolerances.at("closed_form"));
}

inline std::vector<AnalyticFunction> subspace_members(const ScenarioConfig& config, SpaceVariant variant,
                                                      CheckResult& result) {
  std::vector<AnalyticFunction> members;
  for (const auto& f : config.suite) {
    if (membership_check(f, variant, config.settings))
      members.push_back(f);
    else
      result.notes.push_back(f.label() + " skipped: not in " + std::string(to_string(variant)));
  }
  return members;
}

inline void isometry(const ScenarioConfig& config, CheckResult& result) {
  const std::vector<AnalyticFunction> members = subspace_members(config, SpaceVariant::Z0_01, result);
  if (members.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no suite member lies in Z0^(0,1)");
    return;
  }
  SplitMix64 rng = stream(config.seed, "isometry");
  const int count = config.parameters.at("isometry_operators");
  std::vector<CanonicalIsometry> ops;
  for (int i = 0; i < count; ++i) ops.push_back(random_canonical_isometry(rng));

  NormSettings inner = config.settings;
  inner.threads = 1;
  std::vector<double> base(members.size());
  parallel_for(members.size(), config.settings.threads,
               [&](std::size_t i) { base[i] = zygmund_norm(members[i], inner).total; });
  std::vector<double> worst(ops.size(), 0.0);
  parallel_for(ops.size(), config.settings.threads, [&](std::size_t k) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double after = zygmund_norm(apply_canonical(ops[k], members[i], inner), inner).total;
      worst[k] = std::max(worst[k], std::abs(after - base[i]) / base[i]);
    }
  });
  result.gate("max_relative_norm_deviation", *std::max_element(worst.begin(), worst.end()),
              config.tolerances.at("isometry"));

  if (config.op && (std::holds_alternative<CanonicalIsometry>(*config.op) || std::holds_alternative<FullIsometry>(*config.op))) {
    const AnyIsometry op = std::holds_alternative<CanonicalIsometry>(*config.op)
                               ? AnyIsometry(std::get<CanonicalIsometry>(*config.op))
                               : AnyIsometry(std::get<FullIsometry>(*config.op));
    NormSettings threaded = config.settings;
    const auto verification = verify_isometry(op, std::holds_alternative<FullIsometry>(op)
                                                      ? subspace_members(config, SpaceVariant::Z0, result)
                                                      : members,
                                              threaded);
    result.gate("declared_operator_max_relative_deviation", verification.max_relative_deviation,
                config.tolerances.at("isometry"));
  }

  // Quadrature route vs chain rule for (Tf)''.
  const int closed_ops = std::min(config.parameters.at("closed_form_operators"), count);
  const int points = config.parameters.at("closed_form_points");
  double closed_gap = 0.0;
  for (int k = 0; k < closed_ops; ++k) {
    for (const auto& f : members) {
      const AnalyticFunction image = apply_canonical(ops[static_cast<std::size_t>(k)], f, inner);
      for (int p = 0; p < points; ++p) {
        const Complex z = disc_point(rng, 0.95);
        const Complex via_quadrature = derivative(image, z, 2, config.settings.evaluation);
        const Complex direct = second_derivative_direct(ops[static_cast<std::size_t>(k)], f, z, config.settings.evaluation);
        closed_gap = std::max(closed_gap, std::abs(via_quadrature - direct));
      }
    }
  }
  result.gate("max_second_derivative_route_gap", closed_gap, config.tolerances.at("closed_form"));
}

inline const std::vector<double>& group_times() {
  static const std::vector<double> times{-1.0, -0.3, 0.2, 0.7};
  return times;
}

inline void flow_group_law(const ScenarioConfig& config, CheckResult& result) {
  if (config.flows.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no flows declared");
    return;
  }
  SplitMix64 rng = stream(config.seed, "flow-group-law");
  std::vector<Complex> points;
  for (int i = 0; i < config.parameters.at("group_points"); ++i) points.push_back(disc_point(rng, 0.95));
  double law = 0.0, drift = 0.0;
  for (const auto& flow : config.flows) {
    law = std::max(law, group_law_check(flow.family, group_times(), group_times(), points));
    drift = std::max(drift, fixed_point_drift(flow.family, group_times()));
    if (flow.family.field_sign() < 0) result.notes.push_back(flow.family.field_note());
  }
  result.gate("max_group_law_defect", law, config.tolerances.at("flow_group_law"));
  result.gate("max_fixed_point_drift", drift, config.tolerances.at("fixed_point"));
}

/// Test function for difference quotients.
inline AnalyticFunction cubic() { return monomial(3); }

inline void generator(const ScenarioConfig& config, CheckResult& result) {
  if (config.flows.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no flows declared");
    return;
  }
  SplitMix64 rng = stream(config.seed, "generator");
  std::vector<Complex> points;
  for (int i = 0; i < config.parameters.at("field_points"); ++i) points.push_back(disc_point(rng, 0.95));

  double field_gap = 0.0, formula_gap = 0.0;
  double rate_min = std::numeric_limits<double>::infinity(), rate_max = -rate_min;
  const Complex z{0.4, 0.0};
  const AnalyticFunction f = cubic();
  for (const auto& flow : config.flows) {
    for (Complex p : points) {
      const Complex fd = generator_field(flow.family, p, FieldMode::fd);
      const Complex closed = generator_field(flow.family, p, FieldMode::closed);
      field_gap = std::max(field_gap, std::abs(closed - fd) / std::max(1.0, std::abs(fd)));
    }
    const Complex exact = integral_flow_derivative(flow, f, z, config.settings);
    const Complex formula = apply_generator(flow, f, z, config.settings);
    formula_gap = std::max(formula_gap, std::abs(formula - exact));
    const ConvergenceReport conv = difference_quotient_convergence(flow, f, z, exact, 6, 12, config.settings);
    for (std::size_t i = 0; i < conv.ratios.size(); ++i) {
      // Once the quotient is exact to roundoff the ratio carries no rate information.
      if (conv.steps[i + 1].error <= 1e-11 * std::max(1.0, std::abs(exact))) continue;
      rate_min = std::min(rate_min, conv.ratios[i]);
      rate_max = std::max(rate_max, conv.ratios[i]);
    }
  }
  result.gate("max_field_relative_gap", field_gap, config.tolerances.at("generator_field"));
  if (std::isfinite(rate_min)) {
    result.metrics.push_back({"min_halving_error_ratio", rate_min, config.tolerances.at("rate_low"), true});
    result.gate("max_halving_error_ratio", rate_max, config.tolerances.at("rate_high"));
  } else {
    result.notes.push_back("difference quotients exact to roundoff for every flow; no rate measured");
  }
  result.info("max_gap_alpha_f_minus_iVf_prime_vs_group_derivative", formula_gap);
  result.notes.push_back(
      "difference quotients are measured against the exact t-derivative of the integral-form group; "
      "the gap to alpha f - i V f' is reported for information");
}

inline void extreme_point(const ScenarioConfig& config, CheckResult& result) {
  std::vector<AnalyticFunction> members = subspace_members(config, SpaceVariant::Z0_01, result);
  if (members.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no suite member lies in Z0^(0,1)");
    return;
  }
  const auto keep = std::min<std::size_t>(members.size(), static_cast<std::size_t>(config.parameters.at("extreme_functions")));
  members.erase(members.begin() + static_cast<std::ptrdiff_t>(keep), members.end());
  SplitMix64 rng = stream(config.seed, "extreme-point");
  double gap = 0.0;
  for (int k = 0; k < config.parameters.at("extreme_operators"); ++k) {
    const CanonicalIsometry op = random_canonical_isometry(rng);
    for (const auto& f : members) {
      const AnalyticFunction image = apply_canonical(op, f, config.settings);
      for (int p = 0; p < config.parameters.at("extreme_points"); ++p) {
        const Complex z = disc_point(rng, 0.95);
        const double theta = rng.angle();
        const ExtremeImage moved = adjoint_on_extreme(op, theta, z);
        const Complex lhs = std::polar(1.0, theta) * phi_embed(image, z, config.settings.evaluation);
        const Complex rhs = std::polar(1.0, moved.phase) * phi_embed(f, moved.w, config.settings.evaluation);
        gap = std::max(gap, std::abs(lhs - rhs));
      }
    }
  }
  result.gate("max_transport_defect", gap, config.tolerances.at("extreme_point"));
}

inline void hermitian_exponential(const ScenarioConfig& config, CheckResult& result) {
  HermitianDiagonal s{1.0, 2.0, 0.5};
  if (config.op && std::holds_alternative<HermitianDiagonal>(*config.op))
    s = std::get<HermitianDiagonal>(*config.op);
  else
    result.notes.push_back("no hermitian operator declared; using (a1, a2, a3) = (1, 2, 0.5)");

  std::vector<AnalyticFunction> functions{AnalyticFunction::polynomial({1.0, 1.0, 0.5}, "1+z+z^2/2")};
  for (const auto& f : subspace_members(config, SpaceVariant::Z0, result)) functions.push_back(f);
  const std::vector<double> times{0.1, 0.3, 1.0, std::numbers::pi};
  double norm_gap = 0.0;
  for (const auto& f : functions) {
    const double before = zygmund_norm(f, config.settings).total;
    for (double t : times) {
      const double after = zygmund_norm(apply_full(hermitian_exponential(s, t), f, config.settings), config.settings).total;
      norm_gap = std::max(norm_gap, std::abs(after - before));
    }
  }
  result.gate("max_norm_change", norm_gap, config.tolerances.at("hermitian_exponential"));

  double group_gap = 0.0;
  for (double a : times)
    for (double b : times) {
      const FullIsometry ea = hermitian_exponential(s, a), eb = hermitian_exponential(s, b);
      const FullIsometry sum = hermitian_exponential(s, a + b);
      group_gap = std::max({group_gap, phase_distance(ea.theta + eb.theta, sum.theta),
                            phase_distance(ea.eta + eb.eta, sum.eta), phase_distance(ea.alpha + eb.alpha, sum.alpha)});
    }
  result.gate("max_group_phase_defect", group_gap, config.tolerances.at("hermitian_group"));
}

inline void domain(const ScenarioConfig& config, CheckResult& result) {
  if (config.flows.empty()) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no flows declared");
    return;
  }
  // f = z^2: (Gf)'(0) = -i V(0) f''(0) = -2i V(0).
  const AnalyticFunction f = AnalyticFunction::polynomial({0.0, 0.0, 1.0}, "z^2");
  double gap = 0.0;
  int leaving = 0;
  for (const auto& flow : config.flows) {
    const AnalyticFunction g = generator_image(flow, f, config.settings.evaluation);
    // Cauchy route, independent of the Leibniz closed form inside the generator image.
    const double measured = std::abs(cauchy_derivative(g, 0.0, 1, config.settings.evaluation));
    const double predicted = 2.0 * std::abs(flow.family.field()(0.0));
    gap = std::max(gap, std::abs(measured - predicted));
    const DomainReport report = generator_domain_check(flow, f, config.settings);
    const bool expected_in_domain = predicted <= kDomainTolerance;
    if (report.in_domain != expected_in_domain) {
      result.metrics.push_back({std::string("domain_verdict_mismatch_") + flow.family.variant(), 1.0, 0.0});
    }
    if (!report.in_domain) {
      ++leaving;
      for (const auto& v : report.violations)
        result.notes.push_back(std::string(flow.family.variant()) + ": " + v.condition + " (" + std::to_string(v.magnitude) + ")");
    }
  }
  result.gate("max_derivative_at_zero_deviation", gap, config.tolerances.at("domain"));
  result.info("flows_leaving_subspace", leaving);
}

inline void unboundedness(const ScenarioConfig& config, CheckResult& result) {
  const std::vector<int> degrees{4, 8, 16, 32};
  int probed = 0;
  for (std::size_t i = 0; i < config.flows.size(); ++i) {
    const IsometryFlow& flow = config.flows[i];
    const auto& v = flow.family.field().coefficients;
    const bool trivial = std::holds_alternative<TrivialFlow>(flow.family.parameters());
    // Oracle exists when V(z) = v1 z: G m_n = (alpha - i v1 n) m_n.
    if (!trivial && (std::abs(v[0]) > 1e-14 || std::abs(v[2]) > 1e-14)) continue;
    ++probed;
    const auto rows = unboundedness_probe(flow, degrees, config.settings);
    double gap = 0.0;
    bool increasing = true;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double oracle = std::abs(flow.alpha_rate - kI * v[1] * static_cast<double>(rows[r].degree));
      gap = std::max(gap, std::abs(rows[r].ratio - oracle));
      if (r > 0 && !(rows[r].ratio > rows[r - 1].ratio)) increasing = false;
    }
    const std::string tag = "flow" + std::to_string(i) + "_" + flow.family.variant();
    result.gate(tag + "_max_ratio_oracle_deviation", gap,
                config.tolerances.at(trivial ? "unboundedness_trivial" : "unboundedness"));
    if (!trivial) result.metrics.push_back({tag + "_ratios_strictly_increasing", increasing ? 1.0 : 0.0, 1.0, true});
  }
  if (probed == 0) {
    result.status = CheckStatus::skip;
    result.notes.push_back("no flow with a linear field (rotation about 0) or trivial flow declared");
  }
}

}  // namespace checks

inline CheckResult run_check(const std::string& name, const ScenarioConfig& config) {
  CheckResult result;
  result.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (name == "norm") checks::norm(config, result);
    else if (name == "isometry") checks::isometry(config, result);
    else if (name == "flow-group-law") checks::flow_group_law(config, result);
    else if (name == "generator") checks::generator(config, result);
    else if (name == "extreme-point") checks::extreme_point(config, result);
    else if (name == "hermitian-exponential") checks::hermitian_exponential(config, result);
    else if (name == "domain") checks::domain(config, result);
    else if (name == "unboundedness") checks::unboundedness(config, result);
    else throw Error(ErrorKind::config_invalid, "unknown check '" + name + "'");
    result.settle();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config_invalid) throw;
    result.status = CheckStatus::fail;
    result.notes.push_back(std::string("error: ") + e.what());
  }
  result.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// Checks run in name order; each draws from its own seeded stream.
inline RunReport run_scenario(const ScenarioConfig& config) {
  RunReport report;
  report.seed = config.seed;
  report.config_hash = hex64(fnv1a64(config.canonical().dump()));
  report.settings = config.settings_json();
  std::vector<std::string> names = config.checks;
  std::sort(names.begin(), names.end());
  for (const auto& name : names) report.checks.push_back(run_check(name, config));
  return report;
}

// ---------------------------------------------------------------------------
// Plot data and classification
// ---------------------------------------------------------------------------

/// CSV rows r,theta,value of (1-r^2)|f''(r e^{i theta})|.
inline std::string grid_csv(const AnalyticFunction& f, int radii, int angles, double r_max = 0.999,
                            const EvaluationSettings& settings = {}) {
  std::ostringstream out;
  out.precision(17);
  out << "r,theta,value\n";
  for (const auto& s : weighted_grid(f, radii, angles, r_max, settings)) out << s.r << ',' << s.theta << ',' << s.value << '\n';
  return out.str();
}

inline void emit_grid(const AnalyticFunction& f, int radii, int angles, const std::string& path, double r_max = 0.999,
                      const EvaluationSettings& settings = {}) {
  const std::string csv = grid_csv(f, radii, angles, r_max, settings);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path);
  out << csv;
  if (!out) throw Error(ErrorKind::io_error, "write failed for " + path);
}

/// Accepts {"automorphism": {...}}, {"flow": {variant, parameters}, "t": t},
/// or a bare automorphism / flow family object.
inline Json classify_document(const Json& j) {
  if (!j.is_object()) io::invalid("", "expected an object");
  if (j.contains("flow") || j.contains("variant")) {
    const bool wrapped = j.contains("flow");
    const Json& spec = wrapped ? j.at("flow") : j;
    const FlowFamily family = parse_flow_family(spec, wrapped ? "/flow" : "");
    const double t = io::number_or(j, "t", 1.0, "");
    const DiscAutomorphism sigma = family.automorphism_at(t);
    Json out = to_json(fixed_points(sigma));
    out["t"] = t;
    out["automorphism"] = to_json(sigma);
    out["family"] = to_json(family);
    return out;
  }
  const bool wrapped = j.contains("automorphism");
  const DiscAutomorphism sigma = parse_automorphism(wrapped ? j.at("automorphism") : j, wrapped ? "/automorphism" : "");
  Json out = to_json(fixed_points(sigma));
  out["automorphism"] = to_json(sigma);
  return out;
}

}  // namespace zyglab
