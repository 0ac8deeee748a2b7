#pragma once

// JSON forms of functions, automorphisms, operators, flows and reports.
// Parsers report failures as ConfigInvalid with the JSON pointer of the
// offending value.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "analytic.hpp"
#include "flows.hpp"
#include "isometry.hpp"
#include "moebius.hpp"
#include "zygmund.hpp"

namespace zyglab {

using Json = nlohmann::json;

namespace io {

[[noreturn]] inline void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::config_invalid, (path.empty() ? "/" : path) + ": " + message);
}

inline const Json& member(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) invalid(path + "/" + key, "missing");
  return *it;
}

inline double number(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number()) invalid(path + "/" + key, "expected a number");
  return v.get<double>();
}

inline double number_or(const Json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j, key, path);
}

inline std::int64_t integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_integer()) invalid(path + "/" + key, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    invalid(path + "/" + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::string text(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = member(j, key, path);
  if (!v.is_string()) invalid(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

/// {<prefix>_re, <prefix>_im}; the imaginary part defaults to 0.
inline Complex complex_pair(const Json& j, const std::string& prefix, const std::string& path) {
  return {number(j, prefix + "_re", path), number_or(j, prefix + "_im", 0.0, path)};
}

/// Runs a constructor that may throw BadSpec and rethrows as ConfigInvalid at path.
template <class Fn>
auto guarded(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config_invalid) throw;
    invalid(path, e.what());
  }
}

}  // namespace io

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// Negative zeros are folded to +0 so reports do not depend on sign-of-zero noise.
inline Json complex_json(Complex z) { return Json{{"re", z.real() + 0.0}, {"im", z.imag() + 0.0}}; }

inline Json to_json(const DiscAutomorphism& sigma) {
  return Json{{"lambda_re", sigma.lambda().real()},
              {"lambda_im", sigma.lambda().imag()},
              {"a_re", sigma.a().real()},
              {"a_im", sigma.a().imag()}};
}

inline Json to_json(const CanonicalIsometry& op) {
  return Json{{"type", "canonical"}, {"alpha", op.alpha}, {"sigma", to_json(op.sigma)}};
}

inline Json to_json(const FullIsometry& op) {
  return Json{{"type", "full"}, {"theta", op.theta}, {"eta", op.eta}, {"alpha", op.alpha}, {"sigma", to_json(op.sigma)}};
}

inline Json to_json(const HermitianDiagonal& s) {
  return Json{{"type", "hermitian"}, {"a1", s.a1}, {"a2", s.a2}, {"a3", s.a3}};
}

inline Json to_json(const FlowFamily& family) {
  Json parameters = std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TrivialFlow>) {
          return Json::object();
        } else if constexpr (std::is_same_v<F, EllipticFlow>) {
          return {{"c", f.c}, {"tau_re", f.tau.real()}, {"tau_im", f.tau.imag()}};
        } else if constexpr (std::is_same_v<F, HyperbolicFlow>) {
          return {{"phi", f.phi}, {"p_re", f.p.real()}, {"p_im", f.p.imag()}, {"q_re", f.q.real()}, {"q_im", f.q.imag()}};
        } else {
          return {{"c", f.c}, {"gamma_re", f.gamma.real()}, {"gamma_im", f.gamma.imag()}};
        }
      },
      family.parameters());
  Json out{{"variant", family.variant()}, {"parameters", parameters}};
  if (family.field_sign() < 0) out["field_sign_resolution"] = family.field_note();
  return out;
}

inline Json to_json(const IsometryFlow& flow) {
  return Json{{"alpha_rate", flow.alpha_rate}, {"family", to_json(flow.family)}};
}

inline Json to_json(const ExtendedPoint& p) {
  if (p.at_infinity) return "infinity";
  return complex_json(p.value);
}

inline Json to_json(const FixedPointReport& report) {
  Json points = Json::array();
  for (const auto& p : report.points) points.push_back(to_json(p));
  return Json{{"class", to_string(report.type)}, {"fixed_points", points}, {"invariant", report.invariant}};
}

inline Json to_json(const ZygmundNormReport& r) {
  Json out{{"value_at_zero", r.value_at_zero},
           {"deriv_at_zero", r.deriv_at_zero},
           {"seminorm", r.seminorm},
           {"argmax", complex_json(r.argmax)},
           {"total", r.total},
           {"grid", {{"radii", r.grid_radii}, {"angles", r.grid_angles}, {"refinement_iterations", r.refinement_iterations}}},
           {"grid_value", r.grid_value}};
  out["warnings"] = r.warnings;
  return out;
}

inline Json to_json(const IsometryVerification& v) {
  Json rows = Json::array();
  for (const auto& row : v.rows)
    rows.push_back({{"function", row.label},
                    {"norm_before", row.norm_before},
                    {"norm_after", row.norm_after},
                    {"relative_deviation", row.relative_deviation}});
  return Json{{"max_relative_deviation", v.max_relative_deviation}, {"functions", rows}};
}

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

inline FunctionSpec parse_function_spec(const Json& j, const std::string& path) {
  if (!j.is_object() || j.empty()) io::invalid(path, "empty function spec");
  const std::string type = io::text(j, "type", path);
  if (type == "monomial") return MonomialSpec{static_cast<int>(io::integer(j, "k", path))};
  if (type == "peaking") return PeakingSpec{io::complex_pair(j, "z0", path)};
  if (type == "random_poly")
    return RandomPolySpec{static_cast<int>(io::integer(j, "degree", path)), io::unsigned_integer(j, "seed", path)};
  if (type == "log_singular") return LogSingularSpec{};
  if (type == "polynomial") {
    const Json& list = io::member(j, "coefficients", path);
    if (!list.is_array() || list.empty()) io::invalid(path + "/coefficients", "expected a nonempty array");
    PolynomialSpec spec;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Json& c = list[i];
      const std::string at = path + "/coefficients/" + std::to_string(i);
      if (c.is_number()) {
        spec.coefficients.emplace_back(c.get<double>(), 0.0);
      } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
        spec.coefficients.emplace_back(c[0].get<double>(), c[1].get<double>());
      } else {
        io::invalid(at, "expected a number or [re, im]");
      }
    }
    return spec;
  }
  io::invalid(path + "/type", "unknown function type '" + type + "'");
}

inline AnalyticFunction parse_function(const Json& j, const std::string& path) {
  const FunctionSpec spec = parse_function_spec(j, path);
  return io::guarded(path, [&] { return make_test_function(spec); });
}

inline DiscAutomorphism parse_automorphism(const Json& j, const std::string& path) {
  const Complex lambda = io::complex_pair(j, "lambda", path);
  const Complex a{io::number_or(j, "a_re", 0.0, path), io::number_or(j, "a_im", 0.0, path)};
  return io::guarded(path, [&] { return DiscAutomorphism(lambda, a); });
}

inline FlowFamily parse_flow_family(const Json& j, const std::string& path) {
  const std::string variant = io::text(j, "variant", path);
  const std::string ppath = path + "/parameters";
  const Json empty = Json::object();
  const Json& p = j.contains("parameters") ? j.at("parameters") : empty;
  return io::guarded(path, [&] {
    if (variant == "trivial") return FlowFamily::trivial();
    if (variant == "elliptic")
      return FlowFamily::elliptic(io::number(p, "c", ppath),
                                  {io::number_or(p, "tau_re", 0.0, ppath), io::number_or(p, "tau_im", 0.0, ppath)});
    if (variant == "hyperbolic")
      return FlowFamily::hyperbolic(io::number(p, "phi", ppath), io::complex_pair(p, "p", ppath),
                                    io::complex_pair(p, "q", ppath));
    if (variant == "parabolic")
      return FlowFamily::parabolic(io::number(p, "c", ppath), io::complex_pair(p, "gamma", ppath));
    io::invalid(path + "/variant", "unknown flow variant '" + variant + "'");
  });
}

inline IsometryFlow parse_isometry_flow(const Json& j, const std::string& path) {
  return {io::number_or(j, "alpha_rate", 0.0, path), parse_flow_family(io::member(j, "family", path), path + "/family")};
}

using OperatorSpec = std::variant<CanonicalIsometry, FullIsometry, HermitianDiagonal, IsometryFlow>;

inline OperatorSpec parse_operator(const Json& j, const std::string& path) {
  const std::string type = io::text(j, "type", path);
  if (type == "canonical")
    return CanonicalIsometry{io::number(j, "alpha", path), parse_automorphism(io::member(j, "sigma", path), path + "/sigma")};
  if (type == "full")
    return FullIsometry{io::number(j, "theta", path), io::number(j, "eta", path), io::number(j, "alpha", path),
                        parse_automorphism(io::member(j, "sigma", path), path + "/sigma")};
  if (type == "hermitian")
    return HermitianDiagonal{io::number(j, "a1", path), io::number(j, "a2", path), io::number(j, "a3", path)};
  if (type == "flow") return parse_isometry_flow(j, path);
  io::invalid(path + "/type", "unknown operator type '" + type + "'");
}

inline Json to_json(const OperatorSpec& op) {
  Json out = std::visit([](const auto& o) { return to_json(o); }, op);
  if (std::holds_alternative<IsometryFlow>(op)) out["type"] = "flow";
  return out;
}

}  // namespace zyglab
