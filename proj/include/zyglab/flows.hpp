#pragma once

// One-parameter groups of disc automorphisms (elliptic, hyperbolic,
// parabolic), the isometry groups they induce, and their generators
// Gf = alpha f - i V f' with V(z) = d/dt sigma_t(z) at t = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "analytic.hpp"
#include "isometry.hpp"
#include "moebius.hpp"
#include "zygmund.hpp"

namespace zyglab {

struct TrivialFlow {};

/// sigma_t(z) = ((e^{ict} - |tau|^2) z - tau (e^{ict} - 1)) /
///              (1 - |tau|^2 e^{ict} - conj(tau) (1 - e^{ict}) z)
struct EllipticFlow {
  double c = 1.0;
  Complex tau{};
};

/// sigma_t(z) = ((q e^{phi t} - p) z + p q (1 - e^{phi t})) /
///              ((e^{phi t} - 1) z + (q - p e^{phi t}))
/// Boundary fixed points p (repelling for t > 0) and q.
struct HyperbolicFlow {
  double phi = 1.0;
  Complex p{1.0, 0.0};
  Complex q{-1.0, 0.0};
};

/// sigma_t(z) = ((1 - ict) z + ict gamma) / (-ic conj(gamma) t z + 1 + ict)
struct ParabolicFlow {
  double c = 1.0;
  Complex gamma{1.0, 0.0};
};

using FlowParameters = std::variant<TrivialFlow, EllipticFlow, HyperbolicFlow, ParabolicFlow>;

/// Quadratic vector field V(z) = v0 + v1 z + v2 z^2.
struct QuadraticField {
  std::array<Complex, 3> coefficients{};

  Complex operator()(Complex z) const { return coefficients[0] + z * (coefficients[1] + z * coefficients[2]); }
  Complex derivative(Complex z) const { return coefficients[1] + 2.0 * z * coefficients[2]; }
  Complex second_derivative() const { return 2.0 * coefficients[2]; }
};

inline const char* variant_name(const FlowParameters& params) {
  switch (params.index()) {
    case 0: return "trivial";
    case 1: return "elliptic";
    case 2: return "hyperbolic";
    default: return "parabolic";
  }
}

/// Coefficient matrix of the family formula at time t.
inline MobiusMatrix flow_matrix(const FlowParameters& params, double t) {
  return std::visit(
      [t](const auto& f) -> MobiusMatrix {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TrivialFlow>) {
          return {1.0, 0.0, 0.0, 1.0};
        } else if constexpr (std::is_same_v<F, EllipticFlow>) {
          const Complex e = std::polar(1.0, f.c * t);
          const double t2 = std::norm(f.tau);
          return {e - t2, -f.tau * (e - 1.0), -std::conj(f.tau) * (1.0 - e), 1.0 - t2 * e};
        } else if constexpr (std::is_same_v<F, HyperbolicFlow>) {
          const double e = std::exp(f.phi * t);
          return {f.q * e - f.p, f.p * f.q * (1.0 - e), Complex(e - 1.0), f.q - f.p * e};
        } else {
          const Complex ict = kI * (f.c * t);
          return {1.0 - ict, ict * f.gamma, -ict * std::conj(f.gamma), 1.0 + ict};
        }
      },
      params);
}

/// The closed-form field as printed with each family's hermitian generator:
/// elliptic  i c (1 - conj(tau) z)(z - tau) / (1 - |tau|^2),
/// hyperbolic -phi (z - p)(z - q) / (p - q),
/// parabolic  i c conj(gamma) (z - gamma)^2.
inline QuadraticField printed_field(const FlowParameters& params) {
  return std::visit(
      [](const auto& f) -> QuadraticField {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TrivialFlow>) {
          return {};
        } else if constexpr (std::is_same_v<F, EllipticFlow>) {
          const Complex k = kI * f.c / (1.0 - std::norm(f.tau));
          return {{-k * f.tau, k * (1.0 + std::norm(f.tau)), -k * std::conj(f.tau)}};
        } else if constexpr (std::is_same_v<F, HyperbolicFlow>) {
          const Complex k = -f.phi / (f.p - f.q);
          return {{k * f.p * f.q, -k * (f.p + f.q), k}};
        } else {
          const Complex k = kI * f.c * std::conj(f.gamma);
          return {{k * f.gamma * f.gamma, -2.0 * k * f.gamma, k}};
        }
      },
      params);
}

/// Finite-difference step for the field's fd mode.
inline constexpr double kFieldStep = 1e-3;

class FlowFamily {
 public:
  static FlowFamily trivial() { return FlowFamily(TrivialFlow{}); }
  static FlowFamily elliptic(double c, Complex tau) { return FlowFamily(EllipticFlow{c, tau}); }
  static FlowFamily hyperbolic(double phi, Complex p, Complex q) { return FlowFamily(HyperbolicFlow{phi, p, q}); }
  static FlowFamily parabolic(double c, Complex gamma) { return FlowFamily(ParabolicFlow{c, gamma}); }

  /// Validates parameters, checks sigma_0 = id and that sampled sigma_t are
  /// automorphisms, then fixes the sign of the closed-form field against
  /// the differentiated flow.
  explicit FlowFamily(FlowParameters params) : params_(params) {
    validate();
    if (!automorphism_at(0.0).is_identity(1e-12))
      throw Error(ErrorKind::degenerate_parameters, "sigma_0 is not the identity");
    for (double t : {-1.0, -0.25, 0.5, 1.0}) (void)automorphism_at(t);
    resolve_field_sign();
  }

  const FlowParameters& parameters() const { return params_; }
  const char* variant() const { return variant_name(params_); }

  MobiusMatrix matrix(double t) const { return flow_matrix(params_, t); }

  /// sigma_t(z) on the closed disc (no range check); used for boundary fixed points.
  Complex apply_extended(double t, Complex z) const {
    const MobiusMatrix m = matrix(t);
    const Complex denominator = m.C * z + m.D;
    if (std::abs(denominator) < 1e-14)
      throw Error(ErrorKind::numerical_singularity, "flow denominator vanishes");
    return (m.A * z + m.B) / denominator;
  }

  DiscAutomorphism automorphism_at(double t) const {
    return DiscAutomorphism::from_matrix(matrix(t), ErrorKind::degenerate_parameters);
  }

  /// V(z) with the sign agreeing with the differentiated flow.
  const QuadraticField& field() const { return field_; }

  /// -1 when the printed closed form had to be negated to agree with the
  /// differentiated flow.
  int field_sign() const { return field_sign_; }
  const std::string& field_note() const { return field_note_; }

  /// Points fixed by every sigma_t: tau (elliptic), p and q (hyperbolic),
  /// gamma (parabolic); none for the trivial family.
  std::vector<Complex> fixed_point_set() const {
    return std::visit(
        [](const auto& f) -> std::vector<Complex> {
          using F = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<F, TrivialFlow>) return {};
          else if constexpr (std::is_same_v<F, EllipticFlow>) return {f.tau};
          else if constexpr (std::is_same_v<F, HyperbolicFlow>) return {f.p, f.q};
          else return {f.gamma};
        },
        params_);
  }

  /// (sigma_h(z) - sigma_{-h}(z)) / 2h at h and h/2, combined by one
  /// Richardson step.
  Complex field_fd(Complex z, double h = kFieldStep) const {
    auto central = [&](double step) { return (apply_extended(step, z) - apply_extended(-step, z)) / (2.0 * step); };
    const Complex coarse = central(h);
    const Complex fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
  }

 private:
  void validate() const {
    std::visit(
        [](const auto& f) {
          using F = std::decay_t<decltype(f)>;
          auto unimodular = [](Complex z) { return is_finite(z) && std::abs(std::abs(z) - 1.0) <= 1e-12; };
          if constexpr (std::is_same_v<F, EllipticFlow>) {
            if (!(std::isfinite(f.c) && f.c != 0.0)) throw Error(ErrorKind::bad_spec, "elliptic flow needs c != 0");
            if (!is_finite(f.tau) || std::abs(f.tau) >= 1.0)
              throw Error(ErrorKind::bad_spec, "elliptic flow needs |tau| < 1");
          } else if constexpr (std::is_same_v<F, HyperbolicFlow>) {
            if (!(std::isfinite(f.phi) && f.phi > 0.0)) throw Error(ErrorKind::bad_spec, "hyperbolic flow needs phi > 0");
            if (!unimodular(f.p) || !unimodular(f.q))
              throw Error(ErrorKind::bad_spec, "hyperbolic flow endpoints must be unimodular");
            if (std::abs(f.p - f.q) <= 1e-9) throw Error(ErrorKind::bad_spec, "hyperbolic flow endpoints must differ");
          } else if constexpr (std::is_same_v<F, ParabolicFlow>) {
            if (!(std::isfinite(f.c) && f.c != 0.0)) throw Error(ErrorKind::bad_spec, "parabolic flow needs c != 0");
            if (!unimodular(f.gamma)) throw Error(ErrorKind::bad_spec, "parabolic flow needs |gamma| = 1");
          }
        },
        params_);
  }

  void resolve_field_sign() {
    const QuadraticField printed = printed_field(params_);
    field_ = printed;
    if (std::holds_alternative<TrivialFlow>(params_)) return;
    Complex probe{};
    double strongest = -1.0;
    for (Complex z : {Complex(0.0), Complex(0.5), Complex(0.0, 0.5), Complex(-0.5), Complex(0.0, -0.5)}) {
      const double m = std::abs(field_fd(z));
      if (m > strongest) {
        strongest = m;
        probe = z;
      }
    }
    const Complex fd = field_fd(probe);
    const double tolerance = 1e-6 * std::max(1.0, std::abs(fd));
    if (std::abs(printed(probe) - fd) <= tolerance) return;
    if (std::abs(printed(probe) + fd) <= tolerance) {
      field_sign_ = -1;
      for (auto& c : field_.coefficients) c = -c;
      field_note_ = std::string(variant()) +
                    ": printed closed-form field negated to agree with the differentiated flow";
      return;
    }
    throw Error(ErrorKind::degenerate_parameters, "closed-form field disagrees with the differentiated flow");
  }

  FlowParameters params_;
  QuadraticField field_;
  int field_sign_ = 1;
  std::string field_note_;
};

/// sigma_t(z) for |z| < 1.
inline Complex flow_eval(const FlowFamily& family, double t, Complex z) {
  require_in_disc(z);
  return family.apply_extended(t, z);
}

inline DiscAutomorphism flow_to_automorphism(const FlowFamily& family, double t) { return family.automorphism_at(t); }

/// max |sigma_s(sigma_t(z)) - sigma_{s+t}(z)| over the sample grid.
inline double group_law_check(const FlowFamily& family, const std::vector<double>& s_values,
                              const std::vector<double>& t_values, const std::vector<Complex>& points) {
  double worst = 0.0;
  for (double s : s_values)
    for (double t : t_values)
      for (Complex z : points) {
        const Complex sequential = flow_eval(family, s, flow_eval(family, t, z));
        worst = std::max(worst, std::abs(sequential - flow_eval(family, s + t, z)));
      }
  return worst;
}

/// max over sampled t and the family's fixed points of |sigma_t(p) - p|.
inline double fixed_point_drift(const FlowFamily& family, const std::vector<double>& t_values) {
  double worst = 0.0;
  for (double t : t_values)
    for (Complex p : family.fixed_point_set()) worst = std::max(worst, std::abs(family.apply_extended(t, p) - p));
  return worst;
}

enum class FieldMode { closed, fd };

/// V(z) = d/dt sigma_t(z) at t = 0.
inline Complex generator_field(const FlowFamily& family, Complex z, FieldMode mode) {
  require_in_disc(z);
  return mode == FieldMode::closed ? family.field()(z) : family.field_fd(z);
}

struct GeneratorReport {
  Complex field_closed{};
  Complex field_fd{};
  Complex generator_value{};
  double discrepancy = 0.0;
};

struct IsometryFlow {
  double alpha_rate = 0.0;
  FlowFamily family = FlowFamily::trivial();
};

/// T_t with phase alpha_rate * t and automorphism sigma_t.
inline CanonicalIsometry isometry_at(const IsometryFlow& flow, double t) {
  return {flow.alpha_rate * t, flow_to_automorphism(flow.family, t)};
}

/// alpha f(z) - i V(z) f'(z). Closed-form derivatives of order k need the
/// source's closed forms up to order k + 1.
class GeneratorImageNode final : public FunctionNode {
 public:
  GeneratorImageNode(double alpha, QuadraticField field, AnalyticFunction source, EvaluationSettings settings)
      : alpha_(alpha), field_(field), source_(std::move(source)), settings_(settings) {}

  FunctionKind kind() const override { return FunctionKind::transformed; }

  Complex value(Complex z) const override {
    const Complex fp = detail::source_first_derivative(source_, z, settings_);
    return alpha_ * source_.node().value(z) - kI * field_(z) * fp;
  }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order == 0) return value(z);
    const FunctionNode& f = source_.node();
    const auto fk = f.closed_derivative(z, order);
    if (!fk) return std::nullopt;
    // (V f')^{(k)} = sum_j binom(k, j) V^{(j)} f^{(k-j+1)}, V^{(j)} = 0 for j > 2.
    const std::array<Complex, 3> v{field_(z), field_.derivative(z), field_.second_derivative()};
    Complex product{};
    double binomial = 1.0;
    for (int j = 0; j <= std::min(order, 2); ++j) {
      const auto d = f.closed_derivative(z, order - j + 1);
      if (!d) return std::nullopt;
      product += binomial * v[static_cast<std::size_t>(j)] * *d;
      binomial = binomial * (order - j) / (j + 1);
    }
    return alpha_ * *fk - kI * product;
  }

  std::string label() const override { return "G(" + source_.label() + ")"; }

 private:
  double alpha_;
  QuadraticField field_;
  AnalyticFunction source_;
  EvaluationSettings settings_;
};

/// Gf as a function. No membership requirement; see apply_generator.
inline AnalyticFunction generator_image(const IsometryFlow& flow, const AnalyticFunction& f,
                                        const EvaluationSettings& settings = {}) {
  return AnalyticFunction(std::make_shared<GeneratorImageNode>(flow.alpha_rate, flow.family.field(), f, settings));
}

/// Gf(z) = alpha f(z) - i V(z) f'(z) for f in Z0^(0,1).
inline Complex apply_generator(const IsometryFlow& flow, const AnalyticFunction& f, Complex z,
                               const NormSettings& settings = {}) {
  require_in_disc(z);
  require_membership(f, SpaceVariant::Z0_01, settings);
  return eval(generator_image(flow, f, settings.evaluation), z);
}

inline GeneratorReport generator_report(const IsometryFlow& flow, const AnalyticFunction& f, Complex z,
                                        const NormSettings& settings = {}) {
  GeneratorReport report;
  report.field_closed = generator_field(flow.family, z, FieldMode::closed);
  report.field_fd = generator_field(flow.family, z, FieldMode::fd);
  report.generator_value = apply_generator(flow, f, z, settings);
  report.discrepancy = std::abs(report.field_closed - report.field_fd);
  return report;
}

/// Exact t-derivative at t = 0 of -i T_t f(z) for the integral-form group:
/// alpha f(z) - i [int_0^z f''(xi) V(xi) dxi - z f''(0) V(0)].
/// Differs from apply_generator by -i [V f' - int_0^z f'' V + z f''(0) V(0)].
inline Complex integral_flow_derivative(const IsometryFlow& flow, const AnalyticFunction& f, Complex z,
                                        const NormSettings& settings = {}) {
  require_in_disc(z);
  require_membership(f, SpaceVariant::Z0_01, settings);
  const QuadraticField& v = flow.family.field();
  auto integrand = [&](Complex xi) { return norm_second_derivative(f, xi, settings.evaluation) * v(xi); };
  const Complex moving = integrate_segment(integrand, z, settings.evaluation);
  const Complex anchor = z * norm_second_derivative(f, 0.0, settings.evaluation) * v(0.0);
  return flow.alpha_rate * eval(f, z) - kI * (moving - anchor);
}

struct ConvergenceStep {
  double t = 0.0;
  Complex quotient{};
  double error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceStep> steps;
  /// error_k / error_{k+1} for consecutive halvings.
  std::vector<double> ratios;
};

/// Difference quotients (T_t f(z) - f(z)) / (i t), t = 2^{-k}, measured
/// against `target`.
inline ConvergenceReport difference_quotient_convergence(const IsometryFlow& flow, const AnalyticFunction& f,
                                                         Complex z, Complex target, int k_first, int k_last,
                                                         const NormSettings& settings = {}) {
  ConvergenceReport report;
  const Complex base = eval(f, z);
  for (int k = k_first; k <= k_last; ++k) {
    const double t = std::ldexp(1.0, -k);
    const Complex moved = eval(apply_canonical(isometry_at(flow, t), f, settings), z);
    const Complex quotient = (moved - base) / (kI * t);
    report.steps.push_back({t, quotient, std::abs(quotient - target)});
  }
  for (std::size_t i = 0; i + 1 < report.steps.size(); ++i)
    report.ratios.push_back(report.steps[i].error / report.steps[i + 1].error);
  return report;
}

/// ‖T_t f - f‖ for each t.
inline std::vector<double> strong_continuity_profile(const IsometryFlow& flow, const AnalyticFunction& f,
                                                     const std::vector<double>& t_values,
                                                     const NormSettings& settings = {}) {
  std::vector<double> norms;
  for (double t : t_values) {
    const AnalyticFunction moved = apply_canonical(isometry_at(flow, t), f, settings);
    norms.push_back(zygmund_norm(moved - f, settings).total);
  }
  return norms;
}

struct DomainViolation {
  std::string condition;
  double magnitude = 0.0;
};

struct DomainReport {
  bool in_domain = true;
  std::vector<DomainViolation> violations;
};

inline constexpr double kDomainTolerance = 1e-10;

/// Gf must vanish with its derivative at 0 and decay at the boundary.
inline DomainReport generator_domain_check(const IsometryFlow& flow, const AnalyticFunction& f,
                                           const NormSettings& settings = {}) {
  DomainReport report;
  const AnalyticFunction g = generator_image(flow, f, settings.evaluation);
  const double value0 = std::abs(eval(g, 0.0));
  const double deriv0 = std::abs(norm_first_derivative(g, 0.0, settings.evaluation));
  if (value0 > kDomainTolerance) report.violations.push_back({"Gf(0) != 0", value0});
  if (deriv0 > kDomainTolerance) report.violations.push_back({"(Gf)'(0) != 0", deriv0});
  const auto decay = little_zygmund_check(g, settings);
  if (!decay.is_member) report.violations.push_back({"Gf not in little Zygmund space", decay.boundary_profile.back().second});
  report.in_domain = report.violations.empty();
  return report;
}

struct UnboundednessRow {
  int degree = 0;
  double ratio = 0.0;
  double value_at_zero = 0.0;
  double deriv_at_zero = 0.0;
};

/// ‖G m_n‖ / ‖m_n‖ for m_n(z) = z^n / n!, with G m_n's point values at 0
/// reported alongside.
inline std::vector<UnboundednessRow> unboundedness_probe(const IsometryFlow& flow, const std::vector<int>& degrees,
                                                         const NormSettings& settings = {}) {
  std::vector<UnboundednessRow> rows;
  for (int n : degrees) {
    if (n < 2) throw Error(ErrorKind::bad_spec, "probe degrees must be >= 2");
    const AnalyticFunction m = monomial(n);
    const AnalyticFunction g = generator_image(flow, m, settings.evaluation);
    const ZygmundNormReport image = zygmund_norm(g, settings);
    rows.push_back({n, image.total / zygmund_norm(m, settings).total, image.value_at_zero, image.deriv_at_zero});
  }
  return rows;
}

}  // namespace zyglab
