#pragma once

// Surjective isometries of the little Zygmund space and its subspace
// Z0^(0,1) = {f(0) = f'(0) = 0}, and the hermitian operators on Z0.
//
// On Z0^(0,1):  Tf(z) = e^{i alpha} int_0^z [f'(sigma(xi)) - f'(sigma(0))] dxi.
// On Z0:        Tf(z) = e^{i theta} f(0) + e^{i eta} f'(0) z + (the above).

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "analytic.hpp"
#include "moebius.hpp"
#include "parallel.hpp"
#include "zygmund.hpp"

namespace zyglab {

/// Representative of x mod 2pi in [0, 2pi).
inline double normalize_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Distance between two phases on the circle.
inline double phase_distance(double x, double y) {
  const double d = normalize_phase(x - y);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

struct CanonicalIsometry {
  double alpha = 0.0;
  DiscAutomorphism sigma;

  CanonicalIsometry() = default;
  CanonicalIsometry(double alpha_, DiscAutomorphism sigma_) : alpha(normalize_phase(alpha_)), sigma(sigma_) {}

  static CanonicalIsometry identity() { return {}; }
};

struct FullIsometry {
  double theta = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  DiscAutomorphism sigma;

  FullIsometry() = default;
  FullIsometry(double theta_, double eta_, double alpha_, DiscAutomorphism sigma_)
      : theta(normalize_phase(theta_)), eta(normalize_phase(eta_)), alpha(normalize_phase(alpha_)), sigma(sigma_) {}
};

/// (Sf)(z) = a1 f(0) + a2 f'(0) z + a3 f(z).
struct HermitianDiagonal {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

namespace detail {

/// f' for use inside operator images: closed form when the source has one,
/// Cauchy differentiation otherwise.
inline Complex source_first_derivative(const AnalyticFunction& f, Complex z, const EvaluationSettings& settings) {
  if (auto exact = f.node().closed_derivative(z, 1)) return *exact;
  return cauchy_derivative(f, z, 1, settings);
}

}  // namespace detail

/// e^{i alpha} int_0^z [f'(sigma(xi)) - f'(sigma(0))] dxi, evaluated by
/// segment quadrature. Closed-form derivatives (orders 1..3) follow from the
/// chain rule when the source provides them.
class CanonicalImageNode final : public FunctionNode {
 public:
  CanonicalImageNode(CanonicalIsometry op, AnalyticFunction source, EvaluationSettings settings)
      : op_(op),
        source_(std::move(source)),
        settings_(settings),
        phase_(std::polar(1.0, op.alpha)),
        source_closed_(source_.node().closed_derivative(0.0, 1).has_value()),
        anchor_(detail::source_first_derivative(source_, op.sigma.apply_extended(0.0), settings)) {}

  FunctionKind kind() const override { return FunctionKind::transformed; }

  Complex value(Complex z) const override {
    const FunctionNode& f = source_.node();
    auto integrand = [&](Complex xi) {
      const Complex w = op_.sigma.apply_extended(xi);
      const Complex fp = source_closed_ ? *f.closed_derivative(w, 1) : cauchy_derivative(source_, w, 1, settings_);
      return fp - anchor_;
    };
    return phase_ * integrate_segment(integrand, z, settings_);
  }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order == 0) return value(z);
    const FunctionNode& f = source_.node();
    const DiscAutomorphism& sigma = op_.sigma;
    const Complex w = sigma.apply_extended(z);
    if (order == 1) {
      const auto fp = f.closed_derivative(w, 1);
      if (!fp) return std::nullopt;
      return phase_ * (*fp - anchor_);
    }
    if (order == 2) {
      const auto fpp = f.closed_derivative(w, 2);
      if (!fpp) return std::nullopt;
      return phase_ * sigma.derivative(z) * *fpp;
    }
    if (order == 3) {
      const auto fpp = f.closed_derivative(w, 2);
      const auto fppp = f.closed_derivative(w, 3);
      if (!fpp || !fppp) return std::nullopt;
      const Complex ds = sigma.derivative(z);
      return phase_ * (sigma.second_derivative(z) * *fpp + ds * ds * *fppp);
    }
    return std::nullopt;
  }

  std::string label() const override {
    return "T[alpha=" + std::to_string(op_.alpha) + "](" + source_.label() + ")";
  }

 private:
  CanonicalIsometry op_;
  AnalyticFunction source_;
  EvaluationSettings settings_;
  Complex phase_;
  bool source_closed_;
  Complex anchor_;
};

/// Image of f under the canonical isometry. f must lie in Z0^(0,1).
inline AnalyticFunction apply_canonical(const CanonicalIsometry& op, const AnalyticFunction& f,
                                        const NormSettings& settings = {}) {
  require_membership(f, SpaceVariant::Z0_01, settings);
  return AnalyticFunction(std::make_shared<CanonicalImageNode>(op, f, settings.evaluation));
}

/// (Tf)''(z) = e^{i alpha} sigma'(z) f''(sigma(z)), bypassing quadrature.
inline Complex second_derivative_direct(const CanonicalIsometry& op, const AnalyticFunction& f, Complex z,
                                        const EvaluationSettings& settings = {}) {
  require_in_disc(z);
  const Complex w = op.sigma(z);
  return std::polar(1.0, op.alpha) * op.sigma.derivative(z) * norm_second_derivative(f, w, settings);
}

/// T1 o T2 (T2 applied first): phases add, automorphism sigma2 o sigma1.
inline CanonicalIsometry compose_isometries(const CanonicalIsometry& t1, const CanonicalIsometry& t2) {
  return {t1.alpha + t2.alpha, compose(t1.sigma, t2.sigma)};
}

inline CanonicalIsometry invert_isometry(const CanonicalIsometry& op) { return {-op.alpha, inverse(op.sigma)}; }

struct ExtremeImage {
  double phase = 0.0;
  Complex w{};
};

/// Action of the adjoint on e^{i theta} delta_z: returns (phase, w) with
/// (1-|z|^2) e^{i theta} (Tf)''(z) = e^{i phase} (1-|w|^2) f''(w) for all f.
inline ExtremeImage adjoint_on_extreme(const CanonicalIsometry& op, double theta, Complex z) {
  require_in_disc(z);
  return {normalize_phase(theta + op.alpha + std::arg(op.sigma.derivative(z))), op.sigma(z)};
}

/// Image of f in Z0 under the full isometry.
inline AnalyticFunction apply_full(const FullIsometry& op, const AnalyticFunction& f,
                                   const NormSettings& settings = {}) {
  require_membership(f, SpaceVariant::Z0, settings);
  const Complex value0 = eval(f, 0.0);
  const Complex deriv0 = norm_first_derivative(f, 0.0, settings.evaluation);
  auto integral_part = AnalyticFunction(
      std::make_shared<CanonicalImageNode>(CanonicalIsometry{op.alpha, op.sigma}, f, settings.evaluation));
  return linear_combination({{1.0, integral_part}},
                            {std::polar(1.0, op.theta) * value0, std::polar(1.0, op.eta) * deriv0},
                            "Tfull(" + f.label() + ")");
}

inline AnalyticFunction hermitian_apply(const HermitianDiagonal& s, const AnalyticFunction& f,
                                        const NormSettings& settings = {}) {
  require_membership(f, SpaceVariant::Z0, settings);
  const Complex value0 = eval(f, 0.0);
  const Complex deriv0 = norm_first_derivative(f, 0.0, settings.evaluation);
  return linear_combination({{s.a3, f}}, {s.a1 * value0, s.a2 * deriv0}, "S(" + f.label() + ")");
}

/// e^{itS}: scales f(0), f'(0) z and the Z0^(0,1) remainder by their own
/// unimodular factors.
inline FullIsometry hermitian_exponential(const HermitianDiagonal& s, double t) {
  return {t * (s.a1 + s.a3), t * (s.a2 + s.a3), t * s.a3, DiscAutomorphism::identity()};
}

// ---------------------------------------------------------------------------
// Norm-preservation verifier
// ---------------------------------------------------------------------------

struct IsometryRow {
  std::string label;
  double norm_before = 0.0;
  double norm_after = 0.0;
  double relative_deviation = 0.0;
};

struct IsometryVerification {
  double max_relative_deviation = 0.0;
  std::vector<IsometryRow> rows;
};

using AnyIsometry = std::variant<CanonicalIsometry, FullIsometry>;

inline AnalyticFunction apply_isometry(const AnyIsometry& op, const AnalyticFunction& f,
                                       const NormSettings& settings = {}) {
  return std::visit(
      [&](const auto& t) -> AnalyticFunction {
        if constexpr (std::is_same_v<std::decay_t<decltype(t)>, CanonicalIsometry>)
          return apply_canonical(t, f, settings);
        else
          return apply_full(t, f, settings);
      },
      op);
}

/// |‖Tf‖ - ‖f‖| / ‖f‖ for each suite member; members are processed in
/// parallel when settings.threads > 1 with order-preserving output.
inline IsometryVerification verify_isometry(const AnyIsometry& op, const std::vector<AnalyticFunction>& suite,
                                            const NormSettings& settings = {}) {
  IsometryVerification out;
  out.rows.resize(suite.size());
  NormSettings inner = settings;
  inner.threads = 1;
  parallel_for(suite.size(), settings.threads, [&](std::size_t i) {
    const AnalyticFunction& f = suite[i];
    const double before = zygmund_norm(f, inner).total;
    const double after = zygmund_norm(apply_isometry(op, f, inner), inner).total;
    IsometryRow row{f.label(), before, after, 0.0};
    row.relative_deviation = before > 0.0 ? std::abs(after - before) / before : std::abs(after);
    out.rows[i] = row;
  });
  for (const auto& row : out.rows) out.max_relative_deviation = std::max(out.max_relative_deviation, row.relative_deviation);
  return out;
}

inline CanonicalIsometry random_canonical_isometry(SplitMix64& rng, double max_radius = 0.8) {
  const double alpha = rng.angle();
  return {alpha, random_automorphism(rng, max_radius)};
}

}  // namespace zyglab
