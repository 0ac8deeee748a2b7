#pragma once

// Disc automorphisms in canonical form sigma(z) = lambda (z - a) / (1 - conj(a) z).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "errors.hpp"

namespace zyglab {

/// Coefficients of z -> (A z + B) / (C z + D).
struct MobiusMatrix {
  Complex A, B, C, D;

  friend MobiusMatrix operator*(const MobiusMatrix& left, const MobiusMatrix& right) {
    return {left.A * right.A + left.B * right.C, left.A * right.B + left.B * right.D,
            left.C * right.A + left.D * right.C, left.C * right.B + left.D * right.D};
  }
};

class DiscAutomorphism {
 public:
  static constexpr double kUnimodularTolerance = 1e-12;
  static constexpr double kIdentityTolerance = 1e-12;

  DiscAutomorphism() = default;

  /// Requires ||lambda| - 1| <= 1e-12 and |a| < 1; lambda is renormalized to
  /// exact unit modulus.
  DiscAutomorphism(Complex lambda, Complex a) : lambda_(lambda), a_(a) {
    if (!is_finite(lambda) || std::abs(std::abs(lambda) - 1.0) > kUnimodularTolerance)
      throw Error(ErrorKind::bad_spec, "automorphism phase must be unimodular");
    if (!is_finite(a) || std::abs(a) >= 1.0) throw Error(ErrorKind::bad_spec, "automorphism zero must lie in the disc");
    lambda_ /= std::abs(lambda_);
  }

  static DiscAutomorphism identity() { return {}; }
  static DiscAutomorphism rotation(double angle) { return {std::polar(1.0, angle), 0.0}; }

  /// Renormalizes (A z + B)/(C z + D) into canonical form: a is the preimage
  /// of 0, lambda = sigma'(a) (1 - |a|^2). Throws `failure` when the map is
  /// not a disc automorphism to working precision.
  static DiscAutomorphism from_matrix(const MobiusMatrix& m, ErrorKind failure = ErrorKind::degenerate_composite) {
    const double scale = std::max({std::abs(m.A), std::abs(m.B), std::abs(m.C), std::abs(m.D)});
    if (!(scale > 0.0) || std::abs(m.A) <= 1e-300 * scale)
      throw Error(failure, "Mobius map sends no finite point to 0");
    const Complex a = -m.B / m.A;
    if (!is_finite(a) || std::abs(a) >= 1.0) throw Error(failure, "renormalized zero has modulus >= 1");
    const Complex det = m.A * m.D - m.B * m.C;
    const Complex denom = m.C * a + m.D;
    Complex lambda = det / (denom * denom) * (1.0 - std::norm(a));
    if (!is_finite(lambda) || std::abs(std::abs(lambda) - 1.0) > 1e-9)
      throw Error(failure, "renormalized phase is not unimodular");
    lambda /= std::abs(lambda);
    DiscAutomorphism result;
    result.lambda_ = lambda;
    result.a_ = a;
    return result;
  }

  Complex lambda() const { return lambda_; }
  Complex a() const { return a_; }

  MobiusMatrix matrix() const { return {lambda_, -lambda_ * a_, -std::conj(a_), 1.0}; }

  bool is_identity(double tolerance = kIdentityTolerance) const {
    return std::abs(lambda_ - 1.0) <= tolerance && std::abs(a_) <= tolerance;
  }

  /// sigma(z) for |z| < 1.
  Complex operator()(Complex z) const {
    require_in_disc(z);
    return apply_extended(z);
  }

  /// sigma(z) without the disc check; valid on the closed disc and anywhere
  /// off the pole 1/conj(a).
  Complex apply_extended(Complex z) const { return lambda_ * (z - a_) / (1.0 - std::conj(a_) * z); }

  /// sigma'(z) = lambda (1 - |a|^2) / (1 - conj(a) z)^2.
  Complex derivative(Complex z) const {
    require_in_disc(z);
    const Complex d = 1.0 - std::conj(a_) * z;
    return lambda_ * (1.0 - std::norm(a_)) / (d * d);
  }

  /// sigma''(z) = 2 lambda (1 - |a|^2) conj(a) / (1 - conj(a) z)^3.
  Complex second_derivative(Complex z) const {
    require_in_disc(z);
    const Complex d = 1.0 - std::conj(a_) * z;
    return 2.0 * lambda_ * (1.0 - std::norm(a_)) * std::conj(a_) / (d * d * d);
  }

 private:
  Complex lambda_{1.0, 0.0};
  Complex a_{0.0, 0.0};
};

inline Complex moebius_eval(const DiscAutomorphism& sigma, Complex z) { return sigma(z); }

inline Complex moebius_derivative(const DiscAutomorphism& sigma, Complex z) { return sigma.derivative(z); }

/// second o first.
inline DiscAutomorphism compose(const DiscAutomorphism& first, const DiscAutomorphism& second) {
  return DiscAutomorphism::from_matrix(second.matrix() * first.matrix());
}

inline DiscAutomorphism inverse(const DiscAutomorphism& sigma) {
  return {std::conj(sigma.lambda()), -sigma.lambda() * sigma.a()};
}

// ---------------------------------------------------------------------------
// Fixed points and classification
// ---------------------------------------------------------------------------

enum class AutomorphismClass { identity, elliptic, hyperbolic, parabolic };

inline const char* to_string(AutomorphismClass c) {
  switch (c) {
    case AutomorphismClass::identity: return "identity";
    case AutomorphismClass::elliptic: return "elliptic";
    case AutomorphismClass::hyperbolic: return "hyperbolic";
    case AutomorphismClass::parabolic: return "parabolic";
  }
  return "unknown";
}

/// Point of the extended plane.
struct ExtendedPoint {
  bool at_infinity = false;
  Complex value{};

  static ExtendedPoint infinity() { return {true, {}}; }
  static ExtendedPoint finite(Complex z) { return {false, z}; }
};

struct FixedPointReport {
  AutomorphismClass type = AutomorphismClass::identity;
  std::vector<ExtendedPoint> points;
  /// 4|a|^2 - |lambda - 1|^2; the fixed-point equation has discriminant
  /// lambda * invariant, so its sign decides the class.
  double invariant = 0.0;
};

/// Thresholds for classification.
struct ClassificationTolerances {
  double on_circle = 1e-9;
  /// |4|a|^2 - |lambda-1|^2| at or below this means a double fixed point.
  double double_root = 1e-12;
};

/// Solves conj(a) z^2 + (lambda - 1) z - lambda a = 0 on the extended plane.
inline FixedPointReport fixed_points(const DiscAutomorphism& sigma, const ClassificationTolerances& tol = {}) {
  FixedPointReport report;
  const Complex lambda = sigma.lambda();
  const Complex a = sigma.a();
  if (sigma.is_identity()) return report;

  if (std::abs(a) <= DiscAutomorphism::kIdentityTolerance) {
    // Affine: lambda z = z fixes 0 and infinity.
    report.type = AutomorphismClass::elliptic;
    report.points = {ExtendedPoint::finite(0.0), ExtendedPoint::infinity()};
    report.invariant = 4.0 * std::norm(a) - std::norm(lambda - 1.0);
    return report;
  }

  const Complex qa = std::conj(a);
  const Complex qb = lambda - 1.0;
  const Complex qc = -lambda * a;
  const double invariant = 4.0 * std::norm(a) - std::norm(lambda - 1.0);
  report.invariant = invariant;

  if (std::abs(invariant) <= tol.double_root) {
    report.type = AutomorphismClass::parabolic;
    report.points = {ExtendedPoint::finite(-qb / (2.0 * qa))};
    return report;
  }

  const Complex root_disc = std::sqrt(lambda) * (invariant > 0 ? Complex(std::sqrt(invariant), 0.0)
                                                               : Complex(0.0, std::sqrt(-invariant)));
  const Complex plus = qb + root_disc;
  const Complex minus = qb - root_disc;
  const Complex q = -0.5 * (std::abs(plus) >= std::abs(minus) ? plus : minus);
  Complex r1 = q / qa;
  Complex r2 = qc / q;

  if (invariant < 0) {
    report.type = AutomorphismClass::elliptic;
    if (std::abs(r2) < std::abs(r1)) std::swap(r1, r2);
  } else {
    report.type = AutomorphismClass::hyperbolic;
    if (std::arg(r2) < std::arg(r1)) std::swap(r1, r2);
  }
  report.points = {ExtendedPoint::finite(r1), ExtendedPoint::finite(r2)};
  return report;
}

/// Uniformly random phase and zero with |a| <= max_radius (area-uniform).
inline DiscAutomorphism random_automorphism(SplitMix64& rng, double max_radius = 0.8) {
  const Complex lambda = std::polar(1.0, rng.angle());
  const double radius = max_radius * std::sqrt(rng.uniform());
  const Complex a = std::polar(radius, rng.angle());
  return {lambda, a};
}

}  // namespace zyglab
