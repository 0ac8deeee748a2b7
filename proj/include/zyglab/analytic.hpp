#pragma once

// Analytic functions on the open unit disc: point evaluation, derivatives
// (closed form where known, Cauchy integral otherwise) and straight-segment
// path integrals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "random.hpp"

namespace zyglab {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

inline bool is_finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Throws PointOutsideDisc unless z is finite with |z| < 1.
inline void require_in_disc(Complex z, const char* context = "point") {
  if (!is_finite(z)) throw Error(ErrorKind::point_outside_disc, std::string(context) + " is not finite");
  if (std::abs(z) >= 1.0) {
    std::ostringstream os;
    os << context << " " << z << " has modulus >= 1";
    throw Error(ErrorKind::point_outside_disc, os.str());
  }
}

inline std::string format_complex(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

struct EvaluationSettings {
  double derivative_circle_fraction = 0.5;
  int derivative_nodes = 64;
  int quadrature_order = 32;
  int max_subdivisions = 12;
  double abs_tolerance = 1e-12;

  void validate() const {
    if (!(derivative_circle_fraction > 0.0 && derivative_circle_fraction < 1.0))
      throw Error(ErrorKind::bad_spec, "derivative_circle_fraction must lie in (0,1)");
    if (derivative_nodes <= 0) throw Error(ErrorKind::bad_spec, "derivative_nodes must be positive");
    if (quadrature_order <= 0) throw Error(ErrorKind::bad_spec, "quadrature_order must be positive");
    if (max_subdivisions <= 0) throw Error(ErrorKind::bad_spec, "max_subdivisions must be positive");
    if (!(abs_tolerance > 0.0)) throw Error(ErrorKind::bad_spec, "abs_tolerance must be positive");
  }

  /// Radius of the Cauchy circle around z.
  double derivative_radius(Complex z) const {
    return std::min(derivative_circle_fraction * (1.0 - std::abs(z)), 0.25);
  }
};

enum class FunctionKind { polynomial, catalog, transformed };

inline const char* to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::polynomial: return "polynomial";
    case FunctionKind::catalog: return "catalog";
    case FunctionKind::transformed: return "transformed";
  }
  return "unknown";
}

/// Implementation hook behind AnalyticFunction. Nodes are immutable.
///
/// value() is called only with |z| < 1. closed_derivative() returns the
/// derivative of the given order when the node can produce it without
/// numerical differentiation (coefficients, closed forms, or chain rule
/// through an operator); otherwise nullopt.
class FunctionNode {
 public:
  virtual ~FunctionNode() = default;
  virtual FunctionKind kind() const = 0;
  virtual Complex value(Complex z) const = 0;
  virtual std::optional<Complex> closed_derivative(Complex /*z*/, int /*order*/) const { return std::nullopt; }
  virtual std::string label() const = 0;
};

/// Handle to an immutable analytic function on the disc. Cheap to copy.
class AnalyticFunction {
 public:
  explicit AnalyticFunction(std::shared_ptr<const FunctionNode> node) : node_(std::move(node)) {
    if (!node_) throw Error(ErrorKind::bad_spec, "null function node");
  }

  static AnalyticFunction polynomial(std::vector<Complex> coefficients, std::string label = {});

  FunctionKind kind() const { return node_->kind(); }
  std::string label() const { return node_->label(); }
  const FunctionNode& node() const { return *node_; }

  /// Taylor coefficients at 0 for polynomial-kind functions.
  std::optional<std::span<const Complex>> coefficients() const;

 private:
  std::shared_ptr<const FunctionNode> node_;
};

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

class PolynomialNode final : public FunctionNode {
 public:
  PolynomialNode(std::vector<Complex> coefficients, std::string label)
      : coefficients_(std::move(coefficients)), label_(std::move(label)) {
    for (Complex c : coefficients_)
      if (!is_finite(c)) throw Error(ErrorKind::bad_spec, "polynomial coefficient is not finite");
    if (label_.empty()) label_ = "polynomial(degree " + std::to_string(degree()) + ")";
  }

  FunctionKind kind() const override { return FunctionKind::polynomial; }

  Complex value(Complex z) const override { return horner(coefficients_, z); }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order < 0) return std::nullopt;
    const std::size_t k = static_cast<std::size_t>(order);
    if (k >= coefficients_.size()) return Complex{0.0, 0.0};
    // Horner over the differentiated coefficients n!/(n-k)! c_n.
    Complex acc{0.0, 0.0};
    for (std::size_t n = coefficients_.size(); n-- > k;) {
      double falling = 1.0;
      for (std::size_t j = 0; j < k; ++j) falling *= static_cast<double>(n - j);
      acc = acc * z + falling * coefficients_[n];
    }
    return acc;
  }

  std::string label() const override { return label_; }

  std::span<const Complex> coefficients() const { return coefficients_; }

  std::size_t degree() const {
    std::size_t d = coefficients_.size();
    while (d > 0 && coefficients_[d - 1] == Complex{}) --d;
    return d == 0 ? 0 : d - 1;
  }

  static Complex horner(std::span<const Complex> coefficients, Complex z) {
    Complex acc{0.0, 0.0};
    for (std::size_t n = coefficients.size(); n-- > 0;) acc = acc * z + coefficients[n];
    return acc;
  }

 private:
  std::vector<Complex> coefficients_;
  std::string label_;
};

inline AnalyticFunction AnalyticFunction::polynomial(std::vector<Complex> coefficients, std::string label) {
  return AnalyticFunction(std::make_shared<PolynomialNode>(std::move(coefficients), std::move(label)));
}

inline std::optional<std::span<const Complex>> AnalyticFunction::coefficients() const {
  if (const auto* poly = dynamic_cast<const PolynomialNode*>(node_.get())) return poly->coefficients();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Catalog functions
// ---------------------------------------------------------------------------

/// f(z) = (1-|z0|^2)(-1/conj(z0)) [z + Log(1 - conj(z0) z)/conj(z0)], whose
/// weighted second derivative (1-|z|^2) f''(z) has modulus 1 at z0 and
/// strictly less elsewhere. Requires 0 < |z0| < 1.
class PeakingNode final : public FunctionNode {
 public:
  explicit PeakingNode(Complex z0) : z0_(z0), zb_(std::conj(z0)), scale_(1.0 - std::norm(z0)) {
    if (!is_finite(z0) || std::abs(z0) >= 1.0 || z0 == Complex{})
      throw Error(ErrorKind::bad_spec, "peaking node requires 0 < |z0| < 1");
  }

  FunctionKind kind() const override { return FunctionKind::catalog; }

  Complex value(Complex z) const override {
    const Complex w = zb_ * z;
    // (w + Log(1-w)) cancels badly for small w; switch to the series
    // -sum_{k>=2} w^k/k there.
    Complex tail;
    if (std::abs(w) < 0.5) {
      Complex power = w;
      tail = Complex{};
      for (int k = 2; k < 200; ++k) {
        power *= w;
        const Complex term = power / static_cast<double>(k);
        tail -= term;
        if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
      }
    } else {
      tail = w + std::log(1.0 - w);
    }
    return -scale_ * tail / (zb_ * zb_);
  }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order == 0) return value(z);
    const Complex d = 1.0 - zb_ * z;
    if (order == 1) return scale_ * z / d;
    // f^{(k)}(z) = (1-|z0|^2) (k-1)! conj(z0)^{k-2} / (1 - conj(z0) z)^k, k >= 2.
    double factorial = 1.0;
    for (int j = 2; j < order; ++j) factorial *= j;
    return scale_ * factorial * std::pow(zb_, order - 2) / std::pow(d, order);
  }

  std::string label() const override { return "peaking(" + format_complex(z0_) + ")"; }

  Complex center() const { return z0_; }

 private:
  Complex z0_;
  Complex zb_;
  double scale_;
};

/// f(z) = (1-z) Log(1-z) + z, so f(0) = f'(0) = 0 and f''(z) = 1/(1-z).
/// In the Zygmund space but not in the little Zygmund space.
class LogSingularNode final : public FunctionNode {
 public:
  FunctionKind kind() const override { return FunctionKind::catalog; }

  Complex value(Complex z) const override {
    const Complex u = 1.0 - z;
    return u * std::log(u) + z;
  }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order == 0) return value(z);
    const Complex u = 1.0 - z;
    if (order == 1) return -std::log(u);
    double factorial = 1.0;
    for (int j = 2; j < order - 1; ++j) factorial *= j;
    return factorial / std::pow(u, order - 1);
  }

  std::string label() const override { return "log_singular"; }
};

// ---------------------------------------------------------------------------
// Linear combinations
// ---------------------------------------------------------------------------

/// sum_i c_i f_i + p, with p a polynomial.
class CombinationNode final : public FunctionNode {
 public:
  using Term = std::pair<Complex, AnalyticFunction>;

  CombinationNode(std::vector<Term> terms, std::vector<Complex> polynomial, std::string label)
      : terms_(std::move(terms)), polynomial_(std::move(polynomial), "p"), label_(std::move(label)) {}

  FunctionKind kind() const override { return FunctionKind::transformed; }

  Complex value(Complex z) const override {
    Complex acc = polynomial_.value(z);
    for (const auto& [c, f] : terms_) acc += c * f.node().value(z);
    return acc;
  }

  std::optional<Complex> closed_derivative(Complex z, int order) const override {
    if (order == 0) return value(z);
    Complex acc = *polynomial_.closed_derivative(z, order);
    for (const auto& [c, f] : terms_) {
      const auto d = f.node().closed_derivative(z, order);
      if (!d) return std::nullopt;
      acc += c * *d;
    }
    return acc;
  }

  std::string label() const override { return label_; }

 private:
  std::vector<Term> terms_;
  PolynomialNode polynomial_;
  std::string label_;
};

/// sum_i c_i f_i + p. Collapses to a polynomial when every f_i is one.
inline AnalyticFunction linear_combination(std::vector<std::pair<Complex, AnalyticFunction>> terms,
                                           std::vector<Complex> polynomial = {}, std::string label = {}) {
  bool all_polynomial = true;
  for (const auto& term : terms) all_polynomial = all_polynomial && term.second.coefficients().has_value();
  if (label.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) os << " + ";
      os << "(" << format_complex(terms[i].first) << ")*" << terms[i].second.label();
    }
    if (!polynomial.empty()) os << (terms.empty() ? "" : " + ") << "p";
    label = os.str();
  }
  if (all_polynomial) {
    std::vector<Complex> sum = std::move(polynomial);
    for (const auto& [c, f] : terms) {
      const auto coeffs = *f.coefficients();
      if (sum.size() < coeffs.size()) sum.resize(coeffs.size());
      for (std::size_t n = 0; n < coeffs.size(); ++n) sum[n] += c * coeffs[n];
    }
    return AnalyticFunction::polynomial(std::move(sum), std::move(label));
  }
  return AnalyticFunction(std::make_shared<CombinationNode>(std::move(terms), std::move(polynomial), std::move(label)));
}

inline AnalyticFunction operator+(const AnalyticFunction& f, const AnalyticFunction& g) {
  return linear_combination({{1.0, f}, {1.0, g}}, {}, f.label() + " + " + g.label());
}

inline AnalyticFunction operator-(const AnalyticFunction& f, const AnalyticFunction& g) {
  return linear_combination({{1.0, f}, {-1.0, g}}, {}, f.label() + " - " + g.label());
}

inline AnalyticFunction operator*(Complex c, const AnalyticFunction& f) {
  return linear_combination({{c, f}}, {}, "(" + format_complex(c) + ")*" + f.label());
}

// ---------------------------------------------------------------------------
// Evaluation, differentiation, integration
// ---------------------------------------------------------------------------

/// f(z) for |z| < 1.
inline Complex eval(const AnalyticFunction& f, Complex z) {
  require_in_disc(z);
  const Complex value = f.node().value(z);
  if (!is_finite(value))
    throw Error(ErrorKind::evaluation_singularity, f.label() + " is singular at " + format_complex(z));
  return value;
}

/// Derivative of the given order from closed forms only: coefficients,
/// catalog formulas, or the chain rule through operator images. nullopt
/// when some component lacks a closed form.
inline std::optional<Complex> closed_form_derivative(const AnalyticFunction& f, Complex z, int order) {
  require_in_disc(z);
  return f.node().closed_derivative(z, order);
}

/// Cauchy integral differentiation of any callable analytic near z.
///
/// Trapezoid rule with N and 2N nodes on the circle |xi - z| = rho; the two
/// estimates must agree within abs_tolerance, or within the roundoff floor
/// k! * max|f| * eps / rho^k scaled by 256 when that is larger.
template <class Fn>
Complex cauchy_derivative_of(Fn&& fn, Complex z, int order, const EvaluationSettings& settings) {
  require_in_disc(z);
  if (order < 1) throw Error(ErrorKind::bad_spec, "derivative order must be positive");
  const double rho = settings.derivative_radius(z);
  const int coarse = settings.derivative_nodes;
  const int fine = 2 * coarse;

  Complex sum_fine{};
  Complex sum_coarse{};
  double max_modulus = 0.0;
  for (int j = 0; j < fine; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / fine;
    const Complex unit = std::polar(1.0, angle);
    const Complex value = fn(z + rho * unit);
    if (!is_finite(value))
      throw Error(ErrorKind::evaluation_singularity, "non-finite value on the Cauchy circle");
    max_modulus = std::max(max_modulus, std::abs(value));
    const Complex term = value * std::polar(1.0, -order * angle);
    sum_fine += term;
    if (j % 2 == 0) sum_coarse += term;
  }
  double factorial = 1.0;
  for (int j = 2; j <= order; ++j) factorial *= j;
  const double scale = factorial / std::pow(rho, order);
  const Complex estimate_fine = scale * sum_fine / static_cast<double>(fine);
  const Complex estimate_coarse = scale * sum_coarse / static_cast<double>(coarse);

  const double floor = 256.0 * std::numeric_limits<double>::epsilon() * scale * max_modulus;
  const double change = std::abs(estimate_fine - estimate_coarse);
  if (change > std::max(settings.abs_tolerance, floor)) {
    std::ostringstream os;
    os << "Cauchy derivative of order " << order << " at " << format_complex(z) << " changed by " << change
       << " when doubling nodes";
    throw Error(ErrorKind::convergence_failure, os.str());
  }
  return estimate_fine;
}

/// Cauchy integral differentiation of f, regardless of kind.
inline Complex cauchy_derivative(const AnalyticFunction& f, Complex z, int order,
                                 const EvaluationSettings& settings = {}) {
  const FunctionNode& node = f.node();
  return cauchy_derivative_of([&node](Complex xi) { return node.value(xi); }, z, order, settings);
}

/// f^{(order)}(z), order in {1, 2, 3}. Polynomial and catalog functions use
/// their exact derivatives; operator-produced functions are differentiated
/// numerically on a Cauchy circle.
inline Complex derivative(const AnalyticFunction& f, Complex z, int order, const EvaluationSettings& settings = {}) {
  require_in_disc(z);
  if (order < 1 || order > 3) throw Error(ErrorKind::bad_spec, "derivative order must be 1, 2 or 3");
  if (f.kind() != FunctionKind::transformed) {
    if (auto exact = f.node().closed_derivative(z, order)) {
      if (!is_finite(*exact))
        throw Error(ErrorKind::evaluation_singularity, f.label() + " derivative is singular");
      return *exact;
    }
  }
  return cauchy_derivative(f, z, order, settings);
}

/// Integral of g along the segment [0, endpoint].
///
/// Gauss-Legendre with quadrature_order nodes on 2^L equal panels, L = 0, 1,
/// ..., until two consecutive levels agree within abs_tolerance (or the
/// roundoff floor of the panel sums). Throws ConvergenceFailure past
/// max_subdivisions levels.
template <class Fn>
Complex integrate_segment(Fn&& g, Complex endpoint, const EvaluationSettings& settings = {}) {
  require_in_disc(endpoint, "endpoint");
  if (endpoint == Complex{}) return Complex{};
  const GaussLegendreRule& rule = gauss_legendre(static_cast<std::size_t>(settings.quadrature_order));

  auto level_sum = [&](int level, double& magnitude) {
    const std::int64_t panels = std::int64_t{1} << level;
    const Complex h = endpoint / static_cast<double>(panels);
    Complex total{};
    magnitude = 0.0;
    for (std::int64_t p = 0; p < panels; ++p) {
      const Complex mid = (static_cast<double>(p) + 0.5) * h;
      Complex panel{};
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Complex value = g(mid + 0.5 * rule.nodes[i] * h);
        magnitude += rule.weights[i] * std::abs(value);
        panel += rule.weights[i] * value;
      }
      total += panel;
    }
    magnitude *= 0.5 * std::abs(h);
    return 0.5 * h * total;
  };

  double magnitude = 0.0;
  Complex previous = level_sum(0, magnitude);
  if (!is_finite(previous)) throw Error(ErrorKind::evaluation_singularity, "non-finite integrand");
  for (int level = 1; level <= settings.max_subdivisions; ++level) {
    const Complex current = level_sum(level, magnitude);
    if (!is_finite(current)) throw Error(ErrorKind::evaluation_singularity, "non-finite integrand");
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
    if (std::abs(current - previous) <= std::max(settings.abs_tolerance, floor)) return current;
    previous = current;
  }
  throw Error(ErrorKind::convergence_failure,
              "segment quadrature to " + format_complex(endpoint) + " did not converge");
}

/// Integral of g from 0 to endpoint along the straight segment.
inline Complex path_integral(const AnalyticFunction& g, Complex endpoint, const EvaluationSettings& settings = {}) {
  const FunctionNode& node = g.node();
  return integrate_segment([&node](Complex xi) { return node.value(xi); }, endpoint, settings);
}

// ---------------------------------------------------------------------------
// Test-function catalog
// ---------------------------------------------------------------------------

/// m_k(z) = z^k / k!.
struct MonomialSpec {
  int k = 2;
};

struct PeakingSpec {
  Complex z0{};
};

/// Coefficients of degrees 2..degree uniform on [-1,1) x [-1,1) from
/// SplitMix64(seed); degrees 0 and 1 are zero.
struct RandomPolySpec {
  int degree = 2;
  std::uint64_t seed = 0;
};

struct PolynomialSpec {
  std::vector<Complex> coefficients;
};

struct LogSingularSpec {};

using FunctionSpec = std::variant<MonomialSpec, PeakingSpec, RandomPolySpec, PolynomialSpec, LogSingularSpec>;

inline AnalyticFunction monomial(int k) {
  if (k < 0) throw Error(ErrorKind::bad_spec, "monomial degree must be nonnegative");
  std::vector<Complex> coefficients(static_cast<std::size_t>(k) + 1);
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  coefficients.back() = 1.0 / factorial;
  return AnalyticFunction::polynomial(std::move(coefficients), "m" + std::to_string(k));
}

/// Peaking function for z0; z0 = 0 gives z^2/2.
inline AnalyticFunction peaking(Complex z0) {
  if (!is_finite(z0) || std::abs(z0) >= 1.0) throw Error(ErrorKind::bad_spec, "peaking center must satisfy |z0| < 1");
  if (z0 == Complex{}) return AnalyticFunction::polynomial({0.0, 0.0, 0.5}, "peaking(0)");
  return AnalyticFunction(std::make_shared<PeakingNode>(z0));
}

inline AnalyticFunction random_polynomial(int degree, std::uint64_t seed) {
  if (degree < 2) throw Error(ErrorKind::bad_spec, "random polynomial degree must be >= 2");
  SplitMix64 rng(seed);
  std::vector<Complex> coefficients(static_cast<std::size_t>(degree) + 1);
  for (int n = 2; n <= degree; ++n) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    coefficients[static_cast<std::size_t>(n)] = {re, im};
  }
  return AnalyticFunction::polynomial(std::move(coefficients),
                                      "random_poly(" + std::to_string(degree) + "," + std::to_string(seed) + ")");
}

inline AnalyticFunction make_test_function(const FunctionSpec& spec) {
  return std::visit(
      [](const auto& s) -> AnalyticFunction {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MonomialSpec>) {
          if (s.k < 2) throw Error(ErrorKind::bad_spec, "monomial test functions need k >= 2");
          return monomial(s.k);
        } else if constexpr (std::is_same_v<S, PeakingSpec>) {
          return peaking(s.z0);
        } else if constexpr (std::is_same_v<S, RandomPolySpec>) {
          return random_polynomial(s.degree, s.seed);
        } else if constexpr (std::is_same_v<S, PolynomialSpec>) {
          if (s.coefficients.empty()) throw Error(ErrorKind::bad_spec, "empty coefficient list");
          return AnalyticFunction::polynomial(s.coefficients);
        } else {
          return AnalyticFunction(std::make_shared<LogSingularNode>());
        }
      },
      spec);
}

}  // namespace zyglab
