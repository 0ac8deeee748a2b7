#pragma once

// Zygmund norm, the embedding f -> (1-|z|^2) f''(z), little-Zygmund and
// subspace membership, extreme-point functionals of the dual balls.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace zyglab {

struct NormSettings {
  EvaluationSettings evaluation;
  int radii = 64;
  int angles = 256;
  double r_max = 0.999;
  double simplex_tolerance = 1e-10;
  int max_simplex_iterations = 5000;
  /// Number of grid local maxima refined; the best refined value wins.
  int refine_seeds = 4;
  unsigned threads = 1;

  void validate() const {
    evaluation.validate();
    if (radii < 1 || angles < 1) throw Error(ErrorKind::bad_spec, "grid dimensions must be positive");
    if (!(r_max > 0.0 && r_max < 1.0)) throw Error(ErrorKind::bad_spec, "r_max must lie in (0,1)");
    if (!(simplex_tolerance > 0.0)) throw Error(ErrorKind::bad_spec, "simplex_tolerance must be positive");
    if (refine_seeds < 1) throw Error(ErrorKind::bad_spec, "refine_seeds must be positive");
  }
};

/// r_j = 1 - (1 - r_max)^{j/(n-1)}, clustered toward r_max.
inline std::vector<double> clustered_radii(int count, double r_max) {
  std::vector<double> radii(static_cast<std::size_t>(count), 0.0);
  if (count == 1) return radii;
  for (int j = 0; j < count; ++j)
    radii[static_cast<std::size_t>(j)] =
        1.0 - std::pow(1.0 - r_max, static_cast<double>(j) / static_cast<double>(count - 1));
  return radii;
}

inline double angle_of(Complex z) {
  const double theta = std::arg(z);
  return theta < 0.0 ? theta + 2.0 * std::numbers::pi : theta;
}

/// Ordering for deterministic max-reduction: larger value, then smaller
/// modulus, then smaller angle in [0, 2pi).
inline bool better_candidate(double value, Complex z, double other_value, Complex other_z) {
  if (value != other_value) return value > other_value;
  const double m = std::abs(z), om = std::abs(other_z);
  if (m != om) return m < om;
  return angle_of(z) < angle_of(other_z);
}

struct SupremumResult {
  double value = 0.0;
  Complex argmax{};
  double grid_value = 0.0;
  Complex grid_argmax{};
  int radii = 0;
  int angles = 0;
  int refinement_iterations = 0;
  bool grid_too_coarse = false;
};

namespace detail {

struct SimplexOutcome {
  Complex point;
  double value;
  int iterations;
};

/// Nelder-Mead on -objective over the closed disc |z| <= r_max.
template <class Objective>
SimplexOutcome refine_simplex(Objective& objective, std::array<Complex, 3> vertices, const NormSettings& settings) {
  auto cost = [&](Complex z) {
    if (std::abs(z) > settings.r_max) return std::numeric_limits<double>::infinity();
    return -objective(z);
  };
  std::array<double, 3> costs{};
  for (std::size_t i = 0; i < 3; ++i) costs[i] = cost(vertices[i]);

  int iteration = 0;
  for (; iteration < settings.max_simplex_iterations; ++iteration) {
    // Sort ascending by cost (best first).
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return costs[i] < costs[j]; });
    std::array<Complex, 3> v{vertices[order[0]], vertices[order[1]], vertices[order[2]]};
    std::array<double, 3> c{costs[order[0]], costs[order[1]], costs[order[2]]};
    vertices = v;
    costs = c;

    const double diameter =
        std::max({std::abs(v[0] - v[1]), std::abs(v[0] - v[2]), std::abs(v[1] - v[2])});
    if (diameter < settings.simplex_tolerance) break;

    const Complex centroid = 0.5 * (v[0] + v[1]);
    const Complex reflected = centroid + (centroid - v[2]);
    const double reflected_cost = cost(reflected);
    if (reflected_cost < c[0]) {
      const Complex expanded = centroid + 2.0 * (centroid - v[2]);
      const double expanded_cost = cost(expanded);
      if (expanded_cost < reflected_cost) {
        vertices[2] = expanded;
        costs[2] = expanded_cost;
      } else {
        vertices[2] = reflected;
        costs[2] = reflected_cost;
      }
      continue;
    }
    if (reflected_cost < c[1]) {
      vertices[2] = reflected;
      costs[2] = reflected_cost;
      continue;
    }
    const bool outside = reflected_cost < c[2];
    const Complex contracted = outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (v[2] - centroid);
    const double contracted_cost = cost(contracted);
    if (contracted_cost < (outside ? reflected_cost : c[2])) {
      vertices[2] = contracted;
      costs[2] = contracted_cost;
      continue;
    }
    for (std::size_t i = 1; i < 3; ++i) {
      vertices[i] = v[0] + 0.5 * (vertices[i] - v[0]);
      costs[i] = cost(vertices[i]);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (costs[i] < costs[best]) best = i;
  return {vertices[best], -costs[best], iteration};
}

}  // namespace detail

/// Supremum of a nonnegative objective over the disc: polar grid scan
/// clustered toward r_max, then simplex refinement from the best grid
/// local maxima. Deterministic for any thread count.
template <class Objective>
SupremumResult maximize_on_disc(Objective&& objective, const NormSettings& settings) {
  settings.validate();
  const std::vector<double> radii = clustered_radii(settings.radii, settings.r_max);
  const auto n_r = static_cast<std::size_t>(settings.radii);
  const auto n_t = static_cast<std::size_t>(settings.angles);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(settings.angles);

  auto grid_point = [&](std::size_t j, std::size_t k) { return std::polar(radii[j], step * static_cast<double>(k)); };

  std::vector<double> values(n_r * n_t, 0.0);
  parallel_for(n_r, settings.threads, [&](std::size_t j) {
    if (radii[j] == 0.0) {
      const double center = objective(Complex{});
      for (std::size_t k = 0; k < n_t; ++k) values[j * n_t + k] = center;
      return;
    }
    for (std::size_t k = 0; k < n_t; ++k) values[j * n_t + k] = objective(grid_point(j, k));
  });

  struct Cell {
    double value;
    Complex z;
    std::size_t j;
  };
  std::vector<Cell> maxima;
  Cell best{values[0], grid_point(0, 0), 0};
  for (std::size_t j = 0; j < n_r; ++j) {
    for (std::size_t k = 0; k < n_t; ++k) {
      const double v = values[j * n_t + k];
      const Complex z = grid_point(j, k);
      if (better_candidate(v, z, best.value, best.z)) best = {v, z, j};
      if (radii[j] == 0.0 && k > 0) continue;
      bool local = true;
      for (int dj = -1; dj <= 1 && local; ++dj) {
        const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
        if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(n_r)) continue;
        for (int dk = -1; dk <= 1 && local; ++dk) {
          if (dj == 0 && dk == 0) continue;
          const std::size_t kk = (k + n_t + static_cast<std::size_t>(dk + 1) - 1) % n_t;  // k + dk, cyclic
          if (values[static_cast<std::size_t>(jj) * n_t + kk] > v) local = false;
        }
      }
      if (local) maxima.push_back({v, z, j});
    }
  }
  std::sort(maxima.begin(), maxima.end(),
            [](const Cell& x, const Cell& y) { return better_candidate(x.value, x.z, y.value, y.z); });
  if (maxima.empty() || maxima.front().value < best.value) maxima.insert(maxima.begin(), best);
  if (maxima.size() > static_cast<std::size_t>(settings.refine_seeds))
    maxima.resize(static_cast<std::size_t>(settings.refine_seeds));

  SupremumResult result;
  result.radii = settings.radii;
  result.angles = settings.angles;
  result.grid_value = best.value;
  result.grid_argmax = best.z;
  result.value = best.value;
  result.argmax = best.z;

  for (const Cell& seed : maxima) {
    const std::size_t j = seed.j;
    const double r = radii[j];
    const double below = j > 0 ? radii[j - 1] : 0.0;
    const double above = j + 1 < n_r ? radii[j + 1] : settings.r_max;
    double dr = 0.5 * (above - below);
    if (dr <= 0.0) dr = 1e-3;
    std::array<Complex, 3> simplex;
    if (r == 0.0) {
      simplex = {seed.z, Complex(dr, 0.0), Complex(0.0, dr)};
    } else {
      const Complex radial = seed.z / r;
      simplex = {seed.z, seed.z - dr * radial, seed.z + std::min(r * step, dr) * kI * radial};
    }
    const auto outcome = detail::refine_simplex(objective, simplex, settings);
    result.refinement_iterations += outcome.iterations;
    if (better_candidate(outcome.value, outcome.point, result.value, result.argmax)) {
      result.value = outcome.value;
      result.argmax = outcome.point;
    }
  }
  result.grid_too_coarse = result.grid_value > 0.0 && result.value - result.grid_value > 0.1 * result.grid_value;
  return result;
}

// ---------------------------------------------------------------------------
// Norm
// ---------------------------------------------------------------------------

struct ZygmundNormReport {
  double value_at_zero = 0.0;
  double deriv_at_zero = 0.0;
  double seminorm = 0.0;
  Complex argmax{};
  double total = 0.0;
  int grid_radii = 0;
  int grid_angles = 0;
  int refinement_iterations = 0;
  double grid_value = 0.0;
  std::vector<std::string> warnings;
};

/// f''(z) as used by the norm: closed form (through operator structure) when
/// available, numerical derivative otherwise.
inline Complex norm_second_derivative(const AnalyticFunction& f, Complex z, const EvaluationSettings& settings) {
  if (auto exact = closed_form_derivative(f, z, 2)) {
    if (!is_finite(*exact)) throw Error(ErrorKind::evaluation_singularity, f.label() + " f'' is singular");
    return *exact;
  }
  return derivative(f, z, 2, settings);
}

inline Complex norm_first_derivative(const AnalyticFunction& f, Complex z, const EvaluationSettings& settings) {
  if (auto exact = closed_form_derivative(f, z, 1)) return *exact;
  return derivative(f, z, 1, settings);
}

/// (1 - |z|^2) f''(z).
inline Complex phi_embed(const AnalyticFunction& f, Complex z, const EvaluationSettings& settings = {}) {
  require_in_disc(z);
  return (1.0 - std::norm(z)) * norm_second_derivative(f, z, settings);
}

/// Norm from f(0), f'(0) and a callable producing f''.
template <class SecondDerivative>
ZygmundNormReport zygmund_norm_of(Complex value0, Complex deriv0, SecondDerivative&& second,
                                  const NormSettings& settings = {}) {
  auto weighted = [&second](Complex z) { return (1.0 - std::norm(z)) * std::abs(second(z)); };
  const SupremumResult sup = maximize_on_disc(weighted, settings);
  ZygmundNormReport report;
  report.value_at_zero = std::abs(value0);
  report.deriv_at_zero = std::abs(deriv0);
  report.seminorm = sup.value;
  report.argmax = sup.argmax;
  report.total = report.value_at_zero + report.deriv_at_zero + report.seminorm;
  report.grid_radii = sup.radii;
  report.grid_angles = sup.angles;
  report.refinement_iterations = sup.refinement_iterations;
  report.grid_value = sup.grid_value;
  if (sup.grid_too_coarse) report.warnings.emplace_back("GridTooCoarse: refinement improved the grid maximum by >10%");
  return report;
}

/// |f(0)| + |f'(0)| + sup (1 - |z|^2) |f''(z)|.
inline ZygmundNormReport zygmund_norm(const AnalyticFunction& f, const NormSettings& settings = {}) {
  const Complex value0 = eval(f, 0.0);
  const Complex deriv0 = norm_first_derivative(f, 0.0, settings.evaluation);
  return zygmund_norm_of(
      value0, deriv0, [&](Complex z) { return norm_second_derivative(f, z, settings.evaluation); }, settings);
}

/// sup |phi_embed(f)| by the same maximizer as the seminorm.
inline SupremumResult phi_supremum(const AnalyticFunction& f, const NormSettings& settings = {}) {
  return maximize_on_disc([&](Complex z) { return std::abs(phi_embed(f, z, settings.evaluation)); }, settings);
}

struct GridSample {
  double r;
  double theta;
  double value;
};

/// |phi_embed(f)| on the clustered polar grid, rows ordered by radius then angle.
inline std::vector<GridSample> weighted_grid(const AnalyticFunction& f, int radii, int angles, double r_max = 0.999,
                                             const EvaluationSettings& settings = {}) {
  if (radii < 1 || angles < 1) throw Error(ErrorKind::bad_spec, "grid dimensions must be positive");
  const std::vector<double> rs = clustered_radii(radii, r_max);
  std::vector<GridSample> rows;
  rows.reserve(static_cast<std::size_t>(radii) * static_cast<std::size_t>(angles));
  for (double r : rs) {
    for (int k = 0; k < angles; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / angles;
      rows.push_back({r, theta, std::abs(phi_embed(f, std::polar(r, theta), settings))});
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

struct LittleZygmundReport {
  bool is_member = false;
  /// (r, max over the angle grid of |phi_embed f(r e^{i theta})|)
  std::vector<std::pair<double, double>> boundary_profile;
};

/// Finite-sample decay test for lim_{|z|->1} (1-|z|^2)|f''(z)| = 0 at radii
/// 0.9, 0.99, 0.999, 0.9999: the profile must not increase over the last
/// three radii, and the last value must be below 1% of the profile maximum
/// or below 1e-6.
inline LittleZygmundReport little_zygmund_check(const AnalyticFunction& f, const NormSettings& settings = {}) {
  static constexpr std::array<double, 4> kRadii{0.9, 0.99, 0.999, 0.9999};
  LittleZygmundReport report;
  for (double r : kRadii) {
    double peak = 0.0;
    for (int k = 0; k < settings.angles; ++k) {
      const Complex z = std::polar(r, 2.0 * std::numbers::pi * k / settings.angles);
      peak = std::max(peak, std::abs(phi_embed(f, z, settings.evaluation)));
    }
    report.boundary_profile.emplace_back(r, peak);
  }
  const auto& p = report.boundary_profile;
  const bool non_increasing = p[2].second <= p[1].second && p[3].second <= p[2].second;
  double largest = 0.0;
  for (const auto& [r, m] : p) largest = std::max(largest, m);
  const double last = p[3].second;
  report.is_member = non_increasing && (last < 1e-2 * largest || last < 1e-6);
  return report;
}

enum class SpaceVariant { Z0, Z0_i0, Z0_i1, Z0_01 };

inline const char* to_string(SpaceVariant v) {
  switch (v) {
    case SpaceVariant::Z0: return "Z0";
    case SpaceVariant::Z0_i0: return "Z0_i0";
    case SpaceVariant::Z0_i1: return "Z0_i1";
    case SpaceVariant::Z0_01: return "Z0_01";
  }
  return "unknown";
}

inline constexpr double kPointConditionTolerance = 1e-10;

/// Point conditions of the variant (to 1e-10), then the decay condition.
inline bool membership_check(const AnalyticFunction& f, SpaceVariant variant, const NormSettings& settings = {}) {
  const bool needs_value_zero = variant == SpaceVariant::Z0_01 || variant == SpaceVariant::Z0_i0;
  const bool needs_deriv_zero = variant == SpaceVariant::Z0_01 || variant == SpaceVariant::Z0_i1;
  if (needs_value_zero && std::abs(eval(f, 0.0)) > kPointConditionTolerance) return false;
  if (needs_deriv_zero && std::abs(norm_first_derivative(f, 0.0, settings.evaluation)) > kPointConditionTolerance)
    return false;
  return little_zygmund_check(f, settings).is_member;
}

inline void require_membership(const AnalyticFunction& f, SpaceVariant variant, const NormSettings& settings = {}) {
  if (!membership_check(f, variant, settings))
    throw Error(ErrorKind::not_in_space, f.label() + " is not in " + to_string(variant));
}

// ---------------------------------------------------------------------------
// Extreme points of the dual unit balls
// ---------------------------------------------------------------------------

/// e^{i theta0} f(0) + e^{i theta1} f'(0) z0 + e^{i theta2} (1-|z0|^2) f''(z0),
/// with the terms the variant excludes dropped.
struct ExtremeFunctional {
  SpaceVariant variant = SpaceVariant::Z0_01;
  Complex z0{};
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

inline Complex extreme_functional_eval(const ExtremeFunctional& phi, const AnalyticFunction& f,
                                       const NormSettings& settings = {}) {
  require_in_disc(phi.z0, "z0");
  require_membership(f, phi.variant, settings);
  const Complex weighted = std::polar(1.0, phi.theta2) * phi_embed(f, phi.z0, settings.evaluation);
  switch (phi.variant) {
    case SpaceVariant::Z0_01:
      return weighted;
    case SpaceVariant::Z0_i0:
      return std::polar(1.0, phi.theta1) * norm_first_derivative(f, 0.0, settings.evaluation) * phi.z0 + weighted;
    case SpaceVariant::Z0_i1:
      return std::polar(1.0, phi.theta1) * eval(f, 0.0) + weighted;
    case SpaceVariant::Z0:
      return std::polar(1.0, phi.theta0) * eval(f, 0.0) +
             std::polar(1.0, phi.theta1) * norm_first_derivative(f, 0.0, settings.evaluation) * phi.z0 + weighted;
  }
  return weighted;
}

/// Function whose weighted second derivative peaks with modulus 1 exactly at z0.
inline AnalyticFunction peaking_function(Complex z0) { return peaking(z0); }

}  // namespace zyglab
