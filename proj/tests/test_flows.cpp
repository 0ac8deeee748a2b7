#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "zyglab/flows.hpp"

using namespace zyglab;

namespace {

constexpr double kPi = std::numbers::pi;

Complex sample_point(SplitMix64& rng, double radius) { return std::polar(radius * std::sqrt(rng.uniform()), rng.angle()); }

std::vector<FlowFamily> reference_families() {
  return {FlowFamily::trivial(), FlowFamily::elliptic(1.3, {0.3, 0.2}), FlowFamily::hyperbolic(0.8, 1.0, kI),
          FlowFamily::parabolic(0.9, std::polar(1.0, 0.4))};
}

const std::vector<double> kTimes{-1.0, -0.3, 0.2, 0.7};

}  // namespace

TEST(FlowEval, TimeZeroIsIdentity) {
  SplitMix64 rng(1);
  for (const auto& family : reference_families())
    for (int i = 0; i < 1000; ++i) {
      const Complex z = sample_point(rng, 0.999);
      EXPECT_LE(std::abs(flow_eval(family, 0.0, z) - z), 1e-15) << family.variant();
    }
}

TEST(FlowEval, EllipticAboutOriginIsRotation) {
  const auto family = FlowFamily::elliptic(1.7, 0.0);
  for (double t : {-0.4, 0.9, 2.5}) {
    const Complex z{0.3, -0.6};
    EXPECT_LE(std::abs(flow_eval(family, t, z) - std::polar(1.0, 1.7 * t) * z), 1e-15);
  }
}

TEST(FlowEval, ParabolicFixesGamma) {
  const Complex gamma = std::polar(1.0, 2.0);
  const auto family = FlowFamily::parabolic(0.6, gamma);
  for (double t : {-3.0, 0.1, 5.0}) EXPECT_LE(std::abs(family.apply_extended(t, gamma) - gamma), 1e-15);
}

TEST(FlowEval, OutsideDisc) { EXPECT_THROW((void)flow_eval(FlowFamily::trivial(), 0.5, 1.2), Error); }

TEST(FlowEval, SingularDenominator) {
  // Evaluating exactly at the pole -D/C of sigma_1, which lies off the disc.
  const auto family = FlowFamily::elliptic(1.0, 0.5);
  const MobiusMatrix m = family.matrix(1.0);
  try {
    (void)family.apply_extended(1.0, -m.D / m.C);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numerical_singularity);
  }
}

TEST(FlowFamily, RejectsBadParameters) {
  auto expect_bad = [](auto make) {
    try {
      (void)make();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::bad_spec);
    }
  };
  expect_bad([] { return FlowFamily::elliptic(0.0, 0.1); });
  expect_bad([] { return FlowFamily::elliptic(1.0, 1.0); });
  expect_bad([] { return FlowFamily::hyperbolic(-1.0, 1.0, -1.0); });
  expect_bad([] { return FlowFamily::hyperbolic(1.0, 1.0, 1.0); });
  expect_bad([] { return FlowFamily::hyperbolic(1.0, 0.5, -1.0); });
  expect_bad([] { return FlowFamily::parabolic(1.0, 0.9); });
  expect_bad([] { return FlowFamily::parabolic(0.0, 1.0); });
}

TEST(FlowToAutomorphism, Examples) {
  EXPECT_TRUE(flow_to_automorphism(FlowFamily::hyperbolic(1.0, 1.0, -1.0), 0.0).is_identity(1e-15));
  const auto quarter = flow_to_automorphism(FlowFamily::elliptic(1.0, 0.0), kPi / 2);
  EXPECT_LE(std::abs(quarter.lambda() - kI), 1e-15);
  EXPECT_EQ(quarter.a(), Complex{});
  const auto report = fixed_points(flow_to_automorphism(FlowFamily::hyperbolic(1.0, 1.0, -1.0), 0.7));
  EXPECT_EQ(report.type, AutomorphismClass::hyperbolic);
  ASSERT_EQ(report.points.size(), 2u);
  EXPECT_LE(std::min(std::abs(report.points[0].value - 1.0), std::abs(report.points[1].value - 1.0)), 1e-12);
  EXPECT_LE(std::min(std::abs(report.points[0].value + 1.0), std::abs(report.points[1].value + 1.0)), 1e-12);
}

TEST(FlowToAutomorphism, MatchesMatrixPointwise) {
  SplitMix64 rng(2);
  for (const auto& family : reference_families())
    for (double t : kTimes) {
      const auto sigma = family.automorphism_at(t);
      for (int i = 0; i < 20; ++i) {
        const Complex z = sample_point(rng, 0.95);
        EXPECT_LE(std::abs(sigma(z) - flow_eval(family, t, z)), 1e-13);
      }
    }
}

TEST(GroupLaw, TrivialIsExact) {
  EXPECT_EQ(group_law_check(FlowFamily::trivial(), kTimes, kTimes, {0.1, Complex(0.3, 0.4)}), 0.0);
}

TEST(GroupLaw, RotationAboutOrigin) {
  SplitMix64 rng(3);
  std::vector<Complex> points;
  for (int i = 0; i < 200; ++i) points.push_back(sample_point(rng, 0.95));
  EXPECT_LE(group_law_check(FlowFamily::elliptic(1.0, 0.0), kTimes, kTimes, points), 1e-15);
}

// Property: group law for every family over the acceptance grid.
TEST(FlowProperty, GroupLaw) {
  SplitMix64 rng(4);
  std::vector<Complex> points;
  for (int i = 0; i < 200; ++i) points.push_back(sample_point(rng, 0.95));
  for (const auto& family : reference_families()) EXPECT_LE(group_law_check(family, kTimes, kTimes, points), 1e-9) << family.variant();
}

// Property: every sigma_t fixes the family's fixed-point set.
TEST(FlowProperty, FixedPointInvariance) {
  for (const auto& family : reference_families()) EXPECT_LE(fixed_point_drift(family, {-2.0, -0.5, 0.3, 1.0, 4.0}), 1e-10);
}

// Property: isometry phases add exactly.
TEST(FlowProperty, PhaseAdditivity) {
  const IsometryFlow flow{0.7, FlowFamily::elliptic(1.3, {0.3, 0.2})};
  for (double s : kTimes)
    for (double t : kTimes) {
      const double lhs = isometry_at(flow, s + t).alpha;
      const double rhs = normalize_phase(isometry_at(flow, s).alpha + isometry_at(flow, t).alpha);
      EXPECT_LE(phase_distance(lhs, rhs), 4 * std::numeric_limits<double>::epsilon() * 2 * kPi);
    }
}

TEST(IsometryAt, TimeZeroIsIdentity) {
  const auto t = isometry_at({0.7, FlowFamily::parabolic(0.9, kI)}, 0.0);
  EXPECT_EQ(t.alpha, 0.0);
  EXPECT_TRUE(t.sigma.is_identity(1e-15));
}

TEST(IsometryAt, ComposesLikeTheGroup) {
  for (const auto& family : reference_families()) {
    const IsometryFlow flow{0.7, family};
    for (double s : kTimes)
      for (double t : kTimes) {
        const auto composite = compose_isometries(isometry_at(flow, s), isometry_at(flow, t));
        const auto direct = isometry_at(flow, s + t);
        EXPECT_LE(phase_distance(composite.alpha, direct.alpha), 1e-10);
        EXPECT_LE(std::abs(composite.sigma.lambda() - direct.sigma.lambda()), 1e-10);
        EXPECT_LE(std::abs(composite.sigma.a() - direct.sigma.a()), 1e-10);
      }
  }
}

TEST(IsometryAt, StrongContinuity) {
  const IsometryFlow flow{0.7, FlowFamily::elliptic(1.3, {0.3, 0.2})};
  const auto norms = strong_continuity_profile(flow, monomial(3), {0.1, 0.01, 0.001});
  ASSERT_EQ(norms.size(), 3u);
  EXPECT_GT(norms[0], norms[1]);
  EXPECT_GT(norms[1], norms[2]);
  EXPECT_LT(norms[2], 1e-2);
}

TEST(GeneratorField, Examples) {
  EXPECT_EQ(generator_field(FlowFamily::trivial(), 0.4, FieldMode::closed), Complex{});
  EXPECT_EQ(generator_field(FlowFamily::trivial(), 0.4, FieldMode::fd), Complex{});
  const Complex z{0.3, -0.5};
  EXPECT_LE(std::abs(generator_field(FlowFamily::elliptic(1.0, 0.0), z, FieldMode::closed) - kI * z), 1e-16);
  EXPECT_LE(std::abs(generator_field(FlowFamily::elliptic(1.0, 0.0), z, FieldMode::fd) - kI * z), 1e-10);
  // Double zero at the boundary fixed point; evaluated off the open disc on purpose.
  const auto parabolic = FlowFamily::parabolic(1.0, 1.0);
  EXPECT_LE(std::abs(parabolic.field()(1.0)), 1e-16);
  EXPECT_LE(std::abs(parabolic.field_fd(1.0)), 1e-14);
}

TEST(GeneratorField, HyperbolicSignIsResolved) {
  const auto family = FlowFamily::hyperbolic(1.0, 1.0, -1.0);
  EXPECT_EQ(family.field_sign(), -1);
  EXPECT_NE(family.field_note().find("negated"), std::string::npos);
  // Resolved field is +phi (z - p)(z - q)/(p - q); the printed one has the opposite sign.
  const Complex z{0.2, 0.3};
  EXPECT_LE(std::abs(family.field()(z) - (z - 1.0) * (z + 1.0) / 2.0), 1e-15);
  EXPECT_EQ(FlowFamily::elliptic(1.0, 0.3).field_sign(), 1);
  EXPECT_EQ(FlowFamily::parabolic(1.0, kI).field_sign(), 1);
}

// Property: closed and fd fields agree on 10^3 points per family.
TEST(FlowProperty, FieldAgreement) {
  SplitMix64 rng(5);
  for (const auto& family : reference_families()) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Complex z = sample_point(rng, 0.95);
      const Complex fd = generator_field(family, z, FieldMode::fd);
      worst = std::max(worst, std::abs(generator_field(family, z, FieldMode::closed) - fd) / std::max(1.0, std::abs(fd)));
    }
    EXPECT_LE(worst, 1e-6) << family.variant();
  }
}

TEST(ApplyGenerator, TrivialFlowScales) {
  const IsometryFlow flow{2.0, FlowFamily::trivial()};
  const auto f = monomial(3);
  EXPECT_LE(std::abs(apply_generator(flow, f, Complex(0.4, 0.1)) - 2.0 * eval(f, Complex(0.4, 0.1))), 1e-15);
}

TEST(ApplyGenerator, RotationField) {
  const double alpha = 0.6;
  const IsometryFlow flow{alpha, FlowFamily::elliptic(1.0, 0.0)};
  const Complex z{0.5, -0.2};
  EXPECT_LE(std::abs(apply_generator(flow, monomial(2), z) - (alpha * z * z / 2.0 + z * z)), 1e-15);
}

TEST(ApplyGenerator, RequiresSubspace) { EXPECT_THROW((void)apply_generator({0.0, FlowFamily::trivial()}, monomial(1), 0.2), Error); }

TEST(GeneratorImage, ClosedDerivativesMatchCauchy) {
  const IsometryFlow flow{0.7, FlowFamily::parabolic(0.9, std::polar(1.0, 0.4))};
  const auto g = generator_image(flow, peaking(Complex(0.3, 0.2)));
  SplitMix64 rng(6);
  for (int i = 0; i < 50; ++i) {
    const Complex z = sample_point(rng, 0.9);
    for (int k = 1; k <= 3; ++k) EXPECT_LE(std::abs(*closed_form_derivative(g, z, k) - cauchy_derivative(g, z, k)), 1e-9);
  }
}

TEST(FlowDerivative, QuotientsConvergeToGroupDerivative) {
  for (const auto& family : reference_families()) {
    const IsometryFlow flow{0.7, family};
    const auto f = monomial(3);
    const Complex z{0.4, 0.0};
    const Complex exact = integral_flow_derivative(flow, f, z);
    const auto report = difference_quotient_convergence(flow, f, z, exact, 4, 10);
    for (double ratio : report.ratios) {
      EXPECT_GE(ratio, 1.7) << family.variant();
      EXPECT_LE(ratio, 2.3) << family.variant();
    }
  }
}

TEST(FlowDerivative, GroupDerivativeMatchesCentralDifference) {
  // Symmetric difference in t of T_t f(z), independent of the quotient routine.
  const IsometryFlow flow{0.7, FlowFamily::hyperbolic(0.8, 1.0, kI)};
  const auto f = peaking(0.5);
  const Complex z{0.2, 0.3};
  const double h = 1e-4;
  const Complex plus = eval(apply_canonical(isometry_at(flow, h), f), z);
  const Complex minus = eval(apply_canonical(isometry_at(flow, -h), f), z);
  EXPECT_LE(std::abs((plus - minus) / (2.0 * h * kI) - integral_flow_derivative(flow, f, z)), 1e-7);
}

TEST(FlowDerivative, PrintedGeneratorDiffersFromGroupDerivative) {
  // For the rotation flow the group derivative is alpha f + c (z f' - f),
  // while alpha f - i V f' gives alpha f + c z f'.
  const double c = 1.0;
  const IsometryFlow flow{0.0, FlowFamily::elliptic(c, 0.0)};
  const auto f = monomial(3);
  const Complex z{0.4, 0.0};
  const Complex f_z = eval(f, z), fp = derivative(f, z, 1);
  EXPECT_LE(std::abs(integral_flow_derivative(flow, f, z) - c * (z * fp - f_z)), 1e-13);
  EXPECT_LE(std::abs(apply_generator(flow, f, z) - c * z * fp), 1e-15);
  EXPECT_GT(std::abs(apply_generator(flow, f, z) - integral_flow_derivative(flow, f, z)), 1e-3);
}

TEST(Domain, Examples) {
  const auto half_square = monomial(2);
  EXPECT_TRUE(generator_domain_check({1.5, FlowFamily::trivial()}, half_square).in_domain);

  const auto square = AnalyticFunction::polynomial({0.0, 0.0, 1.0});
  const IsometryFlow shifted{0.0, FlowFamily::elliptic(1.0, 0.5)};
  const auto report = generator_domain_check(shifted, square);
  EXPECT_FALSE(report.in_domain);
  const auto g = generator_image(shifted, square);
  EXPECT_NEAR(std::abs(cauchy_derivative(g, 0.0, 1)), 4.0 / 3.0, 1e-8);

  EXPECT_TRUE(generator_domain_check({0.8, FlowFamily::elliptic(1.0, 0.0)}, square).in_domain);
}

TEST(Unboundedness, TrivialFlowIsScalar) {
  const auto rows = unboundedness_probe({2.0, FlowFamily::trivial()}, {4, 8});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) EXPECT_NEAR(row.ratio, 2.0, 1e-10);
}

TEST(Unboundedness, RotationGrowsLinearly) {
  const auto rows = unboundedness_probe({0.0, FlowFamily::elliptic(1.0, 0.0)}, {4, 8, 16, 32});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].ratio, rows[i].degree, 1e-6);
    if (i > 0) EXPECT_GT(rows[i].ratio, rows[i - 1].ratio);
  }
}

TEST(Unboundedness, RejectsLowDegree) { EXPECT_THROW((void)unboundedness_probe({0.0, FlowFamily::trivial()}, {1}), Error); }
