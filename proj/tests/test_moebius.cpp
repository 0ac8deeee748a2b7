#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "zyglab/flows.hpp"
#include "zyglab/moebius.hpp"

using namespace zyglab;

namespace {

Complex sample_point(SplitMix64& rng, double radius) { return std::polar(radius * std::sqrt(rng.uniform()), rng.angle()); }

bool contains_point(const FixedPointReport& r, Complex p, double tol) {
  for (const auto& q : r.points)
    if (!q.at_infinity && std::abs(q.value - p) <= tol) return true;
  return false;
}

}  // namespace

TEST(MoebiusEval, Identity) { EXPECT_EQ(moebius_eval(DiscAutomorphism::identity(), Complex(0.0, 0.3)), Complex(0.0, 0.3)); }

TEST(MoebiusEval, ZeroPreimage) { EXPECT_EQ(std::abs(moebius_eval(DiscAutomorphism(1.0, 0.5), 0.5)), 0.0); }

TEST(MoebiusEval, ImageOfOrigin) {
  EXPECT_NEAR(std::abs(moebius_eval(DiscAutomorphism(kI, 0.3), 0.0) - Complex(0.0, -0.3)), 0.0, 1e-16);
}

TEST(MoebiusEval, OutsideDisc) {
  try {
    (void)moebius_eval(DiscAutomorphism::identity(), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::point_outside_disc);
  }
}

TEST(MoebiusDerivative, IdentityIsOne) {
  for (Complex z : {Complex(0.0), Complex(0.4, -0.7)}) EXPECT_EQ(moebius_derivative(DiscAutomorphism::identity(), z), Complex(1.0));
}

TEST(MoebiusDerivative, ShiftAtOrigin) { EXPECT_NEAR(std::abs(moebius_derivative(DiscAutomorphism(1.0, 0.5), 0.0) - 0.75), 0.0, 1e-16); }

TEST(MoebiusDerivative, MatchesDifferenceQuotient) {
  const DiscAutomorphism s(std::polar(1.0, 0.8), Complex(0.3, -0.4));
  const Complex z{0.2, 0.1};
  const double h = 1e-5;
  const Complex fd = (oracle::automorphism(s.lambda(), s.a(), z + h) - oracle::automorphism(s.lambda(), s.a(), z - h)) / (2 * h);
  EXPECT_NEAR(std::abs(s.derivative(z) - fd), 0.0, 1e-9);
}

TEST(Automorphism, RejectsBadParameters) {
  for (auto make : {+[] { return DiscAutomorphism(1.1, 0.0); }, +[] { return DiscAutomorphism(1.0, 1.0); },
                    +[] { return DiscAutomorphism(1.0, Complex(std::nan(""), 0.0)); }}) {
    try {
      (void)make();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::bad_spec);
    }
  }
}

TEST(Compose, WithInverseIsIdentity) {
  const DiscAutomorphism s(std::polar(1.0, 2.1), Complex(-0.6, 0.3));
  EXPECT_TRUE(compose(s, inverse(s)).is_identity(1e-12));
  EXPECT_TRUE(compose(inverse(s), s).is_identity(1e-12));
}

TEST(Compose, RotationPhasesAdd) {
  const auto r = compose(DiscAutomorphism::rotation(0.4), DiscAutomorphism::rotation(1.1));
  EXPECT_NEAR(std::abs(r.lambda() - std::polar(1.0, 1.5)), 0.0, 1e-15);
  EXPECT_EQ(r.a(), Complex{});
}

TEST(Compose, MatchesSequentialEvaluation) {
  SplitMix64 rng(77);
  const auto s1 = random_automorphism(rng), s2 = random_automorphism(rng);
  const auto c = compose(s1, s2);
  for (int i = 0; i < 100; ++i) {
    const Complex z = sample_point(rng, 0.95);
    EXPECT_LE(std::abs(c(z) - s2(s1(z))), 1e-12);
  }
}

TEST(Compose, DegenerateRenormalization) {
  // A matrix that sends the zero outside the disc.
  try {
    (void)DiscAutomorphism::from_matrix({1.0, -2.0, 0.0, 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_composite);
  }
}

TEST(Inverse, Identity) { EXPECT_TRUE(inverse(DiscAutomorphism::identity()).is_identity(0.0)); }

TEST(Inverse, RealShift) {
  const auto inv = inverse(DiscAutomorphism(1.0, 0.5));
  EXPECT_NEAR(std::abs(inv.lambda() - 1.0), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(inv.a() + 0.5), 0.0, 1e-16);
  // Solving w = (z - 0.5)/(1 - 0.5 z) at w = 0 gives z = 0.5.
  EXPECT_NEAR(std::abs(inv(0.0) - 0.5), 0.0, 1e-16);
}

TEST(Inverse, RotatedShift) {
  const DiscAutomorphism s(kI, 0.3);
  const auto inv = inverse(s);
  EXPECT_NEAR(std::abs(inv.lambda() + kI), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(inv.a() - Complex(0.0, -0.3)), 0.0, 1e-16);
  // Matrix oracle: the product of the two matrices is a multiple of the identity.
  const MobiusMatrix m = s.matrix() * inv.matrix();
  EXPECT_NEAR(std::abs(m.B), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.C), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(m.A - m.D), 0.0, 1e-15);
}

TEST(FixedPoints, RotationFixesZeroAndInfinity) {
  const auto r = fixed_points(DiscAutomorphism(std::polar(1.0, 1.0), 0.0));
  EXPECT_EQ(r.type, AutomorphismClass::elliptic);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].value, Complex{});
  EXPECT_TRUE(r.points[1].at_infinity);
}

TEST(FixedPoints, Identity) { EXPECT_EQ(fixed_points(DiscAutomorphism::identity()).type, AutomorphismClass::identity); }

TEST(FixedPoints, ParabolicFlowMember) {
  const auto sigma = FlowFamily::parabolic(1.0, 1.0).automorphism_at(0.5);
  const auto r = fixed_points(sigma);
  EXPECT_EQ(r.type, AutomorphismClass::parabolic);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_NEAR(std::abs(r.points[0].value - 1.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(sigma.apply_extended(1.0) - 1.0), 0.0, 1e-14);
}

TEST(FixedPoints, HyperbolicFlowMember) {
  const auto sigma = FlowFamily::hyperbolic(1.0, 1.0, -1.0).automorphism_at(0.7);
  const auto r = fixed_points(sigma);
  EXPECT_EQ(r.type, AutomorphismClass::hyperbolic);
  EXPECT_TRUE(contains_point(r, 1.0, 1e-12));
  EXPECT_TRUE(contains_point(r, -1.0, 1e-12));
}

TEST(FixedPoints, EllipticInteriorPoint) {
  // Conjugate a rotation by the automorphism moving 0 to b.
  const Complex b{0.3, -0.2};
  const DiscAutomorphism to_b(1.0, -b);  // sends 0 to b
  const auto sigma = compose(compose(inverse(to_b), DiscAutomorphism::rotation(0.9)), to_b);
  const auto r = fixed_points(sigma);
  EXPECT_EQ(r.type, AutomorphismClass::elliptic);
  EXPECT_NEAR(std::abs(r.points[0].value - b), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(r.points[1].value - 1.0 / std::conj(b)), 0.0, 1e-10);
}

// Property: Schwarz-Pick weight identity on 10^4 seeded samples.
TEST(MoebiusProperty, SchwarzPickWeightIdentity) {
  SplitMix64 rng(10);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_automorphism(rng);
    const Complex z = sample_point(rng, 0.99);
    worst = std::max(worst, std::abs((1.0 - std::norm(z)) * std::abs(s.derivative(z)) - (1.0 - std::norm(s(z)))));
  }
  EXPECT_LE(worst, 1e-12);
}

// Property: associativity, neutral identity, two-sided inverse.
TEST(MoebiusProperty, GroupAxioms) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_automorphism(rng), b = random_automorphism(rng), c = random_automorphism(rng);
    const auto left = compose(compose(a, b), c), right = compose(a, compose(b, c));
    const auto id = DiscAutomorphism::identity();
    for (int i = 0; i < 20; ++i) {
      const Complex z = sample_point(rng, 0.95);
      EXPECT_LE(std::abs(left(z) - right(z)), 1e-12);
      EXPECT_LE(std::abs(compose(a, id)(z) - a(z)), 1e-15);
      EXPECT_LE(std::abs(compose(id, a)(z) - a(z)), 1e-15);
      EXPECT_LE(std::abs(compose(a, inverse(a))(z) - z), 1e-12);
      EXPECT_LE(std::abs(compose(inverse(a), a)(z) - z), 1e-12);
    }
  }
}

// Property: conjugating by a rotation keeps the class and rotates the fixed points.
TEST(MoebiusProperty, ClassificationInvariantUnderRotation) {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_automorphism(rng);
    const double theta = rng.angle();
    const auto rot = DiscAutomorphism::rotation(theta);
    const auto conj = compose(compose(inverse(rot), s), rot);  // R s R^{-1}
    const auto a = fixed_points(s), b = fixed_points(conj);
    EXPECT_EQ(a.type, b.type);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (const auto& p : a.points) {
      if (p.at_infinity) continue;
      EXPECT_TRUE(contains_point(b, std::polar(1.0, theta) * p.value, 1e-8 * std::max(1.0, std::abs(p.value))));
    }
  }
}

// Property: returned points really are fixed.
TEST(MoebiusProperty, FixedPointsAreFixed) {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_automorphism(rng);
    for (const auto& p : fixed_points(s).points) {
      if (p.at_infinity) continue;
      EXPECT_LE(std::abs(s.apply_extended(p.value) - p.value), 1e-9 * std::max(1.0, std::abs(p.value)));
    }
  }
}
