// Small walk through the library: a norm, an isometry image and a flow.

#include <cstdio>

#include "zyglab/flows.hpp"
#include "zyglab/isometry.hpp"
#include "zyglab/zygmund.hpp"

int main() {
  using namespace zyglab;

  const AnalyticFunction f = monomial(3);
  const ZygmundNormReport norm = zygmund_norm(f);
  std::printf("||z^3/6|| = %.12f  (argmax %s)\n", norm.total, format_complex(norm.argmax).c_str());

  SplitMix64 rng(7);
  const CanonicalIsometry op = random_canonical_isometry(rng);
  const AnalyticFunction image = apply_canonical(op, f);
  std::printf("||T f||   = %.12f  (sigma zero %s)\n", zygmund_norm(image).total, format_complex(op.sigma.a()).c_str());

  const IsometryFlow flow{0.7, FlowFamily::elliptic(1.3, {0.3, 0.2})};
  const Complex z{0.4, 0.0};
  const Complex exact = integral_flow_derivative(flow, f, z);
  const ConvergenceReport conv = difference_quotient_convergence(flow, f, z, exact, 4, 8);
  for (const auto& step : conv.steps) std::printf("t = %-10g error = %.3e\n", step.t, step.error);
  return 0;
}
