// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "zyglab/harness.hpp"

using namespace zyglab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

Complex disc_point(SplitMix64& rng, double radius) { return std::polar(radius * std::sqrt(rng.uniform()), rng.angle()); }

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("%s %2d  %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

void info(int id, const std::string& detail) {
  std::printf("INFO %2d  %s\n", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

/// Runs a criterion, turning an unexpected exception into a FAIL line.
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

std::vector<AnalyticFunction> suite() {
  std::vector<AnalyticFunction> out;
  for (int k = 2; k <= 6; ++k) out.push_back(monomial(k));
  out.push_back(peaking(0.3));
  out.push_back(peaking(Complex(0.0, 0.7)));
  for (std::uint64_t seed : {11u, 12u, 13u}) out.push_back(random_polynomial(5, seed));
  return out;
}

std::vector<FlowFamily> families() {
  return {FlowFamily::elliptic(1.3, {0.3, 0.2}), FlowFamily::hyperbolic(0.8, 1.0, kI),
          FlowFamily::parabolic(0.9, std::polar(1.0, 0.4))};
}

void seminorm_oracle() {
  const auto start = Clock::now();
  const auto r = zygmund_norm(monomial(3));
  const double elapsed = seconds_since(start);
  const double expected = 2.0 / (3.0 * std::sqrt(3.0));
  const double seminorm_err = std::abs(r.seminorm - expected);
  const double argmax_err = std::abs(std::abs(r.argmax) - 1.0 / std::sqrt(3.0));
  report(1, seminorm_err <= 1e-6 && argmax_err <= 1e-4 && elapsed < 1.0,
         fmt("seminorm(z^3/6) = %.9f (err %.2e <= 1e-6), ||argmax| - 1/sqrt3| = %.2e <= 1e-4, %.3f s < 1 s", r.seminorm,
             seminorm_err, argmax_err, elapsed));
}

void peaking_criterion() {
  const Complex centers[] = {std::polar(0.3, std::numbers::pi / 7.0), 0.8, Complex(0.0, 0.5)};
  double norm_err = 0.0, argmax_err = 0.0, worst_off_peak = 0.0;
  SplitMix64 rng(2);
  for (Complex z0 : centers) {
    const AnalyticFunction f = peaking(z0);
    const auto r = zygmund_norm(f);
    norm_err = std::max(norm_err, std::abs(r.total - 1.0));
    argmax_err = std::max(argmax_err, std::abs(r.argmax - z0));
    auto probe = [&](Complex z) {
      if (std::abs(z) >= 1.0 || std::abs(z - z0) < 1e-3) return;
      worst_off_peak = std::max(worst_off_peak, std::abs(phi_embed(f, z)));
    };
    for (int i = 0; i < 10000; ++i) probe(disc_point(rng, 0.999));
    for (double d : {1e-3, 2e-3, 1e-2, 1e-1})
      for (int k = 0; k < 64; ++k) probe(z0 + std::polar(d, 2.0 * std::numbers::pi * k / 64.0));
  }
  report(2, norm_err <= 1e-7 && argmax_err <= 1e-4 && worst_off_peak <= 1.0 - 1e-7,
         fmt("max |norm - 1| = %.2e <= 1e-7, max |argmax - z0| = %.2e <= 1e-4, max off-peak |Phi f0| = %.10f <= 1 - 1e-7",
             norm_err, argmax_err, worst_off_peak));
}

void isometry_criterion(const std::vector<AnalyticFunction>& functions) {
  SplitMix64 rng(3);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k)
    worst = std::max(worst, verify_isometry(random_canonical_isometry(rng), functions).max_relative_deviation);
  const double elapsed = seconds_since(start);
  report(3, worst <= 1e-6 && elapsed < 60.0,
         fmt("100 operators x 10 functions: max relative deviation %.2e <= 1e-6, %.1f s < 60 s (one thread)", worst,
             elapsed));
}

void closed_form_criterion(const std::vector<AnalyticFunction>& functions) {
  SplitMix64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CanonicalIsometry op = random_canonical_isometry(rng);
    for (int p = 0; p < 100; ++p) {
      const AnalyticFunction& f = functions[static_cast<std::size_t>(p) % functions.size()];
      const Complex z = disc_point(rng, 0.95);
      const Complex via_image = derivative(apply_canonical(op, f), z, 2);
      worst = std::max(worst, std::abs(via_image - second_derivative_direct(op, f, z)));
    }
  }
  report(4, worst <= 1e-8, fmt("1000 points x 10 operators: max |(Tf)'' - direct| = %.2e <= 1e-8", worst));
}

void group_law_criterion() {
  SplitMix64 rng(5);
  std::vector<Complex> points;
  for (int i = 0; i < 200; ++i) points.push_back(disc_point(rng, 0.95));
  const std::vector<double> times{-1.0, -0.3, 0.2, 0.7};
  double worst = 0.0;
  for (const auto& family : families()) worst = std::max(worst, group_law_check(family, times, times, points));
  report(5, worst <= 1e-9, fmt("elliptic, hyperbolic, parabolic, 200 points: max group-law defect %.2e <= 1e-9", worst));
}

void generator_criterion() {
  SplitMix64 rng(6);
  std::vector<Complex> points;
  for (int i = 0; i < 1000; ++i) points.push_back(disc_point(rng, 0.95));
  double field_rel = 0.0;
  for (const auto& family : families())
    for (Complex p : points) {
      const Complex fd = generator_field(family, p, FieldMode::fd);
      const Complex closed = generator_field(family, p, FieldMode::closed);
      field_rel = std::max(field_rel, std::abs(closed - fd) / std::max(1.0, std::abs(fd)));
    }
  const bool field_ok = field_rel <= 1e-6;

  const AnalyticFunction f = monomial(3);
  const Complex z{0.4, 0.0};
  std::vector<IsometryFlow> flows{{0.0, FlowFamily::elliptic(1.0, 0.0)}};
  for (const auto& family : families()) flows.push_back({0.7, family});

  double paper_lo = INFINITY, paper_hi = -INFINITY, exact_lo = INFINITY, exact_hi = -INFINITY;
  double paper_last_error = 0.0;
  for (const auto& flow : flows) {
    const Complex g = apply_generator(flow, f, z);
    const auto to_g = difference_quotient_convergence(flow, f, z, g, 6, 12);
    for (double r : to_g.ratios) paper_lo = std::min(paper_lo, r), paper_hi = std::max(paper_hi, r);
    paper_last_error = std::max(paper_last_error, to_g.steps.back().error);

    const Complex exact = integral_flow_derivative(flow, f, z);
    const auto to_exact = difference_quotient_convergence(flow, f, z, exact, 6, 12);
    for (std::size_t i = 0; i < to_exact.ratios.size(); ++i) {
      if (to_exact.steps[i + 1].error <= 1e-11 * std::max(1.0, std::abs(exact))) continue;
      exact_lo = std::min(exact_lo, to_exact.ratios[i]);
      exact_hi = std::max(exact_hi, to_exact.ratios[i]);
    }
  }
  const bool rate_ok = paper_lo >= 1.7 && paper_hi <= 2.3;
  report(6, field_ok && rate_ok,
         fmt("field: max relative gap %.2e <= 1e-6 (%s); quotients -> alpha f - i V f' for z^3/6 at z = 0.4: halving "
             "ratios in [%.3f, %.3f], need [1.7, 2.3] (%s), error at t = 2^-12 is %.2e",
             field_rel, field_ok ? "ok" : "fails", paper_lo, paper_hi, rate_ok ? "ok" : "fails", paper_last_error));
  info(6, fmt("quotients -> exact group derivative alpha f - i[int f'' V - z f''(0) V(0)]: halving ratios in [%.3f, %.3f]",
              exact_lo, exact_hi));
}

void domain_criterion() {
  const IsometryFlow flow{0.0, FlowFamily::elliptic(1.0, 0.5)};
  const AnalyticFunction g = generator_image(flow, AnalyticFunction::polynomial({0.0, 0.0, 1.0}));
  const double measured = std::abs(cauchy_derivative(g, 0.0, 1));
  report(7, std::abs(measured - 4.0 / 3.0) <= 1e-8,
         fmt("elliptic c = 1, tau = 0.5, f = z^2: |(Gf)'(0)| = %.12f, expected 4/3 +- 1e-8", measured));
}

void unboundedness_criterion() {
  const auto rows = unboundedness_probe({0.0, FlowFamily::elliptic(1.0, 0.0)}, {4, 8, 16, 32});
  double err = 0.0;
  bool increasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    err = std::max(err, std::abs(rows[i].ratio - rows[i].degree));
    if (i > 0 && !(rows[i].ratio > rows[i - 1].ratio)) increasing = false;
  }
  double trivial_err = 0.0;
  for (double alpha : {2.0, -0.7}) {
    for (const auto& row : unboundedness_probe({alpha, FlowFamily::trivial()}, {4, 8, 16, 32}))
      trivial_err = std::max(trivial_err, std::abs(row.ratio - std::abs(alpha)));
  }
  report(8, err <= 1e-6 && increasing && trivial_err <= 1e-10,
         fmt("rotation: max |ratio - n| = %.2e <= 1e-6 over n = 4, 8, 16, 32, strictly increasing: %s; trivial flow: "
             "max |ratio - |alpha|| = %.2e <= 1e-10",
             err, increasing ? "yes" : "no", trivial_err));
}

void hermitian_criterion() {
  const HermitianDiagonal s{1.0, 2.0, 0.5};
  const AnalyticFunction f = AnalyticFunction::polynomial({1.0, 1.0, 0.5});
  const double before = zygmund_norm(f).total;
  double worst = 0.0;
  for (double t : {0.1, 0.3, 1.0, std::numbers::pi})
    worst = std::max(worst, std::abs(zygmund_norm(apply_full(hermitian_exponential(s, t), f)).total - before));
  report(9, worst <= 1e-8, fmt("(1, 2, 0.5), f = 1 + z + z^2/2: max |norm(e^{itS} f) - norm(f)| = %.2e <= 1e-8", worst));
}

void schwarz_pick_criterion() {
  SplitMix64 rng(10);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const DiscAutomorphism sigma = random_automorphism(rng);
    const Complex z = disc_point(rng, 0.99);
    const double lhs = (1.0 - std::norm(z)) * std::abs(sigma.derivative(z));
    worst = std::max(worst, std::abs(lhs - (1.0 - std::norm(sigma(z)))));
  }
  report(10, worst <= 1e-12, fmt("10^4 samples: max weight-identity defect %.2e <= 1e-12", worst));
}

void extreme_criterion() {
  const std::vector<AnalyticFunction> functions{monomial(2), monomial(3), random_polynomial(5, 11)};
  SplitMix64 rng(11);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CanonicalIsometry op = random_canonical_isometry(rng);
    for (const auto& f : functions) {
      const AnalyticFunction image = apply_canonical(op, f);
      for (int p = 0; p < 100; ++p) {
        const Complex z = disc_point(rng, 0.95);
        const double theta = rng.angle();
        const ExtremeImage moved = adjoint_on_extreme(op, theta, z);
        const Complex lhs = std::polar(1.0, theta) * phi_embed(image, z);
        const Complex rhs = std::polar(1.0, moved.phase) * phi_embed(f, moved.w);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  report(11, worst <= 1e-9, fmt("10 operators x 3 functions x 100 points: max transport defect %.2e <= 1e-9", worst));
}

void cli_criterion() {
  const auto out = std::filesystem::temp_directory_path() / "zyglab-acceptance-report.json";
  const std::string command = std::string(ZYGLAB_CLI) + " check --config " ZYGLAB_SOURCE_DIR
                                                        "/configs/paper-suite.json --out " +
                              out.string() + " 2>/dev/null";
  const auto start = Clock::now();
  const int status = std::system(command.c_str());
  const double elapsed = seconds_since(start);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  report(12, code == 0 && elapsed < 300.0, fmt("zyglab check paper-suite: exit %d, %.1f s < 300 s", code, elapsed));
}

}  // namespace

int main() {
  const std::vector<AnalyticFunction> functions = suite();
  criterion(1, seminorm_oracle);
  criterion(2, peaking_criterion);
  criterion(3, [&] { isometry_criterion(functions); });
  criterion(4, [&] { closed_form_criterion(functions); });
  criterion(5, group_law_criterion);
  criterion(6, generator_criterion);
  criterion(7, domain_criterion);
  criterion(8, unboundedness_criterion);
  criterion(9, hermitian_criterion);
  criterion(10, schwarz_pick_criterion);
  criterion(11, extreme_criterion);
  criterion(12, cli_criterion);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
