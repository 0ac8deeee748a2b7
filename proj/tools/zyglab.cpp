// zyglab: command-line front end for norms, scenario checks, grids and
// automorphism classification.
//
// Exit codes: 0 pass, 1 check failure, 2 configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zyglab/harness.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::vector<std::string> tol;
};

void write_output(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw zyglab::Error(zyglab::ErrorKind::io_error, "cannot write " + path);
  file << text;
  if (!file) throw zyglab::Error(zyglab::ErrorKind::io_error, "write failed for " + path);
}

/// name=value pairs from --tol.
void apply_tolerances(zyglab::ScenarioConfig& config, const std::vector<std::string>& overrides) {
  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) zyglab::io::invalid("--tol", "expected name=value, got '" + entry + "'");
    const std::string name = entry.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(entry.substr(eq + 1), &used);
      if (used != entry.size() - eq - 1) throw std::invalid_argument(entry);
    } catch (const std::exception&) {
      zyglab::io::invalid("--tol", "malformed value in '" + entry + "'");
    }
    config.set_tolerance(name, value);
  }
}

std::vector<zyglab::AnalyticFunction> functions_from(const zyglab::Json& doc) {
  std::vector<zyglab::AnalyticFunction> out;
  if (doc.is_object() && doc.contains("suite")) {
    const auto& suite = doc.at("suite");
    if (!suite.is_array()) zyglab::io::invalid("/suite", "expected an array");
    for (std::size_t i = 0; i < suite.size(); ++i)
      out.push_back(zyglab::parse_function(suite[i], "/suite/" + std::to_string(i)));
  } else if (doc.is_object() && doc.contains("function")) {
    out.push_back(zyglab::parse_function(doc.at("function"), "/function"));
  } else {
    out.push_back(zyglab::parse_function(doc, ""));
  }
  return out;
}

int run_norm(const Options& opt) {
  const zyglab::Json doc = zyglab::read_json_file(opt.config);
  const auto functions = functions_from(doc);
  zyglab::NormSettings settings;
  settings.threads = zyglab::threads_from_environment();
  const std::string format = opt.format.empty() ? "json" : opt.format;
  std::ostringstream csv;
  csv.precision(17);
  csv << "function,value_at_zero,deriv_at_zero,seminorm,argmax_re,argmax_im,total\n";
  zyglab::Json reports = zyglab::Json::array();
  for (const auto& f : functions) {
    const auto report = zyglab::zygmund_norm(f, settings);
    zyglab::Json j = zyglab::to_json(report);
    j["function"] = f.label();
    reports.push_back(j);
    csv << f.label() << ',' << report.value_at_zero << ',' << report.deriv_at_zero << ',' << report.seminorm << ','
        << report.argmax.real() << ',' << report.argmax.imag() << ',' << report.total << '\n';
  }
  write_output(format == "csv" ? csv.str() : reports.dump(2) + "\n", opt.out);
  return kExitPass;
}

int run_check(const Options& opt) {
  const zyglab::Json doc = zyglab::read_json_file(opt.config);
  zyglab::ScenarioConfig config = zyglab::parse_scenario(doc);
  if (opt.seed) config.seed = *opt.seed;
  apply_tolerances(config, opt.tol);
  config.settings.threads = zyglab::threads_from_environment();
  const zyglab::RunReport report = zyglab::run_scenario(config);
  const std::string format = opt.format.empty() ? config.output_format : opt.format;
  const std::string path = opt.out.empty() ? config.output_path : opt.out;
  write_output(format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n", path);
  if (!path.empty() && path != "-") {
    for (const auto& c : report.checks) std::cerr << c.name << ": " << zyglab::to_string(c.status) << '\n';
    std::cerr << "overall: " << (report.passed() ? "pass" : "fail") << '\n';
  }
  return report.passed() ? kExitPass : kExitFailure;
}

int run_grid(const Options& opt) {
  const zyglab::Json doc = zyglab::read_json_file(opt.config);
  const bool wrapped = doc.is_object() && doc.contains("function");
  const auto f = zyglab::parse_function(wrapped ? doc.at("function") : doc, wrapped ? "/function" : "");
  int radii = 64, angles = 256;
  double r_max = 0.999;
  if (wrapped) {
    if (doc.contains("radii")) radii = static_cast<int>(zyglab::io::integer(doc, "radii", ""));
    if (doc.contains("angles")) angles = static_cast<int>(zyglab::io::integer(doc, "angles", ""));
    r_max = zyglab::io::number_or(doc, "r_max", r_max, "");
  }
  if (radii < 1 || angles < 1) zyglab::io::invalid("", "grid dimensions must be positive");
  if (!(r_max > 0.0 && r_max < 1.0)) zyglab::io::invalid("/r_max", "must lie in (0,1)");
  const std::string format = opt.format.empty() ? "csv" : opt.format;
  if (format == "csv") {
    if (opt.out.empty() || opt.out == "-")
      std::cout << zyglab::grid_csv(f, radii, angles, r_max);
    else
      zyglab::emit_grid(f, radii, angles, opt.out, r_max);
  } else {
    zyglab::Json rows = zyglab::Json::array();
    for (const auto& s : zyglab::weighted_grid(f, radii, angles, r_max))
      rows.push_back({{"r", s.r}, {"theta", s.theta}, {"value", s.value}});
    write_output(rows.dump(2) + "\n", opt.out);
  }
  return kExitPass;
}

int run_classify(const Options& opt) {
  const zyglab::Json doc = zyglab::read_json_file(opt.config);
  write_output(zyglab::classify_document(doc).dump(2) + "\n", opt.out);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zygmund-space norms, isometries and flows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", zyglab::kToolVersion);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON input")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Override the scenario seed");
    sub->add_option("--out", opt.out, "Output path (stdout when absent)");
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", opt.tol, "Tolerance override name=value (repeatable)");
  };
  CLI::App* norm = app.add_subcommand("norm", "Zygmund norm of a function or suite");
  CLI::App* check = app.add_subcommand("check", "Run a scenario");
  CLI::App* grid = app.add_subcommand("grid", "Weighted second-derivative grid as CSV");
  CLI::App* classify = app.add_subcommand("classify", "Fixed points and class of an automorphism or flow");
  for (CLI::App* sub : {norm, check, grid, classify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (!opt.tol.empty() && !check->parsed()) zyglab::io::invalid("--tol", "only the check subcommand takes tolerances");
    if (norm->parsed()) return run_norm(opt);
    if (check->parsed()) return run_check(opt);
    if (grid->parsed()) return run_grid(opt);
    return run_classify(opt);
  } catch (const zyglab::Error& e) {
    std::cerr << "zyglab: " << e.what() << '\n';
    switch (e.kind()) {
      case zyglab::ErrorKind::config_invalid:
      case zyglab::ErrorKind::bad_spec:
      case zyglab::ErrorKind::io_error:
      case zyglab::ErrorKind::degenerate_parameters:
        return kExitConfig;
      default:
        return kExitFailure;
    }
  }
}
