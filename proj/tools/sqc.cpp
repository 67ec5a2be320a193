// Command-line driver: runs the certification pipeline or one of its stages
// and writes a JSON (or CSV, for scans) record.
//
// Exit status: 0 certified / check passed, 1 failed or inconclusive,
// 2 invalid configuration.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sqc/certify.hpp"
#include "sqc/report.hpp"
#include "sqc/tartar.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct Options {
  sqc::RunConfig run;
  double epsilon = 0.0;
  double k = 0.0;
  std::string format = "json";
  int forms = 100;
  int fields = 20;
  bool timing = false;
};

int emit(const Options& opt, const std::string& text) {
  if (opt.run.output_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(opt.run.output_path, std::ios::binary);
  if (!out) {
    std::cerr << "sqc: cannot open " << opt.run.output_path << " for writing\n";
    return -1;
  }
  out << text;
  return 0;
}

std::string dump(const sqc::Json& j) {
  std::ostringstream os;
  sqc::write_json(os, j);
  return os.str();
}

sqc::Json config_header(const std::string& command, const sqc::RunConfig& cfg) {
  sqc::Json j = sqc::header_json(command);
  j["config"] = sqc::to_json(cfg);
  return j;
}

int finish(const Options& opt, const std::string& text, bool ok) {
  if (emit(opt, text) != 0) return kExitFailed;
  return ok ? kExitOk : kExitFailed;
}

int cmd_certify(const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  sqc::CertificateReport rep = sqc::run_certify(opt.run);
  if (opt.timing) {
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return finish(opt, dump(sqc::to_json(rep)), rep.verdict == sqc::Verdict::certified);
}

int cmd_rank_spectrum(const Options& opt) {
  const sqc::SpanBasis basis = sqc::basis_for(opt.run);
  const bool csv = opt.run.format == sqc::ReportFormat::csv;
  const sqc::SpectrumScan scan =
      sqc::scan_axis_spectrum(basis, opt.run.grid_resolution, opt.run.exclusion_radius, csv);
  const sqc::BasisCheck ranks = sqc::check_basis(basis);
  const double threshold = sqc::spectrum_threshold(basis, scan);
  const bool ok = ranks.ok && scan.min_sigma_n > threshold;
  if (csv) {
    std::ostringstream os;
    sqc::write_spectrum_csv(os, scan);
    return finish(opt, os.str(), ok);
  }
  sqc::Json j = config_header("rank-spectrum", opt.run);
  j["basis_check"] = sqc::to_json(ranks);
  sqc::Json s = sqc::to_json(scan);
  s["threshold"] = threshold;
  s["ok"] = ok;
  j["spectrum"] = s;
  return finish(opt, dump(j), ok);
}

double epsilon_for(const Options& opt, const sqc::SpanBasis& basis, const sqc::TrigMatField& b) {
  if (opt.run.epsilon) return *opt.run.epsilon;
  return sqc::choose_epsilon(b, basis, opt.run.safety, opt.run.nodes_per_axis);
}

int cmd_find_k(const Options& opt) {
  const sqc::SpanBasis basis = sqc::basis_for(opt.run);
  const double eps = epsilon_for(opt, basis, sqc::build_Bn(basis));
  const sqc::KSearchResult res = sqc::find_k(basis, eps, opt.run.defect_tolerance,
                                             {opt.run.samples, opt.run.restarts, opt.run.seed});
  sqc::Json j = config_header("find-k", opt.run);
  j["k_search"] = sqc::to_json(res);
  return finish(opt, dump(j), res.success);
}

int cmd_defect(const Options& opt) {
  const sqc::SpanBasis basis = sqc::basis_for(opt.run);
  const sqc::TrigMatField b = sqc::build_Bn(basis);
  const sqc::Moments mom = sqc::moments(b, basis, opt.run.nodes_per_axis);
  const double eps = opt.run.epsilon ? *opt.run.epsilon : sqc::choose_epsilon(mom, opt.run.safety);
  const sqc::DefectReport d = sqc::sq_defect(basis, {eps, opt.run.k.value_or(0.0)}, b, opt.run.nodes_per_axis);
  sqc::Json j = config_header("defect", opt.run);
  j["moments"] = sqc::to_json(mom, opt.run.nodes_per_axis);
  j["sq_defect"] = sqc::to_json(d);
  return finish(opt, dump(j), d.defect < -10.0 * sqc::kQuadratureTolerance);
}

int cmd_tartar(const Options& opt) {
  const sqc::TartarSummary t =
      sqc::tartar_check(opt.run.m, opt.run.n, opt.forms, opt.fields, opt.run.samples, opt.run.seed);
  sqc::Json j = config_header("tartar-check", opt.run);
  j["tartar"] = sqc::to_json(t);
  return finish(opt, dump(j), t.violations == 0 && t.convex_control_violations == 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify a rank-(n-1) convex function that is not quasiconvex on divergence-free fields"};
  app.set_config("--config", "", "Read flags from a TOML/INI file with the same keys");
  app.require_subcommand(1);

  Options opt;
  auto& cfg = opt.run;
  app.add_option("--n", cfg.n, "Number of columns (>= 3)")->capture_default_str();
  app.add_option("--m", cfg.m, "Number of rows (>= n + 1)")->capture_default_str();
  auto* eps_opt = app.add_option("--epsilon", opt.epsilon, "Override the chosen epsilon");
  app.add_option("--safety", cfg.safety, "Fraction of the admissible epsilon range")->capture_default_str();
  auto* k_opt = app.add_option("--k", opt.k, "Override the searched penalty k");
  app.add_option("--seed", cfg.seed, "Seed for every sampler")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Random samples per search")->capture_default_str();
  app.add_option("--restarts", cfg.restarts, "Local minimizations per search")->capture_default_str();
  app.add_option("--grid", cfg.grid_resolution, "Sphere grid points")->capture_default_str();
  app.add_option("--exclusion", cfg.exclusion_radius, "Axis exclusion radius (radians)")->capture_default_str();
  app.add_option("--nodes", cfg.nodes_per_axis, "Quadrature nodes per active axis")->capture_default_str();
  app.add_option("--diag-rule", cfg.diag_rule, "alpha1, alpha2 or a 1/2 digit pattern")->capture_default_str();
  app.add_option("--tolerance", cfg.defect_tolerance, "Convexity defect tolerance")->capture_default_str();
  app.add_option("--out", cfg.output_path, "Output file (default: stdout)");
  app.add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--forms", opt.forms, "tartar-check: number of random quadratic forms")->capture_default_str();
  app.add_option("--fields", opt.fields, "tartar-check: number of random solenoidal fields")->capture_default_str();
  app.add_flag("--timing", opt.timing, "Record wall time in the certify report");

  auto* certify = app.add_subcommand("certify", "Run the full certification pipeline")->fallthrough();
  auto* spectrum = app.add_subcommand("rank-spectrum", "Scan sigma_n(M(alpha)) over the sphere")->fallthrough();
  auto* findk = app.add_subcommand("find-k", "Search the penalty k for a given epsilon")->fallthrough();
  auto* defect = app.add_subcommand("defect", "Evaluate the solenoidal Jensen defect")->fallthrough();
  auto* tartar = app.add_subcommand("tartar-check", "Quadratic-form property suite")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*eps_opt) cfg.epsilon = opt.epsilon;
  if (*k_opt) cfg.k = opt.k;
  cfg.format = opt.format == "csv" ? sqc::ReportFormat::csv : sqc::ReportFormat::json;

  try {
    cfg.validate();
    if (opt.forms < 1 || opt.fields < 1) throw sqc::ConfigError("forms and fields must be positive");
    if (*certify) return cmd_certify(opt);
    if (*spectrum) return cmd_rank_spectrum(opt);
    if (*findk) return cmd_find_k(opt);
    if (*defect) return cmd_defect(opt);
    if (*tartar) return cmd_tartar(opt);
  } catch (const sqc::ConfigError& e) {
    std::cerr << "sqc: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sqc::ExactnessError& e) {
    std::cerr << "sqc: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sqc::Error& e) {
    std::cerr << "sqc: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitConfig;
}
