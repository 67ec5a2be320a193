#pragma once

// End-to-end certification run for one (n, m): every stage of the
// construction is rebuilt and checked, and the outcome is collected in a
// CertificateReport.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sqc/convexity.hpp"
#include "sqc/matcore.hpp"
#include "sqc/torus.hpp"

namespace sqc {

inline constexpr const char* kToolName = "sqc";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchema = "cert/1";

/// Absolute accuracy assumed for every torus integral.
inline constexpr double kQuadratureTolerance = 1e-10;

/// Invalid run configuration (exit status 2 in the CLI).
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

enum class ReportFormat { json, csv };

struct RunConfig {
  int n = 3;
  int m = 4;
  std::optional<double> epsilon;
  double safety = 0.5;
  std::optional<double> k;
  std::uint64_t seed = 0;
  long samples = 100000;
  int restarts = 32;
  int grid_resolution = 4096;
  double exclusion_radius = 0.1;
  int nodes_per_axis = 16;
  std::string diag_rule = "alpha1";
  double defect_tolerance = 1e-8;
  std::string output_path;  // empty: stdout
  ReportFormat format = ReportFormat::json;

  void validate() const {
    if (n < 3) throw ConfigError("n must be >= 3 (n = 2 is the gradient case), got " + std::to_string(n));
    if (m < n + 1) throw ConfigError("m must be >= n + 1");
    if (samples < 1 || restarts < 1 || nodes_per_axis < 1) throw ConfigError("counts must be positive");
    if (grid_resolution < 16) throw ConfigError("grid must be >= 16");
    if (!(safety > 0.0) || !(safety < 1.0)) throw ConfigError("safety must lie in (0, 1)");
    if (!(exclusion_radius > 0.0) || !(exclusion_radius < std::numbers::pi / 4)) {
      throw ConfigError("exclusion must lie in (0, pi/4)");
    }
    if (epsilon && (!std::isfinite(*epsilon) || !(*epsilon > 0.0))) throw ConfigError("epsilon must be > 0");
    if (k && (!std::isfinite(*k) || *k < 0.0)) throw ConfigError("k must be >= 0");
    if (!(defect_tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
    try {
      (void)DiagRule::parse(diag_rule);
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  }
};

enum class Verdict { certified, inconclusive, failed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified:
      return "counterexample-certified";
    case Verdict::inconclusive:
      return "inconclusive";
    case Verdict::failed:
      return "failed";
  }
  return "failed";
}

struct BasisCheck {
  std::array<int, 3> ranks{};
  int max_rank = 0;
  double rank_tolerance = 0.0;
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  bool ok = false;
};

struct StructureCheck {
  bool div_free = false;
  double mean_norm = 0.0;
  double membership_residual = 0.0;  // max |B(x) - PB(x)| over random x
  bool ok = false;
};

struct EpsilonChoice {
  double value = 0.0;
  bool overridden = false;
  double safety = 0.0;
  double inequality_value = 0.0;  // I0 + eps (I2 + I4)
};

struct ConvexityCheck {
  double value = 0.0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool ok = false;
};

struct CertificateReport {
  RunConfig config;
  BasisCheck basis_check;
  std::optional<SpectrumScan> spectrum;
  double spectrum_threshold = 0.0;
  bool spectrum_ok = false;
  std::optional<StructureCheck> structure;
  std::optional<Moments> moments;
  std::optional<EpsilonChoice> epsilon;
  std::optional<KSearchResult> k_search;
  bool k_overridden = false;
  std::optional<ConvexityCheck> convexity;
  std::optional<DefectReport> defect;
  double defect_threshold = -10.0 * kQuadratureTolerance;
  Verdict verdict = Verdict::failed;
  std::string failed_stage;
  std::optional<double> wall_time_s;
};

inline SpanBasis basis_for(const RunConfig& config) {
  return build_base_n(config.n, config.m, DiagRule::parse(config.diag_rule));
}

inline BasisCheck check_basis(const SpanBasis& basis) {
  BasisCheck out;
  out.max_rank = basis.n() - 1;
  out.rank_tolerance = default_rank_tol(basis.m(), basis.n());
  out.gram = basis.gram();
  out.ok = true;
  for (int i = 0; i < 3; ++i) {
    out.ranks[static_cast<std::size_t>(i)] = numeric_rank(basis.v(i), out.rank_tolerance);
    if (out.ranks[static_cast<std::size_t>(i)] > out.max_rank) out.ok = false;
  }
  return out;
}

/// The refined minimum must clear ten times the absolute rank cut at its
/// own argmin.
inline double spectrum_threshold(const SpanBasis& basis, const SpectrumScan& scan) {
  const double smax = singular_values(combo(basis, scan.argmin_alpha)).maxCoeff();
  return 10.0 * default_rank_tol(basis.m(), basis.n()) * smax;
}

inline StructureCheck check_structure(const SpanBasis& basis, const TrigMatField& b, std::uint64_t seed,
                                      int points = 100) {
  StructureCheck out;
  out.div_free = check_div_free(b);
  out.mean_norm = mean(b).norm();
  auto rng = detail::substream(seed, 0xB0B0u);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(b.n()));
  for (int i = 0; i < points; ++i) {
    for (auto& v : x) v = unit(rng);
    const Mat value = b.evaluate(x);
    out.membership_residual = std::max(out.membership_residual, (value - project(basis, value)).norm());
  }
  out.ok = out.div_free && out.mean_norm == 0.0 && out.membership_residual <= 1e-12;
  return out;
}

/// Runs every stage. Exactness errors from the quadrature propagate; any
/// other stage error ends the run with verdict "failed" and the stage name.
inline CertificateReport run_certify(const RunConfig& config) {
  config.validate();
  CertificateReport rep;
  rep.config = config;
  const auto fail = [&](const std::string& stage) {
    if (rep.failed_stage.empty()) rep.failed_stage = stage;
  };

  std::optional<SpanBasis> basis;
  try {
    basis.emplace(basis_for(config));
  } catch (const Error&) {
    fail("basis");
    return rep;
  }
  rep.basis_check = check_basis(*basis);
  if (!rep.basis_check.ok) fail("ranks");

  rep.spectrum = scan_axis_spectrum(*basis, config.grid_resolution, config.exclusion_radius);
  rep.spectrum_threshold = spectrum_threshold(*basis, *rep.spectrum);
  rep.spectrum_ok = rep.spectrum->min_sigma_n > rep.spectrum_threshold;
  if (!rep.spectrum_ok) fail("spectrum");

  const TrigMatField b = build_Bn(*basis);
  rep.structure = check_structure(*basis, b, config.seed);
  if (!rep.structure->ok) fail("structure");

  rep.moments = moments(b, *basis, config.nodes_per_axis);

  EpsilonChoice eps;
  eps.safety = config.safety;
  if (config.epsilon) {
    eps.value = *config.epsilon;
    eps.overridden = true;
  } else {
    try {
      eps.value = choose_epsilon(*rep.moments, config.safety);
    } catch (const NotACounterexampleError&) {
      fail("epsilon");
      return rep;
    }
  }
  eps.inequality_value = rep.moments->i0 + eps.value * (rep.moments->i2 + rep.moments->i4);
  rep.epsilon = eps;

  const double radius = search_radius(*basis, eps.value);
  if (config.k) {
    rep.k_overridden = true;
    KSearchResult ks;
    ks.epsilon = eps.value;
    ks.k = *config.k;
    ks.search_radius = radius;
    ks.samples = config.samples;
    ks.restarts = config.restarts;
    ks.seed = config.seed;
    ks.probes = 1;
    ks.shell_min = std::numeric_limits<double>::quiet_NaN();
    ks.min_defect =
        min_hess_defect(*basis, {eps.value, ks.k}, radius, config.samples, config.restarts, config.seed).value;
    ks.success = ks.min_defect >= -config.defect_tolerance;
    rep.k_search = ks;
  } else {
    rep.k_search = find_k(*basis, eps.value, config.defect_tolerance,
                          KSearchBudget{config.samples, config.restarts, config.seed});
  }

  ConvexityCheck conv;
  conv.seed = config.seed + 1;
  conv.tolerance = config.defect_tolerance;
  conv.value = min_hess_defect(*basis, {eps.value, rep.k_search->k}, radius, config.samples, config.restarts,
                               conv.seed)
                   .value;
  conv.ok = conv.value >= -config.defect_tolerance;
  rep.convexity = conv;

  rep.defect = sq_defect(*basis, {eps.value, rep.k_search->k}, b, config.nodes_per_axis);
  const bool defect_ok = rep.defect->defect < rep.defect_threshold;
  if (!defect_ok) fail("sq_defect");

  if (!rep.failed_stage.empty()) {
    rep.verdict = Verdict::failed;
  } else if (!rep.k_search->success) {
    rep.verdict = Verdict::inconclusive;
    rep.failed_stage = "k_search";
  } else if (!conv.ok) {
    rep.verdict = Verdict::inconclusive;
    rep.failed_stage = "convexity";
  } else {
    rep.verdict = Verdict::certified;
  }
  return rep;
}

}  // namespace sqc
