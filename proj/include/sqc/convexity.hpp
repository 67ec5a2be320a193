#pragma once

// Rank determination, sampling of rank-deficient directions, sphere scans of
// the smallest singular value of M(alpha), convexity checks along lines, the
// adversarial search for negative second derivatives of F, and the search
// for a penalty k that makes F convex along rank-(n-1) lines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "sqc/detail/optimize.hpp"
#include "sqc/matcore.hpp"

namespace sqc {

using ScalarFn = std::function<double(const Mat&)>;

/// Default relative rank tolerance for an m x n matrix.
inline double default_rank_tol(int m, int n) { return 1e-10 * static_cast<double>(std::max(m, n)); }

inline Eigen::VectorXd singular_values(const Mat& x) {
  if (x.size() == 0) return {};
  return Eigen::JacobiSVD<Mat>(x).singularValues();
}

/// Smallest of the min(m, n) singular values.
inline double sigma_min(const Mat& x) {
  const Eigen::VectorXd s = singular_values(x);
  return s.size() == 0 ? 0.0 : s.minCoeff();
}

/// Number of singular values above tol * sigma_max.
inline int numeric_rank(const Mat& x, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("numeric_rank: tol must be > 0");
  const Eigen::VectorXd s = singular_values(x);
  if (s.size() == 0 || s.maxCoeff() == 0.0) return 0;
  const double cut = tol * s.maxCoeff();
  return static_cast<int>((s.array() > cut).count());
}

struct LowRankSample {
  Mat left;   // m x r
  Mat right;  // n x r
  Mat y;      // left * right^T, unit Frobenius norm
};

template <class Rng>
LowRankSample sample_low_rank_factors(int m, int n, int r, Rng& rng) {
  if (r < 1 || r > std::min(m, n)) throw PreconditionError("sample_low_rank: need 1 <= r <= min(m, n)");
  std::normal_distribution<double> normal(0.0, 1.0);
  LowRankSample s;
  for (;;) {
    s.left = Mat(m, r);
    s.right = Mat(n, r);
    for (Eigen::Index i = 0; i < s.left.size(); ++i) s.left.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < s.right.size(); ++i) s.right.data()[i] = normal(rng);
    s.y = s.left * s.right.transpose();
    const double norm = s.y.norm();
    if (norm > 1e-300) {
      s.y /= norm;
      s.left /= norm;
      return s;
    }
  }
}

/// Unit-norm m x n matrix of rank <= r drawn as a product of Gaussian factors.
template <class Rng>
Mat sample_low_rank(int m, int n, int r, Rng& rng) {
  return sample_low_rank_factors(m, n, r, rng).y;
}

/// Equally spaced grid of `points` values on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2) throw PreconditionError("uniform_grid: need at least two points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  return t;
}

/// Minimum centered second difference of t -> g(A + tY) over the interior of
/// an equally spaced grid.
inline double line_convexity_defect(const ScalarFn& g, const Mat& a, const Mat& y, std::span<const double> t_grid) {
  if (t_grid.size() < 3) throw PreconditionError("line_convexity_defect: need at least 3 grid points");
  const double h = t_grid[1] - t_grid[0];
  if (!(h > 0.0)) throw PreconditionError("line_convexity_defect: grid must be increasing");
  std::vector<double> values(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) values[i] = g(a + t_grid[i] * y);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < t_grid.size(); ++i) {
    worst = std::min(worst, (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Sphere scan of sigma_n(M(alpha))

struct SpectrumSample {
  Vec3 alpha;
  double sigma_n = 0.0;
  bool admissible = false;
};

struct SpectrumScan {
  int n = 0;
  int m = 0;
  int grid_resolution = 0;
  double exclusion_radius = 0.0;
  double min_sigma_n = 0.0;       // refined
  double grid_min_sigma_n = 0.0;  // before refinement
  Vec3 argmin_alpha = Vec3::Zero();
  std::array<double, 3> axis_sigmas{};
  int admissible_points = 0;
  // Weyl bound sigma_n(M(a)) <= sigma_n(M(e)) + |M(a) - M(e)|_2 verified on
  // every grid point inside an axis neighborhood.
  bool neighborhood_continuity = true;
  std::vector<SpectrumSample> samples;
};

/// Point i of an N-point Fibonacci lattice on the unit sphere.
inline Vec3 fibonacci_point(int i, int count) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double z = 1.0 - (2.0 * i + 1.0) / count;
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * i;
  return {r * std::cos(phi), r * std::sin(phi), z};
}

/// Angular distance from alpha (unit) to the nearest of the six signed axes.
inline double axis_distance(const Vec3& alpha) {
  return std::acos(std::clamp(alpha.cwiseAbs().maxCoeff(), -1.0, 1.0));
}

inline SpectrumScan scan_axis_spectrum(const SpanBasis& basis, int grid_resolution, double exclusion_radius,
                                       bool keep_samples = false) {
  if (grid_resolution < 16) throw PreconditionError("scan_axis_spectrum: grid_resolution must be >= 16");
  if (!(exclusion_radius > 0.0) || !(exclusion_radius < std::numbers::pi / 4)) {
    throw PreconditionError("scan_axis_spectrum: exclusion radius must lie in (0, pi/4)");
  }
  SpectrumScan scan;
  scan.n = basis.n();
  scan.m = basis.m();
  scan.grid_resolution = grid_resolution;
  scan.exclusion_radius = exclusion_radius;
  for (int i = 0; i < 3; ++i) scan.axis_sigmas[static_cast<std::size_t>(i)] = sigma_min(basis.v(i));

  const auto admissible = [&](const Vec3& a) { return axis_distance(a) >= exclusion_radius; };
  const auto sigma_at = [&](const Vec3& a) { return sigma_min(combo(basis, a)); };

  std::vector<std::pair<double, int>> ranked;
  for (int i = 0; i < grid_resolution; ++i) {
    const Vec3 a = fibonacci_point(i, grid_resolution);
    const double s = sigma_at(a);
    const bool ok = admissible(a);
    if (ok) {
      ranked.emplace_back(s, i);
    } else {
      int axis = 0;
      a.cwiseAbs().maxCoeff(&axis);
      Vec3 e = Vec3::Zero();
      e(axis) = a(axis) > 0 ? 1.0 : -1.0;
      const double lip = singular_values(combo(basis, a) - combo(basis, e)).maxCoeff();
      if (s > sigma_at(e) + lip + 1e-12) scan.neighborhood_continuity = false;
    }
    if (keep_samples) scan.samples.push_back({a, s, ok});
  }
  scan.admissible_points = static_cast<int>(ranked.size());
  if (ranked.empty()) throw PreconditionError("scan_axis_spectrum: no admissible grid points");
  std::sort(ranked.begin(), ranked.end());
  scan.grid_min_sigma_n = ranked.front().first;
  scan.min_sigma_n = ranked.front().first;
  scan.argmin_alpha = fibonacci_point(ranked.front().second, grid_resolution);

  // Local refinement in tangent coordinates around the best grid points.
  const double spacing = std::sqrt(4.0 * std::numbers::pi / grid_resolution);
  const std::size_t starts = std::min<std::size_t>(8, ranked.size());
  for (std::size_t s = 0; s < starts; ++s) {
    const Vec3 a0 = fibonacci_point(ranked[s].second, grid_resolution);
    Vec3 helper = std::abs(a0(0)) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 t1 = a0.cross(helper).normalized();
    const Vec3 t2 = a0.cross(t1);
    const auto point = [&](const Eigen::VectorXd& p) { return Vec3((a0 + p(0) * t1 + p(1) * t2).normalized()); };
    const detail::Objective obj = [&](const Eigen::VectorXd& p) {
      const Vec3 a = point(p);
      return admissible(a) ? sigma_at(a) : std::numeric_limits<double>::infinity();
    };
    const auto res = detail::nelder_mead(obj, Eigen::VectorXd::Zero(2), 0.5 * spacing, 600, 1e-14);
    if (res.value < scan.min_sigma_n) {
      scan.min_sigma_n = res.value;
      scan.argmin_alpha = point(res.x);
    }
  }

  // The admissible region is closed; its boundary is three circles (the
  // sign of alpha does not change sigma_n). Scan each and polish with a
  // golden-section step.
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 e = Vec3::Unit(axis);
    const Vec3 u = Vec3::Unit((axis + 1) % 3);
    const Vec3 w = Vec3::Unit((axis + 2) % 3);
    // Nudged outward so rounding cannot leave the admissible region.
    const double rad = exclusion_radius * (1.0 + 1e-12);
    const auto circle = [&](double theta) {
      return Vec3(std::cos(rad) * e + std::sin(rad) * (std::cos(theta) * u + std::sin(theta) * w));
    };
    constexpr int kSteps = 720;
    const double step = 2.0 * std::numbers::pi / kSteps;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kSteps; ++i) {
      const double v = sigma_at(circle(i * step));
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 80; ++it) {
      const double c = hi - ratio * (hi - lo);
      const double d = lo + ratio * (hi - lo);
      if (sigma_at(circle(c)) < sigma_at(circle(d))) {
        hi = d;
      } else {
        lo = c;
      }
    }
    const Vec3 a = circle(0.5 * (lo + hi));
    const double v = std::min(best_val, sigma_at(a));
    if (v < scan.min_sigma_n) {
      scan.min_sigma_n = v;
      scan.argmin_alpha = v == best_val ? circle(best * step) : a;
    }
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Adversarial minimization of the second directional derivative of F

/// kappa with |D^2(f o P)(A)[Y, Y]| <= 6 kappa |A| |Y|^2, from the dual
/// generator norms.
inline double trilinear_bound(const SpanBasis& basis) {
  return basis.dual(0).norm() * basis.dual(1).norm() * basis.dual(2).norm();
}

/// Radius beyond which the quartic term dominates the trilinear one.
inline double search_radius(const SpanBasis& basis, double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionError("search_radius: epsilon must be > 0");
  return 1.0 + 3.0 * trilinear_bound(basis) / (2.0 * epsilon);
}

struct HessDefect {
  double value = std::numeric_limits<double>::infinity();
  Mat a;
  Mat y;
};

namespace detail {

/// For unit Y, the minimizer over A of the Hessian form is available in
/// closed form: the A-dependent part is -2<A, W_Y> + A^T Q_Y A with
/// Q_Y = 4 eps I + 8 eps Y Y^T. Returns that minimizer clamped to the ball.
inline Mat best_base_point(const SpanBasis& basis, const ExtensionParams& params, const Mat& y, double radius) {
  const CoordTriple ey = coords(basis, y);
  const Mat w = (ey.eta2 * ey.eta3) * basis.dual(0) + (ey.eta1 * ey.eta3) * basis.dual(1) +
                (ey.eta1 * ey.eta2) * basis.dual(2);
  Mat a = (w - (2.0 / 3.0) * frob_dot(w, y) * y) / (4.0 * params.epsilon);
  const double norm = a.norm();
  if (norm > radius) a *= radius / norm;
  return a;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  Mat left;
  Mat right;
  Mat a;
  Mat y;
  std::uint64_t order = 0;  // deterministic tie-break
};

inline bool candidate_less(const Candidate& x, const Candidate& y) {
  return std::tie(x.value, x.order) < std::tie(y.value, y.order);
}

inline constexpr int kLanes = 8;

}  // namespace detail

/// Smallest value of D^2F(A)[Y, Y] found over |A| <= radius and unit Y of
/// rank <= n-1.
///
/// Phase one draws `samples` random pairs (A uniform in the ball, Y from
/// sample_low_rank); each Y is also scored with its optimal base point. Phase
/// two runs BFGS over the low-rank factors of Y from the `restarts` best
/// samples. Work is split into fixed lanes with their own substreams and
/// reduced by (value, sample index), so the result only depends on `seed`.
inline HessDefect min_hess_defect(const SpanBasis& basis, const ExtensionParams& params, double radius,
                                  long samples, int restarts, std::uint64_t seed) {
  params.validate();
  if (!(radius > 0.0)) throw PreconditionError("min_hess_defect: radius must be > 0");
  if (samples < 1) throw PreconditionError("min_hess_defect: samples must be >= 1");
  const int m = basis.m();
  const int n = basis.n();
  const int r = n - 1;
  const auto keep = static_cast<std::size_t>(std::max(restarts, 1));

  auto lane_job = [&](int lane) {
    auto rng = detail::substream(seed, static_cast<std::uint64_t>(lane));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long count = samples / detail::kLanes + (lane < samples % detail::kLanes ? 1 : 0);
    std::vector<detail::Candidate> best;
    for (long i = 0; i < count; ++i) {
      LowRankSample s = sample_low_rank_factors(m, n, r, rng);
      Mat a(m, n);
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = normal(rng);
      a *= radius * std::pow(unit(rng), 1.0 / static_cast<double>(m * n)) / a.norm();
      double value = hess_form_F(basis, params, a, s.y);
      Mat a_star = detail::best_base_point(basis, params, s.y, radius);
      const double reduced = hess_form_F(basis, params, a_star, s.y);
      if (reduced < value) {
        value = reduced;
        a = std::move(a_star);
      }
      detail::Candidate c{value, std::move(s.left), std::move(s.right), std::move(a), std::move(s.y),
                          static_cast<std::uint64_t>(i) * detail::kLanes + static_cast<std::uint64_t>(lane)};
      if (best.size() < keep || detail::candidate_less(c, best.back())) {
        best.insert(std::upper_bound(best.begin(), best.end(), c, detail::candidate_less), std::move(c));
        if (best.size() > keep) best.pop_back();
      }
    }
    return best;
  };

  std::vector<std::future<std::vector<detail::Candidate>>> jobs;
  for (int lane = 0; lane < detail::kLanes; ++lane) jobs.push_back(std::async(std::launch::async, lane_job, lane));
  std::vector<detail::Candidate> pool;
  for (auto& j : jobs) {
    auto part = j.get();
    std::move(part.begin(), part.end(), std::back_inserter(pool));
  }
  std::sort(pool.begin(), pool.end(), detail::candidate_less);
  if (pool.size() > keep) pool.resize(keep);

  auto unpack = [m, n, r](const Eigen::VectorXd& p) {
    const Mat left = Eigen::Map<const Mat>(p.data(), m, r);
    const Mat right = Eigen::Map<const Mat>(p.data() + m * r, n, r);
    return Mat(left * right.transpose());
  };
  auto refine = [&](const detail::Candidate& start) {
    const detail::Objective obj = [&](const Eigen::VectorXd& p) {
      const Mat y = unpack(p);
      const double norm = y.norm();
      if (!(norm > 1e-9)) return std::numeric_limits<double>::infinity();
      const Mat yu = y / norm;
      return hess_form_F(basis, params, detail::best_base_point(basis, params, yu, radius), yu);
    };
    Eigen::VectorXd p0(m * r + n * r);
    p0.head(m * r) = Eigen::Map<const Eigen::VectorXd>(start.left.data(), m * r);
    p0.tail(n * r) = Eigen::Map<const Eigen::VectorXd>(start.right.data(), n * r);
    const auto res = detail::bfgs(obj, p0, 300);
    detail::Candidate out = start;
    if (res.value < start.value) {
      out.y = unpack(res.x);
      out.y /= out.y.norm();
      out.a = detail::best_base_point(basis, params, out.y, radius);
      out.value = hess_form_F(basis, params, out.a, out.y);
    }
    return out;
  };

  std::vector<std::future<detail::Candidate>> refined;
  for (const auto& c : pool) refined.push_back(std::async(std::launch::async, refine, std::cref(c)));
  detail::Candidate winner;
  for (auto& f : refined) {
    auto c = f.get();
    if (detail::candidate_less(c, winner)) winner = std::move(c);
  }
  return {winner.value, std::move(winner.a), std::move(winner.y)};
}

struct KSearchBudget {
  long samples = 100000;
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_probes = 64;
  int shell_samples = 4096;
};

struct KSearchResult {
  double epsilon = 0.0;
  double k = 0.0;
  double min_defect = 0.0;
  double search_radius = 0.0;
  long samples = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  int probes = 0;
  double shell_min = 0.0;
  bool success = false;  // false means inconclusive, not a certified failure
};

namespace detail {

/// Smallest two-significant-digit value >= x.
inline double round_up_2sig(double x) {
  if (!(x > 0.0)) return x;
  const double unit = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
  double v = std::ceil(x / unit - 1e-9) * unit;
  // Re-express through a decimal string so the value prints cleanly.
  return std::stod(std::to_string(v));
}

}  // namespace detail

/// Smallest k on the doubling/bisection lattice for which no negative
/// second derivative of F along rank-(n-1) lines is found.
inline KSearchResult find_k(const SpanBasis& basis, double epsilon, double defect_tolerance,
                            const KSearchBudget& budget = {}) {
  if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw PreconditionError("find_k: epsilon must be > 0");
  if (!(defect_tolerance >= 0.0)) throw PreconditionError("find_k: tolerance must be >= 0");
  KSearchResult out;
  out.epsilon = epsilon;
  out.search_radius = search_radius(basis, epsilon);
  out.samples = budget.samples;
  out.restarts = budget.restarts;
  out.seed = budget.seed;

  // Shell check: on |A| = R the Hessian form must already be nonnegative
  // without any help from the penalty.
  {
    auto rng = detail::substream(budget.seed, 0xC0FFEEu);
    std::normal_distribution<double> normal(0.0, 1.0);
    const ExtensionParams bare{epsilon, 0.0};
    double shell = std::numeric_limits<double>::infinity();
    for (int i = 0; i < budget.shell_samples; ++i) {
      const Mat y = sample_low_rank(basis.m(), basis.n(), basis.n() - 1, rng);
      Mat a(basis.m(), basis.n());
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = normal(rng);
      a *= out.search_radius / a.norm();
      shell = std::min(shell, hess_form_F(basis, bare, a, y));
    }
    out.shell_min = shell;
    if (shell < -defect_tolerance) return out;
  }

  auto probe = [&](double k) {
    ++out.probes;
    return min_hess_defect(basis, {epsilon, k}, out.search_radius, budget.samples, budget.restarts, budget.seed)
        .value;
  };
  auto accept = [&](double value) { return value >= -defect_tolerance; };

  double hi = 1.0;
  double hi_value = probe(hi);
  while (!accept(hi_value)) {
    if (out.probes >= budget.max_probes) {
      out.k = hi;
      out.min_defect = hi_value;
      return out;
    }
    hi *= 2.0;
    hi_value = probe(hi);
  }
  if (hi > 1.0) {
    double lo = hi / 2.0;
    while (hi - lo > 0.005 * hi && out.probes < budget.max_probes) {
      const double mid = 0.5 * (lo + hi);
      const double v = probe(mid);
      if (accept(v)) {
        hi = mid;
        hi_value = v;
      } else {
        lo = mid;
      }
    }
    // Snap to the two-significant-digit lattice: first lattice value above
    // the last failure that passes.
    const double unit = std::pow(10.0, std::floor(std::log10(hi)) - 1.0);
    for (double c = detail::round_up_2sig(std::max(lo, unit)); out.probes < budget.max_probes;
         c = detail::round_up_2sig(c + 0.5 * unit)) {
      const double v = probe(c);
      if (accept(v)) {
        hi = c;
        hi_value = v;
        break;
      }
    }
  }
  out.k = hi;
  out.min_defect = hi_value;
  out.success = accept(hi_value);
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic forms

/// Q(X) = vec(X)^T C vec(X) with column-major vec and symmetric C.
class QuadForm {
 public:
  QuadForm(int m, int n, Eigen::MatrixXd coeff) : m_(m), n_(n) {
    if (coeff.rows() != m * n || coeff.cols() != m * n) throw DimensionError("QuadForm: coefficient must be mn x mn");
    coeff_ = 0.5 * (coeff + coeff.transpose());
  }

  static QuadForm identity(int m, int n, double scale = 1.0) {
    return {m, n, scale * Eigen::MatrixXd::Identity(m * n, m * n)};
  }

  int m() const { return m_; }
  int n() const { return n_; }
  const Eigen::MatrixXd& coeff() const { return coeff_; }

  double operator()(const Mat& x) const {
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), x.size());
    return v.dot(coeff_ * v);
  }

 private:
  int m_;
  int n_;
  Eigen::MatrixXd coeff_;
};

struct QuadScan {
  double min_value = std::numeric_limits<double>::infinity();
  Mat argmin;
  bool accepted = false;
};

/// Minimum of Q over sampled unit matrices of rank <= n-1, with alternating
/// eigen-refinement of the worst samples over their row and column factors.
inline QuadScan quadform_lambda_scan(const QuadForm& q, long samples, std::uint64_t seed, double tol = 1e-10) {
  const int m = q.m();
  const int n = q.n();
  const int r = n - 1;
  auto rng = detail::substream(seed, 0x7A7Au);
  std::vector<std::pair<double, LowRankSample>> worst;
  constexpr std::size_t kRefine = 8;
  QuadScan out;
  for (long i = 0; i < samples; ++i) {
    LowRankSample s = sample_low_rank_factors(m, n, r, rng);
    const double v = q(s.y);
    if (v < out.min_value) {
      out.min_value = v;
      out.argmin = s.y;
    }
    if (worst.size() < kRefine || v < worst.back().first) {
      auto pos = std::upper_bound(worst.begin(), worst.end(), v, [](double x, const auto& e) { return x < e.first; });
      worst.insert(pos, {v, std::move(s)});
      if (worst.size() > kRefine) worst.pop_back();
    }
  }
  for (auto& [v0, s] : worst) {
    Mat right = Eigen::HouseholderQR<Mat>(s.right).householderQ() * Mat::Identity(n, r);
    Mat left = s.left;
    for (int it = 0; it < 25; ++it) {
      // vec(L R^T) = (R kron I_m) vec(L), isometric when R has orthonormal columns.
      Mat k1 = Mat::Zero(m * n, m * r);
      for (int c = 0; c < n; ++c) {
        for (int j = 0; j < r; ++j) k1.block(c * m, j * m, m, m) = right(c, j) * Mat::Identity(m, m);
      }
      Eigen::SelfAdjointEigenSolver<Mat> e1(k1.transpose() * q.coeff() * k1);
      left = Eigen::Map<const Mat>(e1.eigenvectors().col(0).data(), m, r);
      left = Eigen::HouseholderQR<Mat>(left).householderQ() * Mat::Identity(m, r);
      // vec(L R^T) = (I_n kron L) vec(R^T).
      Mat k2 = Mat::Zero(m * n, n * r);
      for (int c = 0; c < n; ++c) k2.block(c * m, c * r, m, r) = left;
      Eigen::SelfAdjointEigenSolver<Mat> e2(k2.transpose() * q.coeff() * k2);
      const Mat right_t = Eigen::Map<const Mat>(e2.eigenvectors().col(0).data(), r, n);
      const Mat y = left * right_t;
      const double v = q(y);
      if (v < out.min_value) {
        out.min_value = v;
        out.argmin = y;
      }
      right = Eigen::HouseholderQR<Mat>(Mat(right_t.transpose())).householderQ() * Mat::Identity(n, r);
    }
  }
  out.accepted = out.min_value >= -tol;
  return out;
}

/// True iff Q >= -1e-10 on every sampled unit matrix of rank <= n-1.
inline bool quadform_lambda_convex(const QuadForm& q, long samples, std::uint64_t seed) {
  return quadform_lambda_scan(q, samples, seed).accepted;
}

}  // namespace sqc
