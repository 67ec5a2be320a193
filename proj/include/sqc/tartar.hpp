#pragma once

// Quadratic forms that are convex along rank-(n-1) lines have nonnegative
// solenoidal Jensen defect. This suite draws forms, filters them with
// quadform_lambda_scan and checks the defect on random solenoidal fields.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "sqc/convexity.hpp"
#include "sqc/torus.hpp"

namespace sqc {

/// Random symmetric form on m x n matrices. Half of the draws come from the
/// family |X|^2 - mu <O, X>^2 + (small PSD term), O a partial isometry,
/// which is rank-(n-1) convex for mu <= 1/(n-1) but not convex for
/// mu > 1/n. The other half are shifted Gaussian symmetric forms.
template <class Rng>
QuadForm random_quadform(int m, int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int d = m * n;
  auto gaussian = [&](int rows, int cols) {
    Mat g(rows, cols);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    return g;
  };
  if (unit(rng) < 0.5) {
    const Mat u = Eigen::HouseholderQR<Mat>(gaussian(m, m)).householderQ();
    const Mat v = Eigen::HouseholderQR<Mat>(gaussian(n, n)).householderQ();
    const Mat o = u.leftCols(n) * v.transpose();
    const Eigen::Map<const Eigen::VectorXd> ov(o.data(), d);
    const double mu = unit(rng) * 2.0 / (n - 1);
    const Mat g = gaussian(d, d);
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(d, d) - mu * ov * ov.transpose();
    c += 0.1 * unit(rng) * g * g.transpose() / d;
    return {m, n, c};
  }
  const Mat s = gaussian(d, d);
  Eigen::MatrixXd c = (s + s.transpose()) / std::sqrt(2.0 * d);
  c += 2.0 * unit(rng) * Eigen::MatrixXd::Identity(d, d);
  return {m, n, c};
}

struct TartarSummary {
  int forms = 0;
  int accepted = 0;
  int accepted_nonconvex = 0;  // accepted forms with a negative eigenvalue
  int fields = 0;
  int violations = 0;
  int convex_control_violations = 0;
  double min_scaled_defect = std::numeric_limits<double>::infinity();
  double min_convex_control_defect = std::numeric_limits<double>::infinity();
};

/// Sum of squared coefficient norms of the oscillating modes.
inline double oscillation_energy(const TrigMatField& b) {
  double e = 0.0;
  for (const auto& mode : b.modes()) {
    if (std::any_of(mode.freq.begin(), mode.freq.end(), [](int v) { return v != 0; })) {
      e += mode.cos_coeff.squaredNorm() + mode.sin_coeff.squaredNorm();
    }
  }
  return e;
}

inline TartarSummary tartar_check(int m, int n, int forms, int fields, long samples, std::uint64_t seed,
                                  int max_freq = 2, int modes = 4) {
  TartarSummary out;
  out.forms = forms;
  out.fields = fields;
  auto form_rng = detail::substream(seed, 1);
  auto field_rng = detail::substream(seed, 2);
  std::vector<TrigMatField> pool;
  for (int f = 0; f < fields; ++f) pool.push_back(random_solenoidal(m, n, max_freq, modes, field_rng, true));

  const ScalarFn sq = [](const Mat& x) { return x.squaredNorm(); };
  const ScalarFn quartic = [](const Mat& x) { return std::pow(x.squaredNorm(), 2); };
  for (const auto& b : pool) {
    const int nodes2 = required_nodes(b, 2);
    const int nodes4 = required_nodes(b, 4);
    for (double d : {jensen_defect(b, sq, 2, nodes2), jensen_defect(b, quartic, 4, nodes4)}) {
      out.min_convex_control_defect = std::min(out.min_convex_control_defect, d);
      if (d < -1e-10) ++out.convex_control_violations;
    }
  }

  for (int i = 0; i < forms; ++i) {
    const QuadForm q = random_quadform(m, n, form_rng);
    if (!quadform_lambda_scan(q, samples, seed + static_cast<std::uint64_t>(i)).accepted) continue;
    ++out.accepted;
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Mat>(q.coeff()).eigenvalues();
    if (eig.minCoeff() < 0.0) ++out.accepted_nonconvex;
    const double op = eig.cwiseAbs().maxCoeff();
    const ScalarFn g = [&](const Mat& x) { return q(x); };
    for (const auto& b : pool) {
      const double scale = op * oscillation_energy(b);
      const double d = jensen_defect(b, g, 2, required_nodes(b, 2));
      const double scaled = scale > 0 ? d / scale : d;
      out.min_scaled_defect = std::min(out.min_scaled_defect, scaled);
      if (d < -1e-8 * scale) ++out.violations;
    }
  }
  return out;
}

}  // namespace sqc
