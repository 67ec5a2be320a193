#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace sqc::detail {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct LocalResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Independent, deterministic substream for lane `lane` of a run seeded with
/// `seed`.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

/// Nelder-Mead simplex search. Infinite objective values act as a barrier.
inline LocalResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, double step, int max_iter = 400,
                               double xtol = 1e-13) {
  const auto d = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
  std::vector<double> val(static_cast<std::size_t>(d + 1));
  for (Eigen::Index i = 0; i < d; ++i) pts[static_cast<std::size_t>(i + 1)](i) += step;
  for (std::size_t i = 0; i < pts.size(); ++i) val[i] = f(pts[i]);

  std::vector<std::size_t> order(pts.size());
  int it = 0;
  for (; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[order.size() - 2];

    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p - pts[best]).cwiseAbs().maxCoeff());
    if (spread < xtol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr < val[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const Eigen::VectorXd xc = centroid + 0.5 * (pts[worst] - centroid);
    const double fc = f(xc);
    if (fc < val[worst]) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      val[i] = f(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  return {pts[best], val[best], it};
}

inline Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    const double hi = h * std::max(1.0, std::abs(xi));
    probe(i) = xi + hi;
    const double fp = f(probe);
    probe(i) = xi - hi;
    const double fm = f(probe);
    probe(i) = xi;
    g(i) = (fp - fm) / (2.0 * hi);
  }
  return g;
}

/// BFGS with central-difference gradients and Armijo backtracking.
inline LocalResult bfgs(const Objective& f, const Eigen::VectorXd& x0, int max_iter = 200, double gtol = 1e-10) {
  const auto d = x0.size();
  Eigen::VectorXd x = x0;
  double fx = f(x);
  Eigen::VectorXd g = central_gradient(f, x, 1e-6);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(d, d);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (!std::isfinite(fx) || g.cwiseAbs().maxCoeff() < gtol) break;
    Eigen::VectorXd p = -h_inv * g;
    double slope = g.dot(p);
    if (slope >= 0.0) {
      h_inv.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    Eigen::VectorXd xn;
    double fn = fx;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + t * p;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    const Eigen::VectorXd gn = central_gradient(f, xn, 1e-6);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-14 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
      h_inv = (id - rho * s * yv.transpose()) * h_inv * (id - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    const double drop = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (drop <= 1e-15 * (1.0 + std::abs(fx))) break;
  }
  return {x, fx, it};
}

/// Sum with Neumaier compensation; the result does not depend on how the
/// terms were produced, only on their order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sqc::detail
