#pragma once

// Periodic trigonometric matrix fields on the unit torus, stored as finite
// Fourier data, with exact divergence and mean checks and equispaced
// quadrature that is exact for the composed trigonometric polynomials.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sqc/convexity.hpp"
#include "sqc/detail/optimize.hpp"
#include "sqc/matcore.hpp"

namespace sqc {

using Frequency = std::vector<int>;

/// One term C cos(2 pi k.x) + S sin(2 pi k.x).
struct Mode {
  Frequency freq;
  Mat cos_coeff;
  Mat sin_coeff;
};

class TrigMatField {
 public:
  TrigMatField(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1) throw DimensionError("TrigMatField: m and n must be positive");
  }

  int m() const { return m_; }
  int n() const { return n_; }
  const std::vector<Mode>& modes() const { return modes_; }

  /// Adds a mode, folding -k onto k (cos is even, sin is odd) and merging
  /// with an existing mode of the same canonical frequency.
  TrigMatField& add_mode(Frequency freq, const Mat& cos_coeff, const Mat& sin_coeff) {
    if (static_cast<int>(freq.size()) != n_) throw DimensionError("add_mode: frequency length must equal n");
    require_shape(cos_coeff);
    require_shape(sin_coeff);
    Mat s = sin_coeff;
    const auto first = std::find_if(freq.begin(), freq.end(), [](int v) { return v != 0; });
    if (first == freq.end()) {
      s.setZero();
    } else if (*first < 0) {
      for (auto& v : freq) v = -v;
      s = -s;
    }
    for (auto& mode : modes_) {
      if (mode.freq == freq) {
        mode.cos_coeff += cos_coeff;
        mode.sin_coeff += s;
        return *this;
      }
    }
    modes_.push_back({std::move(freq), cos_coeff, std::move(s)});
    return *this;
  }

  TrigMatField& add_cos(Frequency freq, const Mat& c) { return add_mode(std::move(freq), c, Mat::Zero(m_, n_)); }

  TrigMatField& add_constant(const Mat& c) { return add_cos(Frequency(static_cast<std::size_t>(n_), 0), c); }

  friend TrigMatField operator+(TrigMatField lhs, const TrigMatField& rhs) {
    if (lhs.m_ != rhs.m_ || lhs.n_ != rhs.n_) throw DimensionError("TrigMatField: shape mismatch in +");
    for (const auto& mode : rhs.modes_) lhs.add_mode(mode.freq, mode.cos_coeff, mode.sin_coeff);
    return lhs;
  }

  Mat evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) throw DimensionError("evaluate: point must have n coordinates");
    Mat out = Mat::Zero(m_, n_);
    for (const auto& mode : modes_) {
      double phase = 0.0;
      for (int i = 0; i < n_; ++i) phase += mode.freq[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      phase *= 2.0 * std::numbers::pi;
      out += std::cos(phase) * mode.cos_coeff + std::sin(phase) * mode.sin_coeff;
    }
    return out;
  }

  /// Axes on which some mode has a nonzero frequency component.
  std::vector<int> active_axes() const {
    std::vector<int> axes;
    for (int i = 0; i < n_; ++i) {
      for (const auto& mode : modes_) {
        if (mode.freq[static_cast<std::size_t>(i)] != 0) {
          axes.push_back(i);
          break;
        }
      }
    }
    return axes;
  }

  /// max over modes and axes of |k_i|.
  int max_axis_frequency() const {
    int out = 0;
    for (const auto& mode : modes_) {
      for (int v : mode.freq) out = std::max(out, std::abs(v));
    }
    return out;
  }

 private:
  void require_shape(const Mat& c) const {
    if (c.rows() != m_ || c.cols() != n_) throw DimensionError("TrigMatField: coefficient shape mismatch");
  }

  int m_;
  int n_;
  std::vector<Mode> modes_;
};

/// cos(2 pi x3) V1 + cos(2 pi x1) V2 + cos(2 pi (x1 - x3)) V3 for any basis
/// of the family; only axes 1 and 3 are active.
inline TrigMatField build_Bn(const SpanBasis& basis) {
  const auto n = static_cast<std::size_t>(basis.n());
  TrigMatField b(basis.m(), basis.n());
  Frequency k1(n, 0), k2(n, 0), k3(n, 0);
  k1[2] = 1;
  k2[0] = 1;
  k3[0] = 1;
  k3[2] = -1;
  b.add_cos(k1, basis.v1());
  b.add_cos(k2, basis.v2());
  b.add_cos(k3, basis.v3());
  return b;
}

/// The 4 x 3 counterexample field.
inline TrigMatField build_B3() { return build_Bn(build_base_4x3()); }

/// Div B = 0 iff each coefficient matrix annihilates its own frequency.
inline bool check_div_free(const TrigMatField& b) {
  for (const auto& mode : b.modes()) {
    Eigen::VectorXd k(b.n());
    for (int i = 0; i < b.n(); ++i) k(i) = mode.freq[static_cast<std::size_t>(i)];
    for (const Mat* c : {&mode.cos_coeff, &mode.sin_coeff}) {
      const Eigen::VectorXd ck = (*c) * k;
      if (ck.size() > 0 && ck.cwiseAbs().maxCoeff() > 1e-12 * c->norm()) return false;
    }
  }
  return true;
}

/// Integral of the field over the torus: its zero-frequency coefficient.
inline Mat mean(const TrigMatField& b) {
  Mat out = Mat::Zero(b.m(), b.n());
  for (const auto& mode : b.modes()) {
    if (std::all_of(mode.freq.begin(), mode.freq.end(), [](int v) { return v == 0; })) out += mode.cos_coeff;
  }
  return out;
}

/// Smallest nodes-per-axis for which the equispaced rule is trusted for an
/// integrand of entrywise degree `degree_bound`.
inline int required_nodes(const TrigMatField& b, int degree_bound) {
  return 2 * degree_bound * b.max_axis_frequency() + 1;
}

enum class Exactness { require, allow_inexact };

/// Tensor-product equispaced quadrature of g(B(x)) over the active axes.
///
/// Exact for trigonometric polynomials when nodes_per_axis exceeds the
/// integrand's per-axis frequency; the bound enforced here is
/// 2 * degree_bound * max|k_i| + 1.
inline double integrate_composed(const TrigMatField& b, const ScalarFn& g, int degree_bound, int nodes_per_axis,
                                 Exactness policy = Exactness::require) {
  if (degree_bound < 0) throw PreconditionError("integrate_composed: degree_bound must be >= 0");
  if (nodes_per_axis < 1) throw PreconditionError("integrate_composed: nodes_per_axis must be >= 1");
  const int need = required_nodes(b, degree_bound);
  if (policy == Exactness::require && nodes_per_axis < need) {
    throw ExactnessError("integrate_composed: " + std::to_string(nodes_per_axis) + " nodes per axis, need " +
                         std::to_string(need) + " for degree " + std::to_string(degree_bound));
  }
  const std::vector<int> axes = b.active_axes();
  const auto d = axes.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= static_cast<std::size_t>(nodes_per_axis);

  std::vector<double> x(static_cast<std::size_t>(b.n()), 0.0);
  detail::CompensatedSum sum;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t a = 0; a < d; ++a) {
      const auto j = rest % static_cast<std::size_t>(nodes_per_axis);
      rest /= static_cast<std::size_t>(nodes_per_axis);
      x[static_cast<std::size_t>(axes[a])] = static_cast<double>(j) / nodes_per_axis;
    }
    sum.add(g(b.evaluate(x)));
  }
  return sum.value() / static_cast<double>(total);
}

/// I0 = int f(PB), I2 = int |B|^2, I4 = int |B|^4.
struct Moments {
  double i0 = 0.0;
  double i2 = 0.0;
  double i4 = 0.0;
};

inline Moments moments(const TrigMatField& b, const SpanBasis& basis, int nodes_per_axis) {
  Moments out;
  out.i0 = integrate_composed(b, [&](const Mat& x) { return f_L(coords(basis, x)); }, 3, nodes_per_axis);
  out.i2 = integrate_composed(b, [](const Mat& x) { return x.squaredNorm(); }, 2, nodes_per_axis);
  out.i4 = integrate_composed(b, [](const Mat& x) { return std::pow(x.squaredNorm(), 2); }, 4, nodes_per_axis);
  return out;
}

/// epsilon = safety * (-I0) / (I2 + I4), so that
/// int f(B) + eps |B|^2 + eps |B|^4 = (1 - safety) I0 < 0.
inline double choose_epsilon(const Moments& mom, double safety = 0.5) {
  if (!(safety > 0.0) || !(safety < 1.0)) throw PreconditionError("choose_epsilon: safety must lie in (0, 1)");
  if (!(mom.i0 < 0.0)) throw NotACounterexampleError("choose_epsilon: int f(PB) is not negative");
  return safety * (-mom.i0) / (mom.i2 + mom.i4);
}

inline double choose_epsilon(const TrigMatField& b, const SpanBasis& basis, double safety = 0.5,
                             int nodes_per_axis = 16) {
  if (!(safety > 0.0) || !(safety < 1.0)) throw PreconditionError("choose_epsilon: safety must lie in (0, 1)");
  return choose_epsilon(moments(b, basis, nodes_per_axis), safety);
}

/// Both sides of the solenoidal Jensen inequality for one field.
struct DefectReport {
  double integral_F_of_B = 0.0;
  double F_at_mean = 0.0;
  double defect = 0.0;
  double epsilon = 0.0;
  double k = 0.0;
  int nodes_per_axis = 0;
  std::vector<int> active_axes;
};

/// int g(B) - g(int B) for a polynomial g of the declared degree.
inline double jensen_defect(const TrigMatField& b, const ScalarFn& g, int degree_bound, int nodes_per_axis) {
  return integrate_composed(b, g, degree_bound, nodes_per_axis) - g(mean(b));
}

inline DefectReport sq_defect(const SpanBasis& basis, const ExtensionParams& params, const TrigMatField& b,
                              int nodes_per_axis = 16) {
  params.validate();
  if (b.m() != basis.m() || b.n() != basis.n()) throw DimensionError("sq_defect: field and basis differ in shape");
  const ScalarFn f = [&](const Mat& x) { return F_ext(basis, params, x); };
  DefectReport out;
  out.integral_F_of_B = integrate_composed(b, f, 4, nodes_per_axis);
  out.F_at_mean = f(mean(b));
  out.defect = out.integral_F_of_B - out.F_at_mean;
  out.epsilon = params.epsilon;
  out.k = params.k;
  out.nodes_per_axis = nodes_per_axis;
  out.active_axes = b.active_axes();
  return out;
}

/// Random divergence-free field: each row of every coefficient is projected
/// onto the hyperplane orthogonal to the mode's frequency.
template <class Rng>
TrigMatField random_solenoidal(int m, int n, int max_freq, int num_modes, Rng& rng, bool with_mean = false) {
  if (max_freq < 1) throw PreconditionError("random_solenoidal: max_freq must be >= 1");
  std::uniform_int_distribution<int> freq(-max_freq, max_freq);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&] {
    Mat c(m, n);
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = normal(rng);
    return c;
  };
  TrigMatField b(m, n);
  if (with_mean) b.add_constant(gaussian());
  for (int t = 0; t < num_modes; ++t) {
    Frequency k(static_cast<std::size_t>(n));
    do {
      for (auto& v : k) v = freq(rng);
    } while (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; }));
    Eigen::VectorXd kv(n);
    for (int i = 0; i < n; ++i) kv(i) = k[static_cast<std::size_t>(i)];
    const Mat proj = Mat::Identity(n, n) - kv * kv.transpose() / kv.squaredNorm();
    b.add_mode(k, gaussian() * proj, gaussian() * proj);
  }
  return b;
}

}  // namespace sqc
