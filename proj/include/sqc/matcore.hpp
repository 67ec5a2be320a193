#pragma once

// Matrix primitives and the three-generator subspace L used by the
// counterexample: its generators for every (n, m), the orthogonal projection
// onto L, the cubic f on L and the quartic extension F with its second
// directional derivative.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sqc/errors.hpp"

namespace sqc {

/// Dense real m x n matrix. All norms and inner products are Frobenius.
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

inline double frob_dot(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionError("frob_dot: shape mismatch");
  }
  return x.cwiseProduct(y).sum();
}

inline double frob_norm2(const Mat& x) { return x.squaredNorm(); }
inline double frob_norm(const Mat& x) { return x.norm(); }

inline bool all_finite(const Mat& x) { return x.allFinite(); }

/// Which of the first two coefficients fills the new diagonal slot at one
/// step of the dimension recursion.
enum class DiagSlot { alpha1, alpha2 };

/// Per-step choice of the diagonal entry a_jj, j = 4..n. Steps past the end
/// of `steps` use `fill`.
struct DiagRule {
  std::vector<DiagSlot> steps;
  DiagSlot fill = DiagSlot::alpha1;

  DiagSlot at(int j) const {
    const auto idx = static_cast<std::size_t>(j - 4);
    return idx < steps.size() ? steps[idx] : fill;
  }

  static DiagRule all(DiagSlot slot) { return DiagRule{{}, slot}; }

  /// Accepts "alpha1", "alpha2", or a digit pattern such as "121" where the
  /// i-th digit selects the slot for j = 4 + i.
  static DiagRule parse(std::string_view text) {
    if (text == "alpha1" || text.empty()) return all(DiagSlot::alpha1);
    if (text == "alpha2") return all(DiagSlot::alpha2);
    DiagRule rule;
    for (char c : text) {
      if (c == '1') {
        rule.steps.push_back(DiagSlot::alpha1);
      } else if (c == '2') {
        rule.steps.push_back(DiagSlot::alpha2);
      } else {
        throw PreconditionError("diag rule must be alpha1, alpha2 or a pattern of 1/2 digits, got '" +
                                std::string(text) + "'");
      }
    }
    if (!rule.steps.empty()) rule.fill = rule.steps.back();
    return rule;
  }

  std::string to_string() const {
    if (steps.empty()) return fill == DiagSlot::alpha1 ? "alpha1" : "alpha2";
    std::string out;
    for (auto s : steps) out.push_back(s == DiagSlot::alpha1 ? '1' : '2');
    return out;
  }
};

/// The generators V1, V2, V3 of L together with their Gram data.
///
/// Coordinates are always obtained from the 3x3 Gram solve; orthogonality of
/// the canonical generators is never assumed.
class SpanBasis {
 public:
  static constexpr double kMaxGramCondition = 1e12;

  SpanBasis(Mat v1, Mat v2, Mat v3) : v_{std::move(v1), std::move(v2), std::move(v3)} {
    m_ = static_cast<int>(v_[0].rows());
    n_ = static_cast<int>(v_[0].cols());
    for (const auto& v : v_) {
      if (v.rows() != m_ || v.cols() != n_) throw DimensionError("SpanBasis: generators differ in shape");
      if (!all_finite(v)) throw PreconditionError("SpanBasis: non-finite generator entry");
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) gram_(i, j) = frob_dot(v_[i], v_[j]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gram_);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxGramCondition) {
      throw DegenerateBasisError("SpanBasis: Gram matrix is numerically singular");
    }
    gram_inv_ = gram_.inverse();
    for (int i = 0; i < 3; ++i) {
      dual_[i] = gram_inv_(i, 0) * v_[0] + gram_inv_(i, 1) * v_[1] + gram_inv_(i, 2) * v_[2];
    }
  }

  int m() const { return m_; }
  int n() const { return n_; }
  const Mat& v(int i) const { return v_.at(static_cast<std::size_t>(i)); }
  const Mat& v1() const { return v_[0]; }
  const Mat& v2() const { return v_[1]; }
  const Mat& v3() const { return v_[2]; }
  const Eigen::Matrix3d& gram() const { return gram_; }

  /// Dual generators D_i with <V_j, D_i> = delta_ij and D_i in L, so that the
  /// i-th coordinate of PX is <X, D_i>.
  const Mat& dual(int i) const { return dual_.at(static_cast<std::size_t>(i)); }

  void require_shape(const Mat& x) const {
    if (x.rows() != m_ || x.cols() != n_) {
      throw DimensionError("matrix is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                           ", basis expects " + std::to_string(m_) + "x" + std::to_string(n_));
    }
  }

 private:
  std::array<Mat, 3> v_;
  int m_ = 0;
  int n_ = 0;
  Eigen::Matrix3d gram_;
  Eigen::Matrix3d gram_inv_;
  std::array<Mat, 3> dual_;
};

/// Coordinates (eta1, eta2, eta3) of a point of L in the generator basis.
struct CoordTriple {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;

  double operator[](int i) const { return i == 0 ? eta1 : (i == 1 ? eta2 : eta3); }
};

/// The pair (epsilon, k) of the quartic extension F.
struct ExtensionParams {
  double epsilon = 0.0;
  double k = 0.0;

  void validate() const {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw PreconditionError("epsilon must be finite and > 0");
    if (!std::isfinite(k) || k < 0.0) throw PreconditionError("k must be finite and >= 0");
  }
};

namespace detail {

inline Mat pad_rows(const Mat& x, int m) {
  Mat out = Mat::Zero(m, x.cols());
  out.topRows(x.rows()) = x;
  return out;
}

}  // namespace detail

/// The three 4x3 generators of the base construction.
inline SpanBasis build_base_4x3() {
  Mat v1 = Mat::Zero(4, 3);
  Mat v2 = Mat::Zero(4, 3);
  Mat v3 = Mat::Zero(4, 3);
  v1(0, 0) = 1;
  v1(1, 1) = 1;
  v2(0, 1) = 1;
  v2(2, 2) = 1;
  v3(2, 1) = 1;
  v3.row(3).setOnes();
  return SpanBasis(std::move(v1), std::move(v2), std::move(v3));
}

/// Generators for n columns and m >= n+1 rows.
///
/// M^(j)(alpha) is grown one column at a time from the 4x3 base: the previous
/// (j x (j-1)) block is copied, entry (j, j) gets the slot chosen by `rule`
/// and entry (j+1, j) gets alpha3. Rows beyond n+1 are zero.
inline SpanBasis build_base_n(int n, int m, const DiagRule& rule = {}) {
  if (n < 3) throw DimensionError("build_base_n: need n >= 3, got n = " + std::to_string(n));
  if (m < n + 1) {
    throw DimensionError("build_base_n: need m >= n + 1, got n = " + std::to_string(n) + ", m = " + std::to_string(m));
  }
  const SpanBasis base = build_base_4x3();
  std::array<Mat, 3> coeff{base.v1(), base.v2(), base.v3()};
  for (int j = 4; j <= n; ++j) {
    for (auto& c : coeff) {
      Mat grown = Mat::Zero(j + 1, j);
      grown.topLeftCorner(j, j - 1) = c;
      c = std::move(grown);
    }
    const int slot = rule.at(j) == DiagSlot::alpha1 ? 0 : 1;
    coeff[static_cast<std::size_t>(slot)](j - 1, j - 1) = 1;
    coeff[2](j, j - 1) = 1;
  }
  return SpanBasis(detail::pad_rows(coeff[0], m), detail::pad_rows(coeff[1], m), detail::pad_rows(coeff[2], m));
}

/// alpha1 V1 + alpha2 V2 + alpha3 V3.
inline Mat combo(const SpanBasis& basis, const Vec3& alpha) {
  return alpha(0) * basis.v1() + alpha(1) * basis.v2() + alpha(2) * basis.v3();
}

inline Mat combo(const SpanBasis& basis, const CoordTriple& eta) {
  return combo(basis, Vec3(eta.eta1, eta.eta2, eta.eta3));
}

/// Coordinates of PX: solves gram * eta = (<X,V1>, <X,V2>, <X,V3>).
inline CoordTriple coords(const SpanBasis& basis, const Mat& x) {
  basis.require_shape(x);
  return {frob_dot(x, basis.dual(0)), frob_dot(x, basis.dual(1)), frob_dot(x, basis.dual(2))};
}

/// Orthogonal projection onto L.
inline Mat project(const SpanBasis& basis, const Mat& x) { return combo(basis, coords(basis, x)); }

/// The cubic on L in generator coordinates.
inline double f_L(const CoordTriple& eta) { return -eta.eta1 * eta.eta2 * eta.eta3; }

/// F(X) = f(PX) + eps |X|^2 + eps |X|^4 + k |X - PX|^2.
inline double F_ext(const SpanBasis& basis, const ExtensionParams& params, const Mat& x) {
  const CoordTriple eta = coords(basis, x);
  const double n2 = frob_norm2(x);
  const double off = frob_norm2(x - combo(basis, eta));
  return f_L(eta) + params.epsilon * n2 + params.epsilon * n2 * n2 + params.k * off;
}

/// Second derivative of t -> F(A + tY) at t = 0.
inline double hess_form_F(const SpanBasis& basis, const ExtensionParams& params, const Mat& a, const Mat& y) {
  const CoordTriple ea = coords(basis, a);
  const CoordTriple ey = coords(basis, y);
  const double cubic = -2.0 * (ea.eta1 * ey.eta2 * ey.eta3 + ea.eta2 * ey.eta1 * ey.eta3 + ea.eta3 * ey.eta1 * ey.eta2);
  const double a2 = frob_norm2(a);
  const double y2 = frob_norm2(y);
  const double ay = frob_dot(a, y);
  const double off = frob_norm2(y - combo(basis, ey));
  return cubic + 2.0 * params.epsilon * y2 + params.epsilon * (4.0 * a2 * y2 + 8.0 * ay * ay) + 2.0 * params.k * off;
}

}  // namespace sqc
