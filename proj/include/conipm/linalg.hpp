#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "conipm/errors.hpp"

namespace conipm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace detail {

// Compensated (double-double) accumulation. The solver measures Newton
// decrements down to 1e-12 on Hessians with condition numbers past 1e10;
// plain double dot products and refinement residuals hit their cancellation
// floor well above that.
struct TwoFold {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    const double t = hi + x;
    const double bb = t - hi;
    lo += (hi - (t - bb)) + (x - bb);
    hi = t;
  }
  void add_product(double a, double b) {
    const double p = a * b;
    add(p);
    lo += std::fma(a, b, -p);
  }
  double value() const { return hi + lo; }
};

inline double compensated_dot(const Vector& a, const Vector& b) {
  TwoFold acc;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc.add_product(a(i), b(i));
  return acc.value();
}

// r = y - M x accumulated in compensated arithmetic, one row at a time.
inline Vector compensated_residual(const Vector& y, const Matrix& M, const Vector& x) {
  Vector r(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    TwoFold acc;
    acc.add(y(i));
    for (Eigen::Index j = 0; j < x.size(); ++j) acc.add_product(-M(i, j), x(j));
    r(i) = acc.value();
  }
  return r;
}

// <x, M x> accumulated in compensated arithmetic.
inline double compensated_quadratic_form(const Matrix& M, const Vector& x) {
  TwoFold acc;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = 0; j < x.size(); ++j) acc.add_product(M(i, j) * x(j), x(i));
  }
  return acc.value();
}

}  // namespace detail

// Lower-triangular Cholesky factor of a symmetric matrix, or nullopt if a
// pivot is non-positive. Plain unblocked algorithm; the strict pivot test
// makes this usable as a positive-definiteness predicate in bisections.
inline std::optional<Matrix> cholesky(const Matrix& M) {
  const Eigen::Index n = M.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = M(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      L(i, j) = (M(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
    }
  }
  return L;
}

// Numerical row rank by column-pivoted QR of M^T, relative threshold on the
// leading R diagonal.
inline int row_rank(const Matrix& M, double tol = 1e-10) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(M.transpose());
  const Vector diag = qr.matrixR().diagonal().cwiseAbs();
  if (diag.size() == 0 || diag(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag(i) > tol * diag(0)) ++rank;
  }
  return rank;
}

struct KktSystem {
  Matrix H;           // symmetric positive definite (or PD on null(G))
  Matrix G;           // equality constraint rows; may have 0 rows
  Vector rhs_primal;
  Vector rhs_dual;
};

struct KktSolution {
  Vector h;
  Vector mult;
};

// Factorization of the saddle-point system
//   [ H  G^T ] [h   ]   [rhs_primal]
//   [ G  0   ] [mult] = [rhs_dual  ]
// by block elimination through the Cholesky factor of H. If H fails to
// factor (iterate at or through the cone boundary in floating point), a
// ridge 1e-12*trace(H)/dim is added and the factorization retried once.
class KktFactorization {
 public:
  KktFactorization(const Matrix& H, const Matrix& G) : H_(H), G_(G) {
    auto L = cholesky(H_);
    if (!L) {
      const double ridge = 1e-12 * H_.trace() / static_cast<double>(H_.rows());
      H_.diagonal().array() += ridge;
      ridge_used_ = true;
      L = cholesky(H_);
      if (!L) throw SingularSystemError("Hessian not positive definite after ridge retry");
    }
    llt_ = *L;
    if (G_.rows() > 0) {
      hinv_gt_ = solve_h(G_.transpose());
      Matrix schur = G_ * hinv_gt_;           // SPD for full-row-rank G
      auto Ls = cholesky(schur);
      if (!Ls) throw SingularSystemError("KKT Schur complement not positive definite");
      schur_llt_ = *Ls;
    }
  }

  bool ridge_used() const { return ridge_used_; }
  const Matrix& hessian() const { return H_; }

  // Iterative refinement with compensated residuals keeps both KKT residuals
  // near machine level, which the recovery step and the terminal Newton
  // decrement measurements depend on.
  KktSolution solve(const Vector& rhs_primal, const Vector& rhs_dual) const {
    KktSolution sol = solve_once(rhs_primal, rhs_dual);
    for (int round = 0; round < 2; ++round) {
      Vector r1(sol.h.size());
      for (Eigen::Index i = 0; i < sol.h.size(); ++i) {
        detail::TwoFold acc;
        acc.add(rhs_primal(i));
        for (Eigen::Index j = 0; j < sol.h.size(); ++j) acc.add_product(-H_(i, j), sol.h(j));
        for (Eigen::Index j = 0; j < G_.rows(); ++j) acc.add_product(-G_(j, i), sol.mult(j));
        r1(i) = acc.value();
      }
      Vector r2;
      if (G_.rows() > 0) {
        r2.resize(G_.rows());
        for (Eigen::Index i = 0; i < G_.rows(); ++i) {
          detail::TwoFold acc;
          acc.add(rhs_dual.size() > 0 ? rhs_dual(i) : 0.0);
          for (Eigen::Index j = 0; j < sol.h.size(); ++j) acc.add_product(-G_(i, j), sol.h(j));
          r2(i) = acc.value();
        }
      }
      const KktSolution corr = solve_once(r1, r2);
      sol.h += corr.h;
      sol.mult += corr.mult;
    }
    return sol;
  }

 private:
  Matrix solve_h(const Matrix& B) const {
    Matrix y = llt_.triangularView<Eigen::Lower>().solve(B);
    return llt_.transpose().triangularView<Eigen::Upper>().solve(y);
  }
  Vector solve_schur(const Vector& r) const {
    Vector y = schur_llt_.triangularView<Eigen::Lower>().solve(r);
    return schur_llt_.transpose().triangularView<Eigen::Upper>().solve(y);
  }

  KktSolution solve_once(const Vector& rhs_primal, const Vector& rhs_dual) const {
    KktSolution sol;
    const Vector w = solve_h(rhs_primal);
    if (G_.rows() == 0) {
      sol.h = w;
      sol.mult = Vector();
      return sol;
    }
    Vector rd = rhs_dual.size() > 0 ? rhs_dual : Vector::Zero(G_.rows());
    sol.mult = solve_schur(G_ * w - rd);
    sol.h = w - hinv_gt_ * sol.mult;
    return sol;
  }

  Matrix H_;
  Matrix G_;
  Matrix llt_;
  Matrix hinv_gt_;
  Matrix schur_llt_;
  bool ridge_used_ = false;
};

inline KktSolution solve_kkt(const KktSystem& sys) {
  KktFactorization fact(sys.H, sys.G);
  return fact.solve(sys.rhs_primal, sys.rhs_dual);
}

}  // namespace conipm
