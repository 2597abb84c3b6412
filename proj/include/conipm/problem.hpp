#pragma once

#include <utility>

#include "conipm/barrier.hpp"
#include "conipm/cone.hpp"
#include "conipm/errors.hpp"
#include "conipm/linalg.hpp"

namespace conipm {

// Data of the primal-dual pair
//   min { <c,x> : A x = b, x in K }  =  max { <b,y> : s + A^T y = c, s in K* }.
struct ConicProblem {
  Matrix A;
  Vector b;
  Vector c;
  ConeSpec cone;
};

struct PrimalDualTriple {
  Vector x;
  Vector s;
  Vector y;
};

// Element of the alternative set: a nonzero (x, y, tau) with tau <= 0,
// tau*c - A^T y in K*, x in K, A x = tau*b, -<c,x> + <b,y> - eps*tau >= 0.
// Its existence certifies that no strictly feasible pair with gap eps exists.
struct AlternativeCertificate {
  Vector x_hat;
  Vector y_hat;
  double tau_hat = 0.0;
};

struct Residuals {
  double primal = 0.0;  // ||A x - b||
  double dual = 0.0;    // ||s + A^T y - c||
  double gap = 0.0;     // <c,x> - <b,y>
};

// Problem whose standing assumptions have been checked: A full row rank and
// c not in Im(A^T). Construction is only through validate().
class ValidatedProblem {
 public:
  const ConicProblem& data() const { return problem_; }
  const BarrierOracle& barrier() const { return barrier_; }
  int n() const { return static_cast<int>(problem_.A.cols()); }
  int m() const { return static_cast<int>(problem_.A.rows()); }

  friend ValidatedProblem validate(ConicProblem problem);

 private:
  ValidatedProblem(ConicProblem problem, BarrierOracle barrier)
      : problem_(std::move(problem)), barrier_(std::move(barrier)) {}

  ConicProblem problem_;
  BarrierOracle barrier_;
};

inline ValidatedProblem validate(ConicProblem problem) {
  const auto m = problem.A.rows();
  const auto n = problem.A.cols();
  problem.cone.check_valid();
  if (problem.cone.dim() != n || problem.b.size() != m || problem.c.size() != n || m < 1 ||
      n < 1) {
    throw ValidationError(ValidationIssue::DimensionMismatch,
                          "problem dimensions are inconsistent");
  }
  if (!problem.A.allFinite() || !problem.b.allFinite() || !problem.c.allFinite()) {
    throw ValidationError(ValidationIssue::DimensionMismatch, "problem data must be finite");
  }
  if (row_rank(problem.A) != m) {
    throw ValidationError(ValidationIssue::RankDeficient, "A does not have full row rank");
  }
  // Distance from c to Im(A^T) via least squares; the auxiliary problem's
  // Hessian loses definiteness in the tau direction when c = A^T y.
  const Vector y_ls = problem.A.transpose()
                          .colPivHouseholderQr()
                          .solve(problem.c);
  const double dist = (problem.A.transpose() * y_ls - problem.c).norm();
  if (dist <= 1e-10 * problem.c.norm()) {
    throw ValidationError(ValidationIssue::CInRangeOfAT, "c lies in the range of A^T");
  }
  BarrierOracle barrier(problem.cone);
  return ValidatedProblem(std::move(problem), std::move(barrier));
}

inline Residuals residuals(const ConicProblem& problem, const PrimalDualTriple& t) {
  Residuals r;
  r.primal = (problem.A * t.x - problem.b).norm();
  r.dual = (t.s + problem.A.transpose() * t.y - problem.c).norm();
  r.gap = problem.c.dot(t.x) - problem.b.dot(t.y);
  return r;
}

// Strictly feasible pair with duality gap eps, all at tolerance tol.
inline bool check_eps_optimal(const ValidatedProblem& vp, const PrimalDualTriple& t, double eps,
                              double tol) {
  const auto& barrier = vp.barrier();
  if (!barrier.is_interior(t.x) || !barrier.is_dual_interior(t.s)) return false;
  const Residuals r = residuals(vp.data(), t);
  return r.primal <= tol * (1.0 + vp.data().b.norm()) &&
         r.dual <= tol * (1.0 + vp.data().c.norm()) && std::abs(r.gap - eps) <= tol * (1.0 + eps);
}

// Validates a candidate element of the alternative set. The certificate set
// is a cone, so the triple is normalized by its max norm before testing;
// anything below 1e-8 after normalization counts as the trivial element.
inline bool check_certificate(const ValidatedProblem& vp, const AlternativeCertificate& cert,
                              double eps) {
  const auto& p = vp.data();
  const auto& barrier = vp.barrier();
  if (cert.x_hat.size() != vp.n() || cert.y_hat.size() != vp.m()) return false;
  double scale = std::max({cert.x_hat.lpNorm<Eigen::Infinity>(),
                           cert.y_hat.lpNorm<Eigen::Infinity>(), std::abs(cert.tau_hat)});
  if (!(scale > 1e-8) || !std::isfinite(scale)) return false;
  const Vector x_hat = cert.x_hat / scale;
  const Vector y_hat = cert.y_hat / scale;
  const double tau_hat = cert.tau_hat / scale;

  if (tau_hat > 1e-10) return false;
  const Vector dual_dir = tau_hat * p.c - p.A.transpose() * y_hat;
  const double slack_d = 1e-8 * (1.0 + dual_dir.lpNorm<Eigen::Infinity>());
  const double slack_p = 1e-8 * (1.0 + x_hat.lpNorm<Eigen::Infinity>());
  if (!barrier.in_dual_cone(dual_dir, slack_d)) return false;
  if (!barrier.in_cone(x_hat, slack_p)) return false;
  if ((p.A * x_hat - tau_hat * p.b).lpNorm<Eigen::Infinity>() > 1e-8) return false;
  const double sep = -p.c.dot(x_hat) + p.b.dot(y_hat) - eps * tau_hat;
  return sep >= -1e-10;
}

}  // namespace conipm
