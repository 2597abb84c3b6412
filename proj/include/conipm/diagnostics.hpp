#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "conipm/auxiliary.hpp"
#include "conipm/problem.hpp"

namespace conipm {

// Ordering constant of the Hessian lower bound: 2 for a single self-scaled
// block, conservative 4 for products of blocks.
inline double cone_ordering_constant(const ConeSpec& cone) {
  return cone.blocks.size() == 1 ? 2.0 : 4.0;
}

// Random strictly interior point with a comfortable boundary margin.
inline Vector random_interior_point(const ConeSpec& cone, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.2, 1.2);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x = Vector::Zero(cone.dim());
  int off = 0;
  for (const auto& b : cone.blocks) {
    if (b.type == BlockType::Orthant) {
      for (int i = 0; i < b.dim; ++i) x(off + i) = std::exp(unif(rng));
    } else {
      const double head = std::exp(unif(rng));
      Vector dir(b.dim - 1);
      for (int i = 0; i < b.dim - 1; ++i) dir(i) = normal(rng);
      const double dn = dir.norm();
      std::uniform_real_distribution<double> radius(0.0, 0.9);
      x(off) = head;
      if (dn > 0.0) x.segment(off + 1, b.dim - 1) = (radius(rng) * head / dn) * dir;
    }
    off += b.dim;
  }
  return x;
}

// Point of the primal-dual central path at parameter t:
//   x(t) = argmin { t<c,x> + F(x) : A x = b },
//   s(t) = -(1/t) grad F(x(t)),   y(t) from the equality multipliers,
// computed by feasible-start damped Newton to decrement 1e-12.
struct CentralPathPoint {
  double t = 0.0;
  Vector x;
  Vector s;
  Vector y;
};

class NotStrictlyFeasibleError : public std::runtime_error {
 public:
  explicit NotStrictlyFeasibleError(const std::string& what) : std::runtime_error(what) {}
};

inline CentralPathPoint central_path_point(const ValidatedProblem& vp, double t,
                                           const Vector& feasible_start, double tol = 1e-12,
                                           int max_iters = 5000) {
  const auto& p = vp.data();
  const auto& barrier = vp.barrier();
  if (!(t > 0.0)) throw std::invalid_argument("central path parameter t must be positive");
  if (!barrier.is_interior(feasible_start) ||
      (p.A * feasible_start - p.b).norm() > 1e-8 * (1.0 + p.b.norm())) {
    throw NotStrictlyFeasibleError("central path start must be strictly feasible");
  }
  Vector x = feasible_start;
  Vector mult;
  for (int k = 0; k <= max_iters; ++k) {
    const Vector grad_psi = t * p.c + barrier.grad(x);
    KktFactorization fact(barrier.hess(x), p.A);
    KktSolution sol = fact.solve(-grad_psi, Vector::Zero(vp.m()));
    mult = sol.mult;
    const double lam = std::sqrt(std::max(0.0, -grad_psi.dot(sol.h)));
    if (lam <= tol) break;
    if (k == max_iters) throw SingularSystemError("central path centering did not converge");
    double f = 1.0 / (1.0 + lam);
    for (int j = 0; j <= 30 && !barrier.is_interior(x + f * sol.h); ++j) f *= 0.5;
    x += f * sol.h;
  }
  CentralPathPoint cp;
  cp.t = t;
  cp.x = x;
  cp.s = -barrier.grad(x) / t;
  // At stationarity A^T mult = -(t c + grad F), so s + A^T(-mult/t) = c.
  cp.y = -mult / t;
  return cp;
}

// Worst relative violation of the central-path relations
//   s(t) = -(1/t) grad F(x(t)),
//   <s,x> = <c,x> - <b,y> = nu / t,
//   F(x(t)) + F*(s(t)) = -nu + nu ln t.
inline double central_path_violation(const ValidatedProblem& vp, const CentralPathPoint& cp) {
  const auto& barrier = vp.barrier();
  const double nu = barrier.nu();
  const Vector s_expect = -barrier.grad(cp.x) / cp.t;
  double v = (cp.s - s_expect).norm() / (1.0 + s_expect.norm());
  const double gap_expect = nu / cp.t;
  v = std::max(v, std::abs(cp.s.dot(cp.x) - gap_expect) / (1.0 + gap_expect));
  const double gap_cb = vp.data().c.dot(cp.x) - vp.data().b.dot(cp.y);
  v = std::max(v, std::abs(gap_cb - gap_expect) / (1.0 + gap_expect));
  const double val = barrier.value(cp.x) + barrier.dual_value(cp.s);
  const double val_expect = -nu + nu * std::log(cp.t);
  v = std::max(v, std::abs(val - val_expect) / (1.0 + std::abs(val_expect)));
  return v;
}

namespace detail {

inline double ordering_slack(const Vector& a, const Vector& b) {
  return 1e-10 * (1.0 + std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()));
}

}  // namespace detail

// Minimal sigma >= 1 with (1/sigma) x_ref <=_K x1 <=_K sigma x_ref and the
// dual pair of orderings, by bisection on cone membership of differences.
inline double measure_sigma(const BarrierOracle& barrier, const Vector& x_ref,
                            const Vector& s_ref, const Vector& x1, const Vector& s1) {
  auto ordered = [&](double sigma) {
    return barrier.in_cone(sigma * x_ref - x1, detail::ordering_slack(x_ref, x1)) &&
           barrier.in_cone(x1 - x_ref / sigma, detail::ordering_slack(x_ref, x1)) &&
           barrier.in_dual_cone(sigma * s_ref - s1, detail::ordering_slack(s_ref, s1)) &&
           barrier.in_dual_cone(s1 - s_ref / sigma, detail::ordering_slack(s_ref, s1));
  };
  if (ordered(1.0)) return 1.0;
  double hi = 2.0;
  while (!ordered(hi)) {
    hi *= 2.0;
    if (hi > 1e16) return hi;
  }
  double lo = std::max(1.0, hi / 2.0);
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ordered(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Closed form for pure orthant cones: the largest componentwise ratio.
inline double measure_sigma_orthant(const Vector& x_ref, const Vector& s_ref, const Vector& x1,
                                    const Vector& s1) {
  double sigma = 1.0;
  for (Eigen::Index i = 0; i < x_ref.size(); ++i) {
    sigma = std::max({sigma, x_ref(i) / x1(i), x1(i) / x_ref(i)});
  }
  for (Eigen::Index i = 0; i < s_ref.size(); ++i) {
    sigma = std::max({sigma, s_ref(i) / s1(i), s1(i) / s_ref(i)});
  }
  return sigma;
}

// Centrality measure mu = max { lambda : hess F(x_tilde) >= lambda hess F(x_ref) }
// by bisection on the Cholesky-success predicate.
inline double measure_mu(const BarrierOracle& barrier, const Vector& x_tilde,
                         const Vector& x_ref) {
  const Matrix Ht = barrier.hess(x_tilde);
  const Matrix Hr = barrier.hess(x_ref);
  auto psd = [&](double lam) { return cholesky(Ht - lam * Hr).has_value(); };
  double lo = 0.0;
  double hi = 1.0;
  while (psd(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return lo;
  }
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (psd(mid) ? lo : hi) = mid;
  }
  return lo;
}

// The dual counterpart hess F*(s_tilde) >= mu hess F*(s_ref), which the
// reference rule implies for the measured mu.
inline bool mu_dual_holds(const BarrierOracle& barrier, const Vector& s_tilde,
                          const Vector& s_ref, double mu) {
  Matrix M = barrier.dual_hess(s_tilde) - mu * barrier.dual_hess(s_ref);
  const double slack = 1e-10 * (1.0 + std::abs(M.trace()));
  M.diagonal().array() += slack;
  return cholesky(M).has_value();
}

namespace detail {

inline bool psd_within(const Matrix& M, double rel_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -rel_tol * (1.0 + std::abs(M.trace()));
}

// Orthonormal basis of the null space of G.
inline Matrix null_space_basis(const Matrix& G) {
  if (G.rows() == 0) return Matrix::Identity(G.cols(), G.cols());
  Eigen::FullPivHouseholderQR<Matrix> qr(G.transpose());
  const Matrix Q = qr.matrixQ();
  return Q.rightCols(G.cols() - qr.rank());
}

}  // namespace detail

// Universal Hessian lower bound
//   hess F(x) >= hess F(x_ref) / (c(K) <-grad F(x_ref), x>^2)
// on random pairs, plus the local-norm bound ||x||_{x_ref} <= nu on points of
// the set { x interior : <grad F(x_ref), x - x_ref> >= 0 }.
struct HessianBoundReport {
  int pairs_checked = 0;
  int pair_violations = 0;
  int simplex_checked = 0;
  int simplex_violations = 0;
  double c_cone = 0.0;
};

inline HessianBoundReport check_hessian_bounds(const BarrierOracle& barrier, int samples,
                                               unsigned seed) {
  HessianBoundReport rep;
  rep.c_cone = cone_ordering_constant(barrier.cone());
  const double nu = barrier.nu();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  for (int i = 0; i < samples; ++i) {
    const Vector x = random_interior_point(barrier.cone(), rng);
    const Vector x_ref = random_interior_point(barrier.cone(), rng);
    const double q = -barrier.grad(x_ref).dot(x);
    const Matrix M = barrier.hess(x) - barrier.hess(x_ref) / (rep.c_cone * q * q);
    ++rep.pairs_checked;
    if (!detail::psd_within(M)) ++rep.pair_violations;

    // Scale a random interior point into the set Delta(x_ref).
    const Vector z = random_interior_point(barrier.cone(), rng);
    const Vector xs = (nu * unif(rng) / (-barrier.grad(x_ref).dot(z))) * z;
    ++rep.simplex_checked;
    const double norm_ref = std::sqrt(xs.dot(barrier.hess(x_ref) * xs));
    if (norm_ref > nu * (1.0 + 1e-8)) ++rep.simplex_violations;
  }
  return rep;
}

// Lower bound of the auxiliary Hessian along the path (projected onto the
// constraint null space): hess Phi(u) >= (mu_bar / (c(K) zeta^2)) hess Phi(0).
inline bool aux_hessian_lower_bound_ok(const AuxProblem& aux, const AuxPoint& pt, double sigma,
                                       double mu_bar, double c_cone) {
  const double z = aux.zeta(sigma);
  const double factor = std::min(mu_bar, 1.0) / (c_cone * z * z);
  const AuxPoint origin = aux.point(Vector::Zero(aux.dim()));
  const Matrix M = aux.phi_hess(pt) - factor * aux.phi_hess(origin);
  const Matrix Z = detail::null_space_basis(aux.constraint());
  return detail::psd_within(Z.transpose() * M * Z);
}

// Central-path orderings and the cross product identity
//   <s(t1),x(t2)> + <s(t2),x(t1)> = nu (1/t1 + 1/t2).
struct PathOrderingReport {
  bool dual_lower_ok = false;     // s(t1) >= t2 s(t2) / (nu (t1+t2)), both orders
  bool primal_lower_ok = false;   // x(t1) >= t2 x(t2) / (nu (t1+t2)), both orders
  bool t1_bounds_ok = false;      // two-sided bounds against x(1), s(1)
  bool product_ok = false;
  double product_violation = 0.0;
  int violations() const {
    return (dual_lower_ok ? 0 : 1) + (primal_lower_ok ? 0 : 1) + (t1_bounds_ok ? 0 : 1) +
           (product_ok ? 0 : 1);
  }
};

inline PathOrderingReport check_path_ordering(const ValidatedProblem& vp, double t1, double t2,
                                              const Vector& feasible_start) {
  const auto& barrier = vp.barrier();
  const double nu = barrier.nu();
  const CentralPathPoint p1 = central_path_point(vp, t1, feasible_start);
  const CentralPathPoint p2 = central_path_point(vp, t2, feasible_start);
  const CentralPathPoint pu = central_path_point(vp, 1.0, feasible_start);
  PathOrderingReport rep;

  auto lower = [&](const Vector& a, double ta, const Vector& b, double tb, bool dual) {
    const Vector diff = a - (tb / (nu * (ta + tb))) * b;
    const double slack = detail::ordering_slack(a, b);
    return dual ? barrier.in_dual_cone(diff, slack) : barrier.in_cone(diff, slack);
  };
  rep.dual_lower_ok = lower(p1.s, t1, p2.s, t2, true) && lower(p2.s, t2, p1.s, t1, true);
  rep.primal_lower_ok = lower(p1.x, t1, p2.x, t2, false) && lower(p2.x, t2, p1.x, t1, false);

  auto t1_bounds = [&](const CentralPathPoint& p) {
    const double t = p.t;
    const double lo = 1.0 / (nu * (1.0 + t));
    const double hi = nu * (1.0 + 1.0 / t);
    return barrier.in_cone(p.x - lo * pu.x, detail::ordering_slack(p.x, pu.x)) &&
           barrier.in_cone(hi * pu.x - p.x, detail::ordering_slack(p.x, pu.x)) &&
           barrier.in_dual_cone(p.s - lo * pu.s, detail::ordering_slack(p.s, pu.s)) &&
           barrier.in_dual_cone(hi * pu.s - p.s, detail::ordering_slack(p.s, pu.s));
  };
  rep.t1_bounds_ok = t1_bounds(p1) && t1_bounds(p2);

  const double lhs = p1.s.dot(p2.x) + p2.s.dot(p1.x);
  const double rhs = nu * (1.0 / t1 + 1.0 / t2);
  rep.product_violation = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
  rep.product_ok = rep.product_violation <= 1e-8;
  return rep;
}

// Complexity predictions against measured sigma and mu. The damped-Newton
// expression carries an unspecified absolute constant; callers compare actual
// counts against an explicit multiple and record the ratio.
struct BoundLedger {
  double sigma = std::numeric_limits<double>::quiet_NaN();
  bool sigma_is_placeholder = false;
  double mu = std::numeric_limits<double>::quiet_NaN();
  double mu_bar = std::numeric_limits<double>::quiet_NaN();
  double zeta = std::numeric_limits<double>::quiet_NaN();
  double c_cone = 0.0;
  double bound_damped = std::numeric_limits<double>::quiet_NaN();
  double bound_path = std::numeric_limits<double>::quiet_NaN();
  int actual_damped = -1;
  int actual_path = -1;
};

inline BoundLedger predicted_bounds(const AuxProblem& aux, double sigma, bool sigma_placeholder,
                                    double mu, int actual_damped = -1, int actual_path = -1,
                                    double beta_hat = 0.126, double gamma_hat = 0.164) {
  const double nu = aux.problem().barrier().nu();
  const double nu_bar = aux.nu_bar();
  const double eps = aux.eps();
  BoundLedger ledger;
  ledger.sigma = sigma;
  ledger.sigma_is_placeholder = sigma_placeholder;
  ledger.mu = mu;
  ledger.mu_bar = std::min(mu, 1.0);
  ledger.zeta = aux.zeta(sigma);
  ledger.c_cone = cone_ordering_constant(aux.problem().barrier().cone());
  ledger.bound_damped =
      nu_bar * std::log((1.0 + sigma * (nu + eps)) / nu_bar) + nu * std::log(nu / eps);
  ledger.bound_path = (beta_hat + std::sqrt(nu_bar)) / gamma_hat *
                      std::log(ledger.zeta * std::sqrt(nu_bar * ledger.c_cone / ledger.mu_bar));
  ledger.actual_damped = actual_damped;
  ledger.actual_path = actual_path;
  return ledger;
}

}  // namespace conipm
