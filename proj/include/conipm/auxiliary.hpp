#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "conipm/problem.hpp"

namespace conipm {

// Interior anchors (x_ref, s_ref, tau_ref) defining the auxiliary barrier,
// plus the origin triple w = (x_w, s_w, y_w) the target vector is built from.
struct ReferencePoints {
  Vector x_ref;
  Vector s_ref;
  double tau_ref = 1.0;
  Vector x_w;
  Vector s_w;
  Vector y_w;
};

// Default rule: tau_ref = 1, s_ref = -grad F(x_ref), origin triple
// (x_ref, s_ref, 0). Makes Phi(0) = -nu.
inline ReferencePoints default_refs(const ValidatedProblem& vp, const Vector& x_ref) {
  const auto& barrier = vp.barrier();
  if (!barrier.is_interior(x_ref)) {
    throw NotInteriorError("default_refs: reference point not interior");
  }
  ReferencePoints refs;
  refs.x_ref = x_ref;
  refs.s_ref = -barrier.grad(x_ref);
  refs.tau_ref = 1.0;
  refs.x_w = x_ref;
  refs.s_w = refs.s_ref;
  refs.y_w = Vector::Zero(vp.m());
  return refs;
}

// Hot-start rule: given a user triple w = (x_w, s_w, y_w) near an
// eps-solution, anchor at x_ref = -grad F*(s_w), s_ref = -grad F(x_w),
// tau_ref = 1. With y_w = 0 and s_w = -grad F(x_w) this reduces to the
// default rule.
inline ReferencePoints hot_start_refs(const ValidatedProblem& vp, const PrimalDualTriple& w) {
  const auto& barrier = vp.barrier();
  if (!barrier.is_interior(w.x)) throw NotInteriorError("hot_start_refs: x not interior");
  if (!barrier.is_dual_interior(w.s)) throw NotInteriorError("hot_start_refs: s not interior");
  if (w.y.size() != vp.m()) throw ValidationError(ValidationIssue::DimensionMismatch,
                                                  "hot_start_refs: y has wrong dimension");
  ReferencePoints refs;
  refs.x_ref = -barrier.dual_grad(w.s);
  refs.s_ref = -barrier.grad(w.x);
  refs.tau_ref = 1.0;
  refs.x_w = w.x;
  refs.s_w = w.s;
  refs.y_w = w.y;
  return refs;
}

// A point u = (x, y, tau) of the auxiliary problem with its cached dual
// argument s_arg = s_ref + tau*c - A^T y and denominator
// ell = tau_ref - <c,x> + <b,y> - eps*tau.
struct AuxPoint {
  Vector u;
  Vector s_arg;
  double ell = 0.0;
};

struct RestrictedNorm {
  double lambda = 0.0;
  Vector h;     // maximizer of 2<v,h> - <Hess h,h> over A h_x = h_tau b
  Vector mult;  // equality multipliers of that maximization
  bool ridge_used = false;
};

// The auxiliary problem
//   min { Phi(u) = F(x_ref + x) + F*(s_ref + tau c - A^T y)
//                  - ln(tau_ref - <c,x> + <b,y> - eps tau) : A x = tau b }
// over u = (x, y, tau). Phi is a self-concordant barrier for its domain with
// parameter nu_bar = 2 nu + 1; its minimizer yields a strictly feasible
// primal-dual pair with duality gap exactly eps.
class AuxProblem {
 public:
  AuxProblem(ValidatedProblem vp, double eps, ReferencePoints refs)
      : vp_(std::move(vp)), eps_(eps), refs_(std::move(refs)) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    const auto& p = vp_.data();
    n_ = vp_.n();
    m_ = vp_.m();
    nu_bar_ = 2.0 * vp_.barrier().nu() + 1.0;
    // Constraint operator of the flat variable: G u = A x - tau b.
    G_ = Matrix::Zero(m_, dim());
    G_.block(0, 0, m_, n_) = p.A;
    G_.col(n_ + m_) = -p.b;
    // Target vector g from the origin triple: the residual pattern of w with
    // the gap shifted by eps.
    g_ = Vector::Zero(dim());
    g_.head(n_) = refs_.s_w + p.A.transpose() * refs_.y_w - p.c;
    g_.segment(n_, m_) = p.b - p.A * refs_.x_w;
    g_(n_ + m_) = p.c.dot(refs_.x_w) - p.b.dot(refs_.y_w) - eps_;
    // Gradient of the affine denominator ell.
    d_ell_ = Vector::Zero(dim());
    d_ell_.head(n_) = -p.c;
    d_ell_.segment(n_, m_) = p.b;
    d_ell_(n_ + m_) = -eps_;
  }

  const ValidatedProblem& problem() const { return vp_; }
  const ReferencePoints& refs() const { return refs_; }
  double eps() const { return eps_; }
  double nu_bar() const { return nu_bar_; }
  int n() const { return n_; }
  int m() const { return m_; }
  int dim() const { return n_ + m_ + 1; }
  const Matrix& constraint() const { return G_; }
  const Vector& target_vector() const { return g_; }

  Vector x_part(const Vector& u) const { return u.head(n_); }
  Vector y_part(const Vector& u) const { return u.segment(n_, m_); }
  double tau_part(const Vector& u) const { return u(n_ + m_); }

  std::optional<AuxPoint> try_point(const Vector& u) const {
    const auto& p = vp_.data();
    const auto& barrier = vp_.barrier();
    AuxPoint pt;
    pt.u = u;
    if (!barrier.is_interior(refs_.x_ref + u.head(n_))) return std::nullopt;
    pt.s_arg = refs_.s_ref + tau_part(u) * p.c - p.A.transpose() * y_part(u);
    if (!barrier.is_dual_interior(pt.s_arg)) return std::nullopt;
    pt.ell = refs_.tau_ref + d_ell_.dot(u);
    if (!(pt.ell > 0.0)) return std::nullopt;
    return pt;
  }

  AuxPoint point(const Vector& u) const {
    auto pt = try_point(u);
    if (!pt) throw OutOfDomainError("auxiliary point violates a domain condition");
    return *pt;
  }

  double phi_value(const AuxPoint& pt) const {
    const auto& barrier = vp_.barrier();
    return barrier.value(refs_.x_ref + x_part(pt.u)) + barrier.dual_value(pt.s_arg) -
           std::log(pt.ell);
  }

  Vector phi_grad(const AuxPoint& pt) const {
    const auto& p = vp_.data();
    const auto& barrier = vp_.barrier();
    const Vector gF = barrier.grad(refs_.x_ref + x_part(pt.u));
    const Vector gFs = barrier.dual_grad(pt.s_arg);
    Vector g = Vector::Zero(dim());
    g.head(n_) = gF;
    g.segment(n_, m_) = -p.A * gFs;
    g(n_ + m_) = p.c.dot(gFs);
    g -= d_ell_ / pt.ell;
    return g;
  }

  Vector phi_t_grad(const AuxPoint& pt, double t) const { return phi_grad(pt) + t * g_; }

  Matrix phi_hess(const AuxPoint& pt) const {
    const auto& p = vp_.data();
    const auto& barrier = vp_.barrier();
    const Matrix HF = barrier.hess(refs_.x_ref + x_part(pt.u));
    const Matrix HFs = barrier.dual_hess(pt.s_arg);
    Matrix H = Matrix::Zero(dim(), dim());
    H.block(0, 0, n_, n_) = HF;
    // (y,tau) block through the affine map (y,tau) -> tau c - A^T y.
    const Matrix AH = p.A * HFs;
    H.block(n_, n_, m_, m_) = AH * p.A.transpose();
    const Vector cross = -AH * p.c;
    H.block(n_, n_ + m_, m_, 1) = cross;
    H.block(n_ + m_, n_, 1, m_) = cross.transpose();
    H(n_ + m_, n_ + m_) = p.c.dot(HFs * p.c);
    H += (d_ell_ * d_ell_.transpose()) / (pt.ell * pt.ell);
    return H;
  }

  // Restricted local norm of v at u: the value of
  //   max_h { 2<v,h> - <Hess Phi(u) h, h> : A h_x = h_tau b }
  // is lambda^2 = <v, h>; h is the maximizer and mult its equality
  // multipliers. Specializing v = grad Phi(u) gives the constrained Newton
  // decrement and direction. At the KKT solution <v,h> equals <h, Hess h>;
  // the quadratic form is evaluated (compensated) because the direct inner
  // product drowns in <mult, G h> round-off once lambda approaches 1e-12.
  RestrictedNorm restricted_norm(const AuxPoint& pt, const Vector& v) const {
    KktFactorization fact(phi_hess(pt), G_);
    return restricted_norm(fact, v);
  }

  // Same, reusing a factorization of the Hessian at the evaluation point.
  RestrictedNorm restricted_norm(const KktFactorization& fact, const Vector& v) const {
    RestrictedNorm r;
    KktSolution sol = fact.solve(v, Vector::Zero(m_));
    r.h = std::move(sol.h);
    r.mult = std::move(sol.mult);
    r.ridge_used = fact.ridge_used();
    const double ip = conipm::detail::compensated_quadratic_form(fact.hessian(), r.h);
    if (ip < 0.0) {
      if (ip < -1e-14) {
        throw SingularSystemError("restricted norm: negative curvature beyond round-off");
      }
      r.lambda = 0.0;  // norm; negativity at this scale is round-off
    } else {
      r.lambda = std::sqrt(ip);
    }
    return r;
  }

  KktFactorization factor_at(const AuxPoint& pt) const {
    return KktFactorization(phi_hess(pt), G_);
  }

  // Recovery of the strictly feasible eps-solution from a (near-)minimizer
  // u and the multipliers of its last KKT solve:
  //   x_eps = -omega grad F*(s_arg),  s_eps = -omega grad F(x_ref + x),
  //   y_eps = omega mult,             omega = ell(u).
  PrimalDualTriple recover(const AuxPoint& pt, const Vector& mult) const {
    const auto& barrier = vp_.barrier();
    const double omega = pt.ell;
    PrimalDualTriple t;
    t.x = -omega * barrier.dual_grad(pt.s_arg);
    t.s = -omega * barrier.grad(refs_.x_ref + x_part(pt.u));
    t.y = omega * mult;
    return t;
  }

  // Point of the induced primal central path at parameter t, together with
  // the residual pattern it must satisfy:
  //   s_p + A^T y_p - c = t omega g_x,   b - A x_p = t omega g_y,
  //   <c,x_p> - <b,y_p> - eps = t omega g_tau.
  struct PathPoint {
    PrimalDualTriple triple;
    double omega = 0.0;
    Vector pattern_dual;    // (s_p + A^T y_p - c) - t omega g_x
    Vector pattern_primal;  // (b - A x_p) - t omega g_y
    double pattern_gap = 0.0;
  };

  PathPoint primal_path_point(const AuxPoint& pt, const Vector& mult, double t) const {
    const auto& p = vp_.data();
    PathPoint out;
    out.triple = recover(pt, mult);
    out.omega = pt.ell;
    const double tw = t * out.omega;
    out.pattern_dual =
        (out.triple.s + p.A.transpose() * out.triple.y - p.c) - tw * g_.head(n_);
    out.pattern_primal = (p.b - p.A * out.triple.x) - tw * g_.segment(n_, m_);
    out.pattern_gap = (p.c.dot(out.triple.x) - p.b.dot(out.triple.y) - eps_) - tw * g_(n_ + m_);
    return out;
  }

  // Conditioning aggregate zeta(eps) = (nu sigma / eps)(nu + eps)^2
  // [1 + 2 sigma <s_ref, x_ref>] controlling the Hessian lower bound.
  double zeta(double sigma) const {
    const double nu = vp_.barrier().nu();
    return (nu * sigma / eps_) * (nu + eps_) * (nu + eps_) *
           (1.0 + 2.0 * sigma * refs_.s_ref.dot(refs_.x_ref));
  }

 private:
  ValidatedProblem vp_;
  double eps_;
  ReferencePoints refs_;
  int n_ = 0;
  int m_ = 0;
  double nu_bar_ = 0.0;
  Matrix G_;
  Vector g_;
  Vector d_ell_;
};

}  // namespace conipm
