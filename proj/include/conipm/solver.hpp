#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conipm/auxiliary.hpp"

namespace conipm {

enum class SolveMethod { DampedNewton, PathFollowing };

enum class SolveStatus {
  Converged,
  IterationLimit,
  NoProgress,
  NumericalFailure,
  InvariantViolated,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NoProgress: return "no_progress";
    case SolveStatus::NumericalFailure: return "numerical_failure";
    case SolveStatus::InvariantViolated: return "invariant_violated";
  }
  return "unknown";
}

enum class IterPhase { Damped, Quadratic, Path };

inline const char* to_string(IterPhase p) {
  switch (p) {
    case IterPhase::Damped: return "damped";
    case IterPhase::Quadratic: return "quadratic";
    case IterPhase::Path: return "path";
  }
  return "unknown";
}

struct IterationRecord {
  int k = 0;
  IterPhase phase = IterPhase::Damped;
  double t = std::numeric_limits<double>::quiet_NaN();       // path parameter at iteration start
  double lambda = 0.0;                                       // decrement used for the step
  double lambda_prox = std::numeric_limits<double>::quiet_NaN();  // lambda_u(grad Phi_t(u)) at t
  double phi = 0.0;                                          // Phi(u_k) at iteration start
  double step_norm = 0.0;
  double constraint_violation = 0.0;  // ||A x_k - tau_k b|| at iteration start
};

struct SolverOptions {
  SolveMethod method = SolveMethod::DampedNewton;
  double epsilon = 1e-3;
  double lambda_tol = 1e-12;
  int max_iters = 5000;
  // Short-step scheme parameters; the proximity and rate guarantees are
  // proved for exactly these values.
  double beta_hat = 0.126;
  double gamma_hat = 0.164;
  double beta_tilde = 0.5 - 0.126;
  double quad_entry = 0.5;
  double divergence_cap = 1e12;
  bool trace = false;
  std::function<void(const IterationRecord&)> on_iteration;
};

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::string termination;
  std::vector<IterationRecord> iterations;
  int iters_total = 0;
  int iters_damped = 0;
  int iters_quadratic = 0;
  int iters_path = 0;
  int kkt_ridge_events = 0;
  int step_halvings = 0;
  Vector final_u;
  Vector final_mult;
  double final_lambda = std::numeric_limits<double>::quiet_NaN();
  double final_phi = std::numeric_limits<double>::quiet_NaN();
  PrimalDualTriple recovered;
  Residuals final_residuals;
  bool eps_check_passed = false;
  bool has_certificate = false;
  bool certificate_valid = false;
  AlternativeCertificate candidate_certificate;
  double wall_time_sec = 0.0;
};

namespace detail {

struct Stepper {
  const AuxProblem& aux;
  SolveReport& rep;
  const SolverOptions& opts;

  void emit(IterationRecord rec) {
    rep.iterations.push_back(rec);
    if (opts.on_iteration) opts.on_iteration(rec);
  }

  double constraint_violation(const AuxPoint& pt) const {
    const auto& p = aux.problem().data();
    return (p.A * aux.x_part(pt.u) - aux.tau_part(pt.u) * p.b).norm();
  }

  // u_next = u - factor * h with the floating-point safety net: exact steps
  // never leave the domain, so halve at most 30 times before giving up.
  std::optional<AuxPoint> step(const AuxPoint& pt, const Vector& h, double factor,
                               double* step_norm) {
    double f = factor;
    for (int j = 0; j <= 30; ++j) {
      if (auto next = aux.try_point(pt.u - f * h)) {
        if (j > 0) rep.step_halvings += j;
        *step_norm = f * h.norm();
        return next;
      }
      f *= 0.5;
    }
    return std::nullopt;
  }

  bool diverged(const AuxPoint& pt) const {
    return pt.u.lpNorm<Eigen::Infinity>() > opts.divergence_cap;
  }
};

// Best-effort alternative certificate from a divergent iterate: the domain's
// recession directions are exactly the nonzero certificates, so the
// normalized iterate is the natural candidate.
inline void attach_certificate(const AuxProblem& aux, const AuxPoint& pt, SolveReport& rep) {
  AlternativeCertificate cert;
  cert.x_hat = aux.refs().x_ref + aux.x_part(pt.u);
  cert.y_hat = aux.y_part(pt.u);
  cert.tau_hat = aux.tau_part(pt.u);
  const double scale = std::max({cert.x_hat.lpNorm<Eigen::Infinity>(),
                                 cert.y_hat.lpNorm<Eigen::Infinity>(), std::abs(cert.tau_hat)});
  if (scale > 0.0 && std::isfinite(scale)) {
    cert.x_hat /= scale;
    cert.y_hat /= scale;
    cert.tau_hat /= scale;
    rep.candidate_certificate = cert;
    rep.has_certificate = true;
    rep.certificate_valid = check_certificate(aux.problem(), cert, aux.eps());
  }
}

struct PhaseResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  AuxPoint pt;
  Vector mult;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

// Terminal Newton phase inside the region of quadratic convergence
// (lambda < 1/2): iterate u+ = u - h/(1 + lambda) until lambda <= lambda_tol.
// The local rate is lambda+ <= 2 lambda^2. Two consecutive non-contractions
// signal that the tolerance sits below attainable precision; the best
// iterate seen is reported.
inline PhaseResult quadratic_phase_impl(Stepper& st, AuxPoint pt, int& k) {
  const AuxProblem& aux = st.aux;
  const SolverOptions& opts = st.opts;
  PhaseResult best;
  best.pt = pt;
  best.lambda = std::numeric_limits<double>::infinity();
  double prev_lambda = std::numeric_limits<double>::infinity();
  int non_contract = 0;
  while (true) {
    KktFactorization fact = aux.factor_at(pt);
    if (fact.ridge_used()) ++st.rep.kkt_ridge_events;
    RestrictedNorm rn = aux.restricted_norm(fact, aux.phi_grad(pt));
    if (rn.lambda < best.lambda) {
      best.pt = pt;
      best.mult = rn.mult;
      best.lambda = rn.lambda;
    }
    if (rn.lambda <= opts.lambda_tol) {
      return {SolveStatus::Converged, pt, rn.mult, rn.lambda, "lambda_tol reached"};
    }
    if (rn.lambda >= prev_lambda) {
      if (++non_contract >= 2) {
        best.status = SolveStatus::NumericalFailure;
        best.note = "lambda stopped contracting; tolerance below attainable precision";
        return best;
      }
    } else {
      non_contract = 0;
    }
    prev_lambda = rn.lambda;
    if (k >= opts.max_iters) {
      best.status = SolveStatus::IterationLimit;
      best.note = "iteration limit reached in quadratic phase";
      return best;
    }
    IterationRecord rec;
    rec.k = k;
    rec.phase = IterPhase::Quadratic;
    rec.lambda = rn.lambda;
    rec.phi = aux.phi_value(pt);
    rec.constraint_violation = st.constraint_violation(pt);
    auto next = st.step(pt, rn.h, 1.0 / (1.0 + rn.lambda), &rec.step_norm);
    if (!next) {
      best.status = SolveStatus::NumericalFailure;
      best.note = "step safety net exhausted in quadratic phase";
      return best;
    }
    st.emit(rec);
    ++k;
    ++st.rep.iters_quadratic;
    pt = *next;
    if (st.diverged(pt)) {
      best.status = SolveStatus::NoProgress;
      best.pt = pt;
      best.note = "iterate norm exceeded divergence cap";
      return best;
    }
  }
}

inline void finalize(const AuxProblem& aux, const PhaseResult& res, SolveReport& rep) {
  rep.status = res.status;
  if (rep.termination.empty()) rep.termination = res.note;
  rep.final_u = res.pt.u;
  rep.final_mult = res.mult;
  rep.final_lambda = res.lambda;
  rep.final_phi = aux.try_point(res.pt.u) ? aux.phi_value(res.pt) : std::numeric_limits<double>::quiet_NaN();
  rep.iters_total = rep.iters_damped + rep.iters_quadratic + rep.iters_path;
  if (res.status == SolveStatus::Converged) {
    rep.recovered = aux.recover(res.pt, res.mult);
    rep.final_residuals = residuals(aux.problem().data(), rep.recovered);
    rep.eps_check_passed = check_eps_optimal(aux.problem(), rep.recovered, aux.eps(), 1e-8);
  } else if (res.status == SolveStatus::NoProgress) {
    attach_certificate(aux, res.pt, rep);
  }
}

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Damped Newton on the auxiliary problem from u0 = 0:
//   u+ = u - h(u) / (1 + lambda(u)),
// switching to the terminal quadratic phase once lambda < quad_entry. In the
// damped phase every step decreases Phi by at least lambda - ln(1 + lambda).
inline SolveReport damped_newton_solve(const AuxProblem& aux, const SolverOptions& opts) {
  detail::WallTimer timer;
  SolveReport rep;
  detail::Stepper st{aux, rep, opts};
  AuxPoint pt = aux.point(Vector::Zero(aux.dim()));
  int k = 0;
  int tiny_decrease_streak = 0;
  detail::PhaseResult res;
  while (true) {
    KktFactorization fact = aux.factor_at(pt);
    if (fact.ridge_used()) ++rep.kkt_ridge_events;
    RestrictedNorm rn = aux.restricted_norm(fact, aux.phi_grad(pt));
    if (rn.lambda <= opts.lambda_tol) {
      res = {SolveStatus::Converged, pt, rn.mult, rn.lambda, "lambda_tol reached"};
      break;
    }
    if (rn.lambda < opts.quad_entry) {
      res = detail::quadratic_phase_impl(st, pt, k);
      break;
    }
    if (k >= opts.max_iters) {
      res = {SolveStatus::IterationLimit, pt, rn.mult, rn.lambda, "iteration limit reached"};
      break;
    }
    IterationRecord rec;
    rec.k = k;
    rec.phase = IterPhase::Damped;
    rec.lambda = rn.lambda;
    rec.phi = aux.phi_value(pt);
    rec.constraint_violation = st.constraint_violation(pt);
    auto next = st.step(pt, rn.h, 1.0 / (1.0 + rn.lambda), &rec.step_norm);
    if (!next) {
      res = {SolveStatus::NumericalFailure, pt, rn.mult, rn.lambda, "step safety net exhausted"};
      break;
    }
    st.emit(rec);
    ++k;
    ++rep.iters_damped;
    const double decrease = rec.phi - aux.phi_value(*next);
    tiny_decrease_streak = decrease < 1e-14 ? tiny_decrease_streak + 1 : 0;
    pt = *next;
    if (tiny_decrease_streak >= 10) {
      res = {SolveStatus::NoProgress, pt, rn.mult, rn.lambda,
             "objective decrease below 1e-14 for 10 consecutive damped steps"};
      break;
    }
    if (st.diverged(pt)) {
      res = {SolveStatus::NoProgress, pt, rn.mult, rn.lambda,
             "iterate norm exceeded divergence cap"};
      break;
    }
  }
  detail::finalize(aux, res, rep);
  rep.wall_time_sec = timer.seconds();
  return rep;
}

// Short-step path-following along the dual central path u_d(t) from
// (u0, t0) = (0, 1):
//   t+ = (t - gamma_hat / lambda_u(g))_+,
//   u+ = u - h_u(grad Phi_{t+}(u)) / (1 + xi),   xi = lambda^2 / (1 + lambda),
// maintaining the proximity invariant lambda_u(grad Phi_t(u)) <= beta_hat.
// Once t * lambda_u(g) < beta_tilde the plain Newton decrement on Phi is
// below 1/2 and the terminal quadratic phase finishes the job.
inline SolveReport path_follow_solve(const AuxProblem& aux, const SolverOptions& opts) {
  detail::WallTimer timer;
  SolveReport rep;
  detail::Stepper st{aux, rep, opts};
  const Vector& g = aux.target_vector();
  AuxPoint pt = aux.point(Vector::Zero(aux.dim()));
  double t = 1.0;
  int k = 0;
  detail::PhaseResult res;
  while (true) {
    KktFactorization fact = aux.factor_at(pt);
    if (fact.ridge_used()) ++rep.kkt_ridge_events;
    RestrictedNorm rn_g = aux.restricted_norm(fact, g);
    RestrictedNorm rn_prox = aux.restricted_norm(fact, aux.phi_grad(pt) + t * g);
    if (rn_prox.lambda > opts.beta_hat + 1e-8) {
      res = {SolveStatus::InvariantViolated, pt, rn_prox.mult, rn_prox.lambda,
             "path proximity invariant violated"};
      break;
    }
    if (t * rn_g.lambda < opts.beta_tilde) {
      // Switch soundness: lambda_u(grad Phi) <= beta_hat + beta_tilde < 1/2.
      res = detail::quadratic_phase_impl(st, pt, k);
      break;
    }
    if (k >= opts.max_iters) {
      res = {SolveStatus::IterationLimit, pt, rn_prox.mult, rn_prox.lambda,
             "iteration limit reached"};
      break;
    }
    const double t_next = rn_g.lambda > 0.0 ? std::max(t - opts.gamma_hat / rn_g.lambda, 0.0) : 0.0;
    RestrictedNorm rn = aux.restricted_norm(fact, aux.phi_grad(pt) + t_next * g);
    const double xi = rn.lambda * rn.lambda / (1.0 + rn.lambda);
    IterationRecord rec;
    rec.k = k;
    rec.phase = IterPhase::Path;
    rec.t = t;
    rec.lambda = rn.lambda;
    rec.lambda_prox = rn_prox.lambda;
    rec.phi = aux.phi_value(pt);
    rec.constraint_violation = st.constraint_violation(pt);
    auto next = st.step(pt, rn.h, 1.0 / (1.0 + xi), &rec.step_norm);
    if (!next) {
      res = {SolveStatus::NumericalFailure, pt, rn.mult, rn.lambda, "step safety net exhausted"};
      break;
    }
    st.emit(rec);
    ++k;
    ++rep.iters_path;
    pt = *next;
    t = t_next;
    if (st.diverged(pt)) {
      res = {SolveStatus::NoProgress, pt, rn.mult, rn.lambda,
             "iterate norm exceeded divergence cap"};
      break;
    }
  }
  detail::finalize(aux, res, rep);
  rep.wall_time_sec = timer.seconds();
  return rep;
}

// Facade: reference construction, auxiliary problem, chosen method, recovery.
inline SolveReport solve(const ValidatedProblem& vp, double eps, SolverOptions opts,
                         const std::optional<PrimalDualTriple>& hot_start = std::nullopt) {
  opts.epsilon = eps;
  ReferencePoints refs = hot_start
                             ? hot_start_refs(vp, *hot_start)
                             : default_refs(vp, vp.barrier().cone().canonical_interior_point());
  AuxProblem aux(vp, eps, std::move(refs));
  return opts.method == SolveMethod::DampedNewton ? damped_newton_solve(aux, opts)
                                                  : path_follow_solve(aux, opts);
}

}  // namespace conipm
