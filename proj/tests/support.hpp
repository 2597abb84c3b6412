// Helpers shared by the unit and acceptance suites.
#pragma once

#include <random>
#include <stdexcept>

#include "conipm/auxiliary.hpp"

namespace conipm::testing {

// Damped Newton on Phi_t, independent of the solver module.
inline AuxPoint minimize_phi_t(const AuxProblem& aux, double t, Vector* mult_out,
                               double tol = 1e-12) {
  Vector u = Vector::Zero(aux.dim());
  for (int it = 0; it < 5000; ++it) {
    const AuxPoint pt = aux.point(u);
    const RestrictedNorm rn = aux.restricted_norm(pt, aux.phi_t_grad(pt, t));
    if (rn.lambda <= tol) {
      if (mult_out) *mult_out = rn.mult;
      return pt;
    }
    double f = 1.0 / (1.0 + rn.lambda);
    for (int j = 0; j <= 30 && !aux.try_point(u - f * rn.h); ++j) f *= 0.5;
    u -= f * rn.h;
  }
  throw std::runtime_error("minimize_phi_t did not converge");
}

// Random point of dom Phi; optionally projected onto the manifold A x = tau b.
inline Vector random_domain_point(const AuxProblem& aux, std::mt19937_64& rng,
                                  bool on_manifold) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& A = aux.problem().data().A;
  const auto& b = aux.problem().data().b;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Vector z(aux.dim());
    for (int i = 0; i < aux.dim(); ++i) z(i) = normal(rng);
    if (on_manifold) {
      const Vector viol = A * z.head(aux.n()) - z(aux.dim() - 1) * b;
      z.head(aux.n()) -= A.transpose() * (A * A.transpose()).llt().solve(viol);
    }
    double alpha = 1.0;
    for (int j = 0; j < 60; ++j) {
      if (aux.try_point(0.7 * alpha * z)) return 0.7 * alpha * z;
      alpha *= 0.5;
    }
  }
  throw std::runtime_error("could not sample a point of dom Phi");
}

}  // namespace conipm::testing
