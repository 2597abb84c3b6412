#pragma once

#include <cmath>
#include <random>

#include "conipm/cone.hpp"
#include "conipm/errors.hpp"
#include "conipm/linalg.hpp"

namespace conipm {

// Logarithmically homogeneous self-concordant barrier for a product cone,
// together with its Legendre conjugate on the dual cone.
//
// Orthant block:       F(x) = -sum ln x_i                      (nu = n)
//   conjugate          F*(s) = -sum ln s_i - n
// Second-order block:  F(x) = -ln(x0^2 - ||xbar||^2)           (nu = 2)
//   conjugate          F*(s) = -ln(s0^2 - ||sbar||^2) + 2 ln 2 - 2
//
// Both block types are self-dual as sets, so interior membership tests
// coincide for K and K*; the conjugate functions differ by the constants
// above. For every interior x the homogeneity identities hold:
//   <grad(x), x> = -nu,  hess(x) x = -grad(x),  <hess(x) x, x> = nu.
class BarrierOracle {
 public:
  explicit BarrierOracle(ConeSpec cone) : cone_(std::move(cone)) {
    cone_.check_valid();
    nu_ = cone_.barrier_parameter();
  }

  const ConeSpec& cone() const { return cone_; }
  double nu() const { return nu_; }
  int dim() const { return cone_.dim(); }

  // Strict interior membership, zero tolerance at the boundary. Numerical
  // safety margins belong to the solvers, not to the membership test.
  bool is_interior(const Vector& x) const { return in_cone(x, 0.0, /*strict=*/true); }
  bool is_dual_interior(const Vector& s) const { return is_interior(s); }

  // Closed-cone membership with an absolute slack, used by certificate and
  // cone-ordering checks where exact boundary membership is unstable.
  bool in_cone(const Vector& x, double slack, bool strict = false) const {
    if (x.size() != dim()) return false;
    if (!x.allFinite()) return false;
    int off = 0;
    for (const auto& b : cone_.blocks) {
      double margin;
      if (b.type == BlockType::Orthant) {
        margin = x.segment(off, b.dim).minCoeff();
      } else {
        margin = x(off) - x.segment(off + 1, b.dim - 1).norm();
      }
      if (strict ? !(margin > 0.0) : !(margin >= -slack)) return false;
      off += b.dim;
    }
    return true;
  }
  bool in_dual_cone(const Vector& s, double slack) const { return in_cone(s, slack); }

  double value(const Vector& x) const {
    require_interior(x, "barrier value");
    double f = 0.0;
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        f -= x.segment(off, b.dim).array().log().sum();
      } else {
        f -= std::log(soc_residual(x, off, b.dim));
      }
      off += b.dim;
    }
    return f;
  }

  Vector grad(const Vector& x) const {
    require_interior(x, "barrier gradient");
    Vector g(dim());
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        g.segment(off, b.dim) = -x.segment(off, b.dim).cwiseInverse();
      } else {
        const double q = soc_residual(x, off, b.dim);
        g.segment(off, b.dim) = (-2.0 / q) * reflect(x, off, b.dim);
      }
      off += b.dim;
    }
    return g;
  }

  Matrix hess(const Vector& x) const {
    require_interior(x, "barrier Hessian");
    Matrix H = Matrix::Zero(dim(), dim());
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        H.block(off, off, b.dim, b.dim).diagonal() =
            x.segment(off, b.dim).array().square().inverse();
      } else {
        // D^2[-ln q](x) = -(2/q) J + (4/q^2) (Jx)(Jx)^T  with J = diag(1,-I)
        const double q = soc_residual(x, off, b.dim);
        const Vector jx = reflect(x, off, b.dim);
        Matrix blk = (4.0 / (q * q)) * (jx * jx.transpose());
        blk.diagonal().array() += 2.0 / q;
        blk(0, 0) -= 4.0 / q;
        H.block(off, off, b.dim, b.dim) = blk;
      }
      off += b.dim;
    }
    return H;
  }

  double dual_value(const Vector& s) const {
    require_dual_interior(s, "dual barrier value");
    double f = 0.0;
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        f += -s.segment(off, b.dim).array().log().sum() - static_cast<double>(b.dim);
      } else {
        f += -std::log(soc_residual(s, off, b.dim)) + 2.0 * std::log(2.0) - 2.0;
      }
      off += b.dim;
    }
    return f;
  }

  Vector dual_grad(const Vector& s) const {
    require_dual_interior(s, "dual barrier gradient");
    Vector g(dim());
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        g.segment(off, b.dim) = -s.segment(off, b.dim).cwiseInverse();
      } else {
        const double p = soc_residual(s, off, b.dim);
        g.segment(off, b.dim) = (-2.0 / p) * reflect(s, off, b.dim);
      }
      off += b.dim;
    }
    return g;
  }

  Matrix dual_hess(const Vector& s) const {
    require_dual_interior(s, "dual barrier Hessian");
    Matrix H = Matrix::Zero(dim(), dim());
    int off = 0;
    for (const auto& b : cone_.blocks) {
      if (b.type == BlockType::Orthant) {
        H.block(off, off, b.dim, b.dim).diagonal() =
            s.segment(off, b.dim).array().square().inverse();
      } else {
        const double p = soc_residual(s, off, b.dim);
        const Vector js = reflect(s, off, b.dim);
        Matrix blk = (4.0 / (p * p)) * (js * js.transpose());
        blk.diagonal().array() += 2.0 / p;
        blk(0, 0) -= 4.0 / p;
        H.block(off, off, b.dim, b.dim) = blk;
      }
      off += b.dim;
    }
    return H;
  }

  // Self-concordance test D^3F(x)[h]^3 <= 2 (D^2F(x)[h]^2)^(3/2), with the
  // third derivative taken by central differences of <hess(x+eh)h, h>.
  bool scf_third_derivative_check(const Vector& x, const Vector& h, double tol = 1e-5) const {
    require_interior(x, "self-concordance check");
    const double hx = std::sqrt(std::max(0.0, h.dot(hess(x) * h)));
    if (hx == 0.0) return true;
    double step = 1e-6 / std::max(1.0, hx);
    const Vector xp = x + step * h;
    const Vector xm = x - step * h;
    if (!is_interior(xp) || !is_interior(xm)) return true;  // step too wide to test
    const double qp = h.dot(hess(xp) * h);
    const double qm = h.dot(hess(xm) * h);
    const double d3 = (qp - qm) / (2.0 * step);
    const double bound = 2.0 * std::pow(hx, 3.0);
    return d3 <= bound + tol * (1.0 + bound);
  }

  // Samples directions of local norm r around x and verifies x + h stays
  // interior (Dikin ellipsoid membership, r < 1).
  bool dikin_check(const Vector& x, double r, int samples, unsigned seed) const {
    require_interior(x, "Dikin check");
    if (r == 0.0) return true;
    const Matrix H = hess(x);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < samples; ++k) {
      Vector d(dim());
      for (int i = 0; i < dim(); ++i) d(i) = normal(rng);
      const double dn = std::sqrt(d.dot(H * d));
      if (dn == 0.0) continue;
      if (!is_interior(x + (r / dn) * d)) return false;
    }
    return true;
  }

 private:
  static double soc_residual(const Vector& v, int off, int dim) {
    const double v0 = v(off);
    return v0 * v0 - v.segment(off + 1, dim - 1).squaredNorm();
  }
  // Jv with J = diag(1, -1, ..., -1) on one block.
  static Vector reflect(const Vector& v, int off, int dim) {
    Vector jv = -v.segment(off, dim);
    jv(0) = v(off);
    return jv;
  }

  void require_interior(const Vector& x, const char* op) const {
    if (!is_interior(x)) throw NotInteriorError(std::string(op) + ": point not strictly interior");
  }
  void require_dual_interior(const Vector& s, const char* op) const {
    if (!is_dual_interior(s)) {
      throw NotInteriorError(std::string(op) + ": point not strictly interior to the dual cone");
    }
  }

  ConeSpec cone_;
  double nu_;
};

}  // namespace conipm
