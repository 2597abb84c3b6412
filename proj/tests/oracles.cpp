#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conipm/diagnostics.hpp"

namespace conipm::testing {

namespace {

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<LpOptimum> lp_optimum(const ConicProblem& problem) {
  for (const auto& b : problem.cone.blocks) {
    if (b.type != BlockType::Orthant) {
      throw std::invalid_argument("lp_optimum handles orthant cones only");
    }
  }
  const int n = static_cast<int>(problem.A.cols());
  const int m = static_cast<int>(problem.A.rows());
  if (n > 12 || m > 8) throw std::invalid_argument("lp_optimum caps: n <= 12, m <= 8");

  std::optional<LpOptimum> best;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  do {
    Matrix B(m, m);
    for (int j = 0; j < m; ++j) B.col(j) = problem.A.col(idx[j]);
    Eigen::FullPivLU<Matrix> lu(B);
    if (!lu.isInvertible()) continue;
    const Vector xb = lu.solve(problem.b);
    if ((xb.array() < -1e-10).any()) continue;
    Vector x = Vector::Zero(n);
    for (int j = 0; j < m; ++j) x(idx[j]) = std::max(0.0, xb(j));
    const double value = problem.c.dot(x);
    if (!best || value < best->value) best = LpOptimum{value, x};
  } while (next_combination(idx, n));
  return best;
}

double conjugate_value(const BarrierOracle& barrier, const Vector& s) {
  if (!barrier.is_dual_interior(s)) {
    throw NotInteriorError("conjugate_value: s not interior to the dual cone");
  }
  // Per-block coarse grid for the starting point.
  Vector x = Vector::Zero(barrier.dim());
  int off = 0;
  for (const auto& blk : barrier.cone().blocks) {
    if (blk.type == BlockType::Orthant) {
      for (int i = 0; i < blk.dim; ++i) {
        const double si = s(off + i);
        double best_x = 1.0, best_v = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 120; ++k) {
          const double cand = std::exp(-6.0 + 0.1 * k);
          const double v = -si * cand + std::log(cand);
          if (v > best_v) best_v = v, best_x = cand;
        }
        x(off + i) = best_x;
      }
    } else {
      const double s0 = s(off);
      const Vector sbar = s.segment(off + 1, blk.dim - 1);
      const double sn = sbar.norm();
      double best_v = -std::numeric_limits<double>::infinity();
      double best_x0 = 1.0, best_r = 0.0;
      for (int k = 0; k <= 120; ++k) {
        const double x0 = std::exp(-6.0 + 0.1 * k);
        for (int j = 0; j < 34; ++j) {
          const double r = x0 * (j / 34.0);
          const double q = x0 * x0 - r * r;
          const double v = -s0 * x0 + r * sn + std::log(q);
          if (v > best_v) best_v = v, best_x0 = x0, best_r = r;
        }
      }
      x(off) = best_x0;
      if (sn > 0.0) x.segment(off + 1, blk.dim - 1) = -(best_r / sn) * sbar;
    }
    off += blk.dim;
  }
  // Joint damped Newton on psi(x) = -<s,x> - F(x).
  for (int it = 0; it < 300; ++it) {
    const Vector g = -s - barrier.grad(x);
    const Matrix H = barrier.hess(x);
    const Vector d = H.llt().solve(g);
    const double lam = std::sqrt(std::max(0.0, g.dot(d)));
    if (lam <= 1e-13) break;
    double f = 1.0 / (1.0 + lam);
    for (int j = 0; j <= 40 && !barrier.is_interior(x + f * d); ++j) f *= 0.5;
    x += f * d;
  }
  return -s.dot(x) - barrier.value(x);
}

double tiny_lp_path_x1(double t) {
  auto fp = [t](double x1) { return t - 1.0 / x1 + 1.0 / (1.0 - x1); };
  double lo = 1e-14, hi = 1.0 - 1e-14;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fp(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ConicProblem tiny_lp() {
  ConicProblem p;
  p.A = Matrix::Ones(1, 2);
  p.b = Vector::Ones(1);
  p.c = Vector::Zero(2);
  p.c(0) = 1.0;
  p.cone.blocks = {{BlockType::Orthant, 2}};
  return p;
}

ConicProblem random_feasible_lp(int n, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  for (int attempt = 0; attempt < 100; ++attempt) {
    ConicProblem p;
    p.cone.blocks = {{BlockType::Orthant, n}};
    p.A = Matrix(m, n);
    for (int i = 0; i + 1 < m; ++i) {
      for (int j = 0; j < n; ++j) p.A(i, j) = entry(rng);
    }
    p.A.row(m - 1).setOnes();
    Vector x_hat(n), s_hat(n), y_hat(m);
    for (int j = 0; j < n; ++j) x_hat(j) = pos(rng);
    for (int j = 0; j < n; ++j) s_hat(j) = pos(rng);
    for (int i = 0; i < m; ++i) y_hat(i) = small(rng);
    p.b = p.A * x_hat;
    p.c = s_hat + p.A.transpose() * y_hat;
    try {
      validate(p);
      return p;
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw std::runtime_error("random_feasible_lp: could not build a valid instance");
}

ConicProblem random_feasible_conic(const ConeSpec& cone, int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  const int n = cone.dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    ConicProblem p;
    p.cone = cone;
    p.A = Matrix(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.A(i, j) = entry(rng);
    }
    const Vector x_hat = random_interior_point(cone, rng);
    const Vector s_hat = random_interior_point(cone, rng);
    Vector y_hat(m);
    for (int i = 0; i < m; ++i) y_hat(i) = small(rng);
    p.b = p.A * x_hat;
    p.c = s_hat + p.A.transpose() * y_hat;
    try {
      validate(p);
      return p;
    } catch (const ValidationError&) {
      continue;
    }
  }
  throw std::runtime_error("random_feasible_conic: could not build a valid instance");
}

}  // namespace conipm::testing
