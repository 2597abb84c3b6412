#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conipm/diagnostics.hpp"
#include "conipm/problem.hpp"
#include "conipm/solver.hpp"

namespace conipm {

// Shared line grammar for problem and report files: one `key: value` pair
// per line, `#` comments and blank lines ignored, vector values written as
// whitespace-separated numbers. Keys use dots and [i] indices for nesting.

struct KvLine {
  std::string key;
  std::string value;
  int line = 0;
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_vector(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_double(v(i));
  }
  return out;
}

inline std::vector<KvLine> parse_kv(const std::string& text) {
  std::vector<KvLine> lines;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string stripped = trim(raw);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto colon = stripped.find(':');
    if (colon == std::string::npos) {
      throw ParseError("", lineno, "expected 'key: value' on line " + std::to_string(lineno));
    }
    KvLine kv;
    kv.key = trim(stripped.substr(0, colon));
    kv.value = trim(stripped.substr(colon + 1));
    kv.line = lineno;
    if (kv.key.empty()) {
      throw ParseError("", lineno, "empty key on line " + std::to_string(lineno));
    }
    lines.push_back(std::move(kv));
  }
  return lines;
}

namespace detail {

class KvReader {
 public:
  explicit KvReader(const std::string& text) {
    for (auto& kv : parse_kv(text)) {
      if (map_.count(kv.key)) {
        throw ParseError(kv.key, kv.line, "duplicate field '" + kv.key + "' on line " +
                                              std::to_string(kv.line));
      }
      map_.emplace(kv.key, kv);
    }
  }

  bool has(const std::string& key) const { return map_.count(key) > 0; }

  const KvLine& require(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) throw ParseError(key, 0, "missing required field '" + key + "'");
    return it->second;
  }

  long get_int(const std::string& key) const {
    const KvLine& kv = require(key);
    try {
      size_t pos = 0;
      long v = std::stol(kv.value, &pos);
      if (pos != kv.value.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ParseError(key, kv.line, "field '" + key + "' on line " + std::to_string(kv.line) +
                                         " is not an integer: '" + kv.value + "'");
    }
  }

  std::string get_string(const std::string& key) const { return require(key).value; }

  Vector get_vector(const std::string& key, int expected_size = -1) const {
    const KvLine& kv = require(key);
    std::istringstream in(kv.value);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) {
      try {
        size_t pos = 0;
        vals.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(key, kv.line, "field '" + key + "' on line " + std::to_string(kv.line) +
                                           " has a non-numeric entry: '" + tok + "'");
      }
    }
    if (expected_size >= 0 && static_cast<int>(vals.size()) != expected_size) {
      throw ParseError(key, kv.line, "field '" + key + "' on line " + std::to_string(kv.line) +
                                         " must have " + std::to_string(expected_size) +
                                         " entries, found " + std::to_string(vals.size()));
    }
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
  }

  const std::map<std::string, KvLine>& entries() const { return map_; }

 private:
  std::map<std::string, KvLine> map_;
};

}  // namespace detail

struct ProblemInput {
  ConicProblem problem;
  std::optional<Vector> ref_x;
  std::optional<PrimalDualTriple> hot_start;
};

// Problem file grammar (format_version 1):
//   format_version: 1
//   cone[i].type: nonneg | soc
//   cone[i].dim:  <int>
//   A.rows: <int>
//   A.cols: <int>
//   A.row[i]: <cols numbers>
//   b: <rows numbers>
//   c: <cols numbers>
//   ref.x: <cols numbers>                    (optional reference point)
//   hot.x / hot.s / hot.y: <numbers>         (optional hot-start triple)
inline ProblemInput parse_problem(const std::string& text) {
  detail::KvReader kv(text);
  if (kv.get_int("format_version") != 1) {
    throw ParseError("format_version", kv.require("format_version").line,
                     "unsupported format_version (expected 1)");
  }
  ProblemInput input;
  ConeSpec cone;
  for (int i = 0;; ++i) {
    const std::string base = "cone[" + std::to_string(i) + "]";
    if (!kv.has(base + ".type")) {
      if (i == 0) throw ParseError(base + ".type", 0, "missing required field '" + base + ".type'");
      break;
    }
    const std::string type = kv.get_string(base + ".type");
    ConeBlock block;
    if (type == "nonneg") {
      block.type = BlockType::Orthant;
    } else if (type == "soc") {
      block.type = BlockType::SecondOrder;
    } else {
      throw ParseError(base + ".type", kv.require(base + ".type").line,
                       "field '" + base + ".type' on line " +
                           std::to_string(kv.require(base + ".type").line) +
                           " must be 'nonneg' or 'soc', found '" + type + "'");
    }
    block.dim = static_cast<int>(kv.get_int(base + ".dim"));
    const int min_dim = block.type == BlockType::SecondOrder ? 2 : 1;
    if (block.dim < min_dim) {
      throw ParseError(base + ".dim", kv.require(base + ".dim").line,
                       "field '" + base + ".dim' must be >= " + std::to_string(min_dim));
    }
    cone.blocks.push_back(block);
  }
  const int rows = static_cast<int>(kv.get_int("A.rows"));
  const int cols = static_cast<int>(kv.get_int("A.cols"));
  if (rows < 1 || cols < 1) {
    throw ParseError("A.rows", kv.require("A.rows").line, "A.rows and A.cols must be positive");
  }
  if (cone.dim() != cols) {
    throw ParseError("A.cols", kv.require("A.cols").line,
                     "cone dimension " + std::to_string(cone.dim()) +
                         " does not match A.cols = " + std::to_string(cols));
  }
  Matrix A(rows, cols);
  for (int i = 0; i < rows; ++i) {
    A.row(i) = kv.get_vector("A.row[" + std::to_string(i) + "]", cols).transpose();
  }
  input.problem.A = std::move(A);
  input.problem.b = kv.get_vector("b", rows);
  input.problem.c = kv.get_vector("c", cols);
  input.problem.cone = std::move(cone);
  if (kv.has("ref.x")) input.ref_x = kv.get_vector("ref.x", cols);
  const bool any_hot = kv.has("hot.x") || kv.has("hot.s") || kv.has("hot.y");
  if (any_hot) {
    PrimalDualTriple hot;
    hot.x = kv.get_vector("hot.x", cols);
    hot.s = kv.get_vector("hot.s", cols);
    hot.y = kv.get_vector("hot.y", rows);
    input.hot_start = std::move(hot);
  }
  return input;
}

inline std::string write_problem(const ProblemInput& input) {
  std::string out = "format_version: 1\n";
  const auto& p = input.problem;
  for (size_t i = 0; i < p.cone.blocks.size(); ++i) {
    const auto& b = p.cone.blocks[i];
    out += "cone[" + std::to_string(i) +
           "].type: " + (b.type == BlockType::Orthant ? "nonneg" : "soc") + "\n";
    out += "cone[" + std::to_string(i) + "].dim: " + std::to_string(b.dim) + "\n";
  }
  out += "A.rows: " + std::to_string(p.A.rows()) + "\n";
  out += "A.cols: " + std::to_string(p.A.cols()) + "\n";
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    out += "A.row[" + std::to_string(i) + "]: " + format_vector(p.A.row(i).transpose()) + "\n";
  }
  out += "b: " + format_vector(p.b) + "\n";
  out += "c: " + format_vector(p.c) + "\n";
  if (input.ref_x) out += "ref.x: " + format_vector(*input.ref_x) + "\n";
  if (input.hot_start) {
    out += "hot.x: " + format_vector(input.hot_start->x) + "\n";
    out += "hot.s: " + format_vector(input.hot_start->s) + "\n";
    out += "hot.y: " + format_vector(input.hot_start->y) + "\n";
  }
  return out;
}

inline std::string write_trace_header() {
  return "# k phase t lambda lambda_prox phi step_norm constraint_violation\n";
}

inline std::string write_trace_record(const IterationRecord& rec) {
  std::string out = std::to_string(rec.k);
  out += ' ';
  out += to_string(rec.phase);
  out += ' ';
  out += format_double(rec.t);
  out += ' ';
  out += format_double(rec.lambda);
  out += ' ';
  out += format_double(rec.lambda_prox);
  out += ' ';
  out += format_double(rec.phi);
  out += ' ';
  out += format_double(rec.step_norm);
  out += ' ';
  out += format_double(rec.constraint_violation);
  out += '\n';
  return out;
}

// Report file (format_version 1), one key per line; numbers at 17 significant
// digits so the text reproduces the in-memory values exactly.
inline std::string write_report(const SolveReport& rep, SolveMethod method, double epsilon,
                                const SolverOptions& opts,
                                const std::optional<BoundLedger>& ledger = std::nullopt,
                                bool include_wall_time = true) {
  std::string out;
  out += "format_version: 1\n";
  out += "kind: solve_report\n";
  out += std::string("status: ") + to_string(rep.status) + "\n";
  out += "termination: " + rep.termination + "\n";
  out += std::string("method: ") +
         (method == SolveMethod::DampedNewton ? "damped" : "path") + "\n";
  out += "epsilon: " + format_double(epsilon) + "\n";
  out += "lambda_tol: " + format_double(opts.lambda_tol) + "\n";
  out += "iterations.total: " + std::to_string(rep.iters_total) + "\n";
  out += "iterations.damped: " + std::to_string(rep.iters_damped) + "\n";
  out += "iterations.path: " + std::to_string(rep.iters_path) + "\n";
  out += "iterations.quadratic: " + std::to_string(rep.iters_quadratic) + "\n";
  out += "kkt_ridge_events: " + std::to_string(rep.kkt_ridge_events) + "\n";
  out += "step_halvings: " + std::to_string(rep.step_halvings) + "\n";
  out += "final.lambda: " + format_double(rep.final_lambda) + "\n";
  out += "final.phi: " + format_double(rep.final_phi) + "\n";
  if (rep.status == SolveStatus::Converged) {
    out += "recovered.x: " + format_vector(rep.recovered.x) + "\n";
    out += "recovered.s: " + format_vector(rep.recovered.s) + "\n";
    out += "recovered.y: " + format_vector(rep.recovered.y) + "\n";
    out += "residuals.primal: " + format_double(rep.final_residuals.primal) + "\n";
    out += "residuals.dual: " + format_double(rep.final_residuals.dual) + "\n";
    out += "gap: " + format_double(rep.final_residuals.gap) + "\n";
    out += "eps_check: " + std::to_string(rep.eps_check_passed ? 1 : 0) + "\n";
  }
  if (rep.has_certificate) {
    out += "certificate.x: " + format_vector(rep.candidate_certificate.x_hat) + "\n";
    out += "certificate.y: " + format_vector(rep.candidate_certificate.y_hat) + "\n";
    out += "certificate.tau: " + format_double(rep.candidate_certificate.tau_hat) + "\n";
    out += "certificate.valid: " + std::to_string(rep.certificate_valid ? 1 : 0) + "\n";
  }
  if (ledger) {
    out += "ledger.sigma: " + format_double(ledger->sigma) + "\n";
    out += "ledger.sigma_is_placeholder: " + std::to_string(ledger->sigma_is_placeholder ? 1 : 0) +
           "\n";
    out += "ledger.mu: " + format_double(ledger->mu) + "\n";
    out += "ledger.mu_bar: " + format_double(ledger->mu_bar) + "\n";
    out += "ledger.zeta: " + format_double(ledger->zeta) + "\n";
    out += "ledger.c_cone: " + format_double(ledger->c_cone) + "\n";
    out += "ledger.bound_damped: " + format_double(ledger->bound_damped) + "\n";
    out += "ledger.bound_path: " + format_double(ledger->bound_path) + "\n";
    out += "ledger.actual_damped: " + std::to_string(ledger->actual_damped) + "\n";
    out += "ledger.actual_path: " + std::to_string(ledger->actual_path) + "\n";
  }
  if (include_wall_time) out += "wall_time_sec: " + format_double(rep.wall_time_sec) + "\n";
  return out;
}

}  // namespace conipm
