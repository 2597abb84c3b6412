#pragma once

#include <stdexcept>
#include <string>

namespace conipm {

// Point lies on or outside the boundary of the cone (or dual cone).
class NotInteriorError : public std::runtime_error {
 public:
  explicit NotInteriorError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation point violates one of the three domain conditions of the
// auxiliary barrier (primal shift, dual argument, or denominator).
class OutOfDomainError : public std::runtime_error {
 public:
  explicit OutOfDomainError(const std::string& what) : std::runtime_error(what) {}
};

// KKT system is rank deficient or indefinite beyond regularization.
class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

enum class ValidationIssue {
  DimensionMismatch,
  RankDeficient,
  CInRangeOfAT,
};

inline const char* to_string(ValidationIssue issue) {
  switch (issue) {
    case ValidationIssue::DimensionMismatch: return "DimensionMismatch";
    case ValidationIssue::RankDeficient: return "RankDeficient";
    case ValidationIssue::CInRangeOfAT: return "CInRangeOfAT";
  }
  return "Unknown";
}

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationIssue issue, const std::string& what)
      : std::runtime_error(what), issue_(issue) {}
  ValidationIssue issue() const { return issue_; }

 private:
  ValidationIssue issue_;
};

// Problem/report file syntax or semantic error; carries the offending
// field and 1-based line number for CLI messages.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, int line, const std::string& what)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace conipm
