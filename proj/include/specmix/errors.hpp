#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specmix {

// Base for every library error so callers can catch one type at the CLI
// boundary and map it to a nonzero exit status.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

  // Stable machine-readable error name, e.g. "invalid-argument".
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : Error("invalid-argument", what) {}
};

class NumericFailureError : public Error {
 public:
  explicit NumericFailureError(const std::string& what)
      : Error("numeric-failure", what) {}
};

// Row normalization hit a (near-)zero row; carries the offending row index.
class DegenerateRowError : public Error {
 public:
  DegenerateRowError(std::size_t row, const std::string& what)
      : Error("degenerate-row", what + " (row " + std::to_string(row) + ")"),
        row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class IllConditionedError : public Error {
 public:
  explicit IllConditionedError(const std::string& what)
      : Error("ill-conditioned", what) {}
};

class SingularMixingError : public Error {
 public:
  explicit SingularMixingError(const std::string& what)
      : Error("singular-mixing", what) {}
};

class InvalidProbabilityError : public Error {
 public:
  explicit InvalidProbabilityError(const std::string& what)
      : Error("invalid-probability", what) {}
};

class RankDeficientInputError : public Error {
 public:
  explicit RankDeficientInputError(const std::string& what)
      : Error("rank-deficient-input", what) {}
};

// Convex hull of the input rows contains the origin: no supporting hyperplane.
class DegenerateConeError : public Error {
 public:
  explicit DegenerateConeError(const std::string& what)
      : Error("degenerate-cone", what) {}
};

class ClusteringFailureError : public Error {
 public:
  explicit ClusteringFailureError(const std::string& what)
      : Error("clustering-failure", what) {}
};

class CornerFailureError : public Error {
 public:
  explicit CornerFailureError(const std::string& what)
      : Error("corner-failure", what) {}
};

class EstimationFailureError : public Error {
 public:
  explicit EstimationFailureError(const std::string& what)
      : Error("estimation-failure", what) {}
};

class ConfigRejectedError : public Error {
 public:
  explicit ConfigRejectedError(const std::string& what)
      : Error("config-rejected", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io-error", what) {}
};

}  // namespace specmix
