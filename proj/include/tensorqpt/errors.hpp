#ifndef TENSORQPT_ERRORS_HPP
#define TENSORQPT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tensorqpt {

// Rejected or out-of-contract input (domain violations, duplicate points,
// too-coarse grids, malformed configs).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// The chosen anchor point cannot carry the eigenfunction condition
// (eta_1 vanishes there, or the correction is identically zero).
class AnchorPointError : public std::runtime_error {
 public:
  explicit AnchorPointError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/compatibility violations between algorithm pieces
// (dimension mismatch, non-nested point sequences).
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// A fitted convergence rate came out non-positive; downstream assembly
// cannot proceed.
class RateFailure : public std::runtime_error {
 public:
  explicit RateFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Assembly refused because a required assumption failed; the message names
// the failing assumption.
class AssemblyError : public std::runtime_error {
 public:
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown (eigensolver non-convergence, singular interpolation
// systems).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tensorqpt

#endif
