#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace buckle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
  Parse,
  Io,
  Dimension,
  RankDeficient,
  InvalidArgument,
  NotSemidefinite,
  SingularShift,
  ShiftIsZero,
  PermutationFailure,
  SingularFactor,
  SingularProjectedBlock,
  AlphaOnSpectrum,
  NonpositiveNorm,
  Coupled,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so that front ends
/// can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Largest absolute column sum.
double norm1(const Matrix& a);

}  // namespace buckle
