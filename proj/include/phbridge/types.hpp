#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace phbridge {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Scalar field of a value. Real data is kept with exactly-zero imaginary
/// parts so that a Real tag is always recoverable from the stored matrices.
enum class Field { Real, Complex };

enum class ErrorCode {
  InvalidMatrix,
  ShapeError,
  ParseError,
  NotMonotone,
  NotResistive,
  NotContraction,
  PartialDomain,
  NotMaximal,
  FlavorMismatch,
  NotMember,
  ExtensionFailed,
  NotGeometric,
  KernelOverlap,
  ResidualTooLarge,
  NoConsistentZ,
  InconsistentInitial,
  MissingChannel,
  SingularShift,
  IrregularPencil,
  InconsistentConstraints,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace phbridge
