#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace rtf {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
// Channel-major storage: one contiguous row per channel.
template <typename Scalar>
using RowMajorX =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Complex = std::complex<double>;
using VectorXd = VectorX<double>;
using VectorXcd = VectorX<Complex>;
using MatrixXd = MatrixX<double>;
using RowMajorXd = RowMajorX<double>;
using RowMajorXcd = RowMajorX<Complex>;
using RowVectorXd = RowVectorX<double>;
using MatrixXcd = MatrixX<Complex>;

enum class ErrorCode {
  InvalidParams,
  TruncatedFormNotExpandable,
  PoleAtEvaluationPoint,
  LengthMismatch,
  LengthTooShort,
  DenominatorZeroOnUnitCircle,
  ChannelMismatch,
  NeedsCorrectedNumerator,
  StateSizeMismatch,
  NearSingularCorrection,
  RepeatedPoles,
  RootFindingDiverged,
  NonRealKernel,
  ZeroVector,
  FirTooLong,
  NonFiniteObjective,
  NonFiniteGradient,
  TrainingDiverged,
  ParseError,
  SchemaError,
  VersionError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rtf
