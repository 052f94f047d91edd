#include "rtf/core.hpp"

#include <cmath>

namespace rtf {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TruncatedFormNotExpandable: return "TruncatedFormNotExpandable";
    case ErrorCode::PoleAtEvaluationPoint: return "PoleAtEvaluationPoint";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::LengthTooShort: return "LengthTooShort";
    case ErrorCode::DenominatorZeroOnUnitCircle: return "DenominatorZeroOnUnitCircle";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::NeedsCorrectedNumerator: return "NeedsCorrectedNumerator";
    case ErrorCode::StateSizeMismatch: return "StateSizeMismatch";
    case ErrorCode::NearSingularCorrection: return "NearSingularCorrection";
    case ErrorCode::RepeatedPoles: return "RepeatedPoles";
    case ErrorCode::RootFindingDiverged: return "RootFindingDiverged";
    case ErrorCode::NonRealKernel: return "NonRealKernel";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::FirTooLong: return "FirTooLong";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

RtfParams::RtfParams(RowMajorXd a, RowMajorXd b, VectorXd h0, NumeratorForm form,
                     std::optional<Index> trained_length)
    : a_(std::move(a)),
      b_(std::move(b)),
      h0_(std::move(h0)),
      form_(form),
      trained_length_(trained_length) {
  validate();
}

RtfParams RtfParams::siso(const VectorXd& a, const VectorXd& b, double h0,
                          NumeratorForm form, std::optional<Index> trained_length) {
  return RtfParams(a.transpose(), b.transpose(), VectorXd::Constant(1, h0), form,
                   trained_length);
}

RtfParams RtfParams::with_numerator(RowMajorXd b, NumeratorForm form,
                                    std::optional<Index> trained_length) const {
  return RtfParams(a_, std::move(b), h0_, form, trained_length);
}

void RtfParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
  const Index n = a_.cols();
  const Index m = a_.rows();
  const Index d = b_.rows();
  if (n < 1) fail("state size must be positive");
  if (m < 1 || d < 1) fail("channel and denominator counts must be positive");
  if (b_.cols() != n) fail("numerator width differs from state size");
  if (h0_.size() != d) fail("h0 length differs from channel count");
  if (d % m != 0) fail("num_denominators must divide channels");
  if (!a_.allFinite() || !b_.allFinite() || !h0_.allFinite())
    fail("coefficients must be finite");
  if (form_ == NumeratorForm::truncated) {
    if (!trained_length_ || *trained_length_ < 1)
      fail("truncated numerator requires a positive trained_length");
  } else if (trained_length_) {
    fail("trained_length is only meaningful for truncated numerators");
  }
}

Kernel series_expand(const RtfParams& params, Index length) {
  if (params.numerator_form() != NumeratorForm::corrected)
    throw Error(ErrorCode::TruncatedFormNotExpandable,
                "correct the numerator before expanding the series");
  if (length < 1) throw Error(ErrorCode::LengthTooShort, "length must be >= 1");
  RowMajorXd out(params.channels(), length);
  for (Index c = 0; c < params.channels(); ++c) {
    out.row(c) = expand_series(params.a().row(params.denominator_row(c)).transpose(),
                               params.b().row(c).transpose(), params.h0()(c), length)
                     .transpose();
  }
  return Kernel(std::move(out));
}

Complex eval_tf(const RtfParams& params, Index channel, Complex z) {
  const Index n = params.state_size();
  const Index row = params.denominator_row(channel);
  const Complex w = 1.0 / z;
  // Horner in w = z^-1, highest delay first.
  Complex den(0.0), num(0.0);
  for (Index k = n; k >= 1; --k) {
    den = den * w + params.a()(row, k - 1);
    num = num * w + params.b()(channel, k - 1);
  }
  den = den * w + 1.0;
  num = num * w;
  if (std::abs(den) <= 1e-300)
    throw Error(ErrorCode::PoleAtEvaluationPoint, "denominator vanishes at z");
  return params.h0()(channel) + num / den;
}

Kernel alias_fold(const Kernel& kernel, Index period) {
  if (period < 1 || kernel.length() % period != 0)
    throw Error(ErrorCode::LengthMismatch, "kernel length is not a multiple of the period");
  RowMajorXd out = RowMajorXd::Zero(kernel.channels(), period);
  for (Index j = 0; j < kernel.length() / period; ++j)
    out += kernel.values.middleCols(j * period, period);
  return Kernel(std::move(out));
}

}  // namespace rtf
