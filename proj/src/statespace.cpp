#include "rtf/statespace.hpp"

#include <Eigen/LU>

#include "rtf/spectral.hpp"

namespace rtf {

namespace {

// r <- r A for the companion matrix: (r A)_j = -r_1 a_j + r_{j+1}.
void advance_row(const VectorXd& a, VectorXd& r, VectorXd& scratch) {
  const Index n = a.size();
  for (Index j = 0; j < n; ++j) scratch(j) = -r(0) * a(j) + (j + 1 < n ? r(j + 1) : 0.0);
  r.swap(scratch);
}

VectorXd row_times_power(const VectorXd& a, const VectorXd& row, Index power) {
  VectorXd r = row;
  VectorXd scratch(a.size());
  for (Index s = 0; s < power; ++s) advance_row(a, r, scratch);
  return r;
}

// A^power assembled from the rows e_1^T A^k: row i of A^p is e_{i-p}^T when
// i >= p, else e_1^T A^{p-i} (0-based i).
MatrixXd structured_power(const VectorXd& a, Index power) {
  const Index n = a.size();
  MatrixXd out = MatrixXd::Zero(n, n);
  for (Index i = power; i < n; ++i) out(i, i - power) = 1.0;
  const Index top = std::min(power, n);  // rows 0..top-1 need e_1^T A^{power - i}
  if (top == 0) return out;
  VectorXd r = row_times_power(a, VectorXd::Unit(n, 0), power - top + 1);
  VectorXd scratch(n);
  for (Index i = top - 1; i >= 0; --i) {
    out.row(i) = r.transpose();
    if (i > 0) advance_row(a, r, scratch);
  }
  return out;
}

}  // namespace

CompanionSsm<double> companion_realize(const RtfParams& params, Index channel) {
  if (params.numerator_form() != NumeratorForm::corrected)
    throw Error(ErrorCode::NeedsCorrectedNumerator,
                "companion realization needs the corrected numerator");
  CompanionSsm<double> ssm;
  ssm.a = params.denominator(channel);
  ssm.b = params.numerator(channel);
  ssm.h0 = params.h0()(channel);
  return ssm;
}

VectorXd truncate_numerator(const VectorXd& a, const VectorXd& b, Index trained_length) {
  if (trained_length < 1)
    throw Error(ErrorCode::LengthTooShort, "trained length must be >= 1");
  return b - row_times_power(a, b, trained_length);
}

double aliased_sample(const VectorXd& a, const VectorXd& b, Index trained_length) {
  if (trained_length < 1) return 0.0;
  // h_L = b A^{L-1} e_1
  return row_times_power(a, b, trained_length - 1)(0);
}

VectorXd correct_numerator(const VectorXd& a, const VectorXd& b_truncated,
                           Index trained_length) {
  if (trained_length < 1)
    throw Error(ErrorCode::LengthTooShort, "trained length must be >= 1");
  const Index n = a.size();
  const MatrixXd power = structured_power(a, trained_length);
  const MatrixXd system = MatrixXd::Identity(n, n) - power;
  // Row-vector system b M = b~  <=>  M^T b^T = b~^T.
  Eigen::PartialPivLU<MatrixXd> lu(system.transpose());
  // LU's rcond is scale-free, so a system that is pure cancellation noise
  // (pole^L == 1 up to roundoff) can look well conditioned. Measure the
  // inverse against the scale of I and A^L instead.
  const double norm = system.cwiseAbs().colwise().sum().maxCoeff();
  const double input_scale = 1.0 + power.cwiseAbs().colwise().sum().maxCoeff();
  const double rcond = lu.rcond() * norm / input_scale;
  if (!(rcond >= 1e-12))
    throw Error(ErrorCode::NearSingularCorrection,
                "I - A^L is numerically singular (a pole^L is close to 1)");
  return lu.solve(b_truncated);
}

RtfParams to_truncated(const RtfParams& params, Index trained_length) {
  if (params.numerator_form() == NumeratorForm::truncated) {
    if (params.trained_length() == trained_length) return params;
    return to_truncated(to_corrected(params), trained_length);
  }
  RowMajorXd b(params.b().rows(), params.b().cols());
  VectorXd h0 = params.h0();
  for (Index c = 0; c < params.channels(); ++c) {
    const VectorXd a = params.denominator(c);
    b.row(c) = truncate_numerator(a, params.numerator(c), trained_length).transpose();
    h0(c) -= aliased_sample(a, params.numerator(c), trained_length);
  }
  return RtfParams(params.a(), std::move(b), std::move(h0), NumeratorForm::truncated,
                   trained_length);
}

RtfParams to_corrected(const RtfParams& params) {
  if (params.numerator_form() == NumeratorForm::corrected) return params;
  const Index len = *params.trained_length();
  RowMajorXd b(params.b().rows(), params.b().cols());
  VectorXd h0 = params.h0();
  for (Index c = 0; c < params.channels(); ++c) {
    const VectorXd a = params.denominator(c);
    const VectorXd corrected = correct_numerator(a, params.numerator(c), len);
    h0(c) += aliased_sample(a, corrected, len);
    b.row(c) = corrected.transpose();
  }
  return RtfParams(params.a(), std::move(b), std::move(h0), NumeratorForm::corrected,
                   std::nullopt);
}

Signal apply_recurrent(const RtfParams& params, const Signal& u) {
  if (u.channels() != params.channels())
    throw Error(ErrorCode::ChannelMismatch, "signal and parameter channel counts differ");
  const RtfParams corrected = to_corrected(params);
  RowMajorXd y(u.channels(), u.length());
  for (Index c = 0; c < u.channels(); ++c) {
    const CompanionSsm<double> ssm = companion_realize(corrected, c);
    StateVector<double> x = StateVector<double>::Zero(ssm.state_size());
    for (Index t = 0; t < u.length(); ++t) y(c, t) = step(ssm, x, u.values(c, t));
  }
  return Signal(std::move(y));
}

Signal apply_fft(const RtfParams& params, const Signal& u) {
  if (u.channels() != params.channels())
    throw Error(ErrorCode::ChannelMismatch, "signal and parameter channel counts differ");
  const Index len = std::max(u.length(), params.state_size() + 1);
  const RtfParams truncated = to_truncated(params, len);
  return fft_conv(u, kernel_generate(truncated, len));
}

}  // namespace rtf
