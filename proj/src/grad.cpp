#include "rtf/grad.hpp"

#include <cmath>

#include "rtf/fft.hpp"
#include "rtf/spectral.hpp"

namespace rtf {

ParamGrads ParamGrads::zeros_like(const RtfParams& params) {
  ParamGrads g;
  g.grad_a = RowMajorXd::Zero(params.a().rows(), params.a().cols());
  g.grad_b = RowMajorXd::Zero(params.b().rows(), params.b().cols());
  g.grad_h0 = VectorXd::Zero(params.h0().size());
  return g;
}

ParamGrads& ParamGrads::operator+=(const ParamGrads& other) {
  grad_a += other.grad_a;
  grad_b += other.grad_b;
  grad_h0 += other.grad_h0;
  return *this;
}

ParamGrads kernel_backward(const RtfParams& params, const Kernel& grad_h, Index length) {
  const Index n = params.state_size();
  if (length < n + 1)
    throw Error(ErrorCode::LengthTooShort, "kernel length must be at least n + 1");
  if (grad_h.channels() != params.channels())
    throw Error(ErrorCode::ChannelMismatch, "gradient and parameter channel counts differ");
  if (grad_h.length() != length)
    throw Error(ErrorCode::LengthMismatch, "gradient length differs from kernel length");

  ParamGrads out = ParamGrads::zeros_like(params);
  VectorXd padded = VectorXd::Zero(length);
  for (Index c = 0; c < params.channels(); ++c) {
    const Index row = params.denominator_row(c);
    padded.setZero();
    padded(0) = 1.0;
    padded.segment(1, n) = params.a().row(row).transpose();
    const VectorXcd den = fft::forward(padded, length);
    if ((den.cwiseAbs().array() <= 1e-300).any())
      throw Error(ErrorCode::DenominatorZeroOnUnitCircle,
                  "denominator has a root at a root of unity");
    padded.setZero();
    padded.segment(1, n) = params.b().row(c).transpose();
    const VectorXcd num = fft::forward(padded, length);

    const VectorXcd g = fft::forward(grad_h.values.row(c).transpose(), length);
    const VectorXcd inv_den = den.cwiseInverse();
    const VectorXd corr_b = fft::inverse_real(g.cwiseProduct(inv_den.conjugate()));
    const VectorXcd ratio = num.cwiseProduct(inv_den).cwiseProduct(inv_den);
    const VectorXd corr_a = fft::inverse_real(g.cwiseProduct(ratio.conjugate()));

    out.grad_b.row(c) = corr_b.segment(1, n).transpose();
    out.grad_a.row(row) -= corr_a.segment(1, n).transpose();
    out.grad_h0(c) = grad_h.values(c, 0);
  }
  return out;
}

ConvGrads conv_backward(const Signal& u, const Kernel& h, const Signal& grad_y) {
  if (u.channels() != h.channels() || u.channels() != grad_y.channels())
    throw Error(ErrorCode::ChannelMismatch, "signal, kernel and gradient channel counts differ");
  if (grad_y.length() != u.length())
    throw Error(ErrorCode::LengthMismatch, "output gradient length differs from signal length");
  const Index len = u.length();
  const Index taps = std::min(len, h.length());
  ConvGrads out{Signal(RowMajorXd::Zero(u.channels(), len)),
                Kernel(RowMajorXd::Zero(h.channels(), h.length()))};
  if (len == 0) return out;
  const Index nfft = conv_fft_length(len);
  for (Index c = 0; c < u.channels(); ++c) {
    const VectorXcd gf = fft::forward(grad_y.values.row(c).transpose(), nfft);
    const VectorXcd uf = fft::forward(u.values.row(c).transpose(), nfft);
    const VectorXcd hf = fft::forward(h.values.row(c).head(taps).transpose(), nfft);
    out.grad_h.values.row(c).head(taps) =
        fft::inverse_real(gf.cwiseProduct(uf.conjugate())).head(taps).transpose();
    out.grad_u.values.row(c) =
        fft::inverse_real(gf.cwiseProduct(hf.conjugate())).head(len).transpose();
  }
  return out;
}

double fd_check(const std::function<double(const VectorXd&)>& objective,
                const VectorXd& point, const VectorXd& analytic, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidParams, "finite-difference step must be > 0");
  if (analytic.size() != point.size())
    throw Error(ErrorCode::LengthMismatch, "gradient and point sizes differ");
  double worst = 0.0;
  VectorXd x = point;
  for (Index i = 0; i < point.size(); ++i) {
    x(i) = point(i) + step;
    const double up = objective(x);
    x(i) = point(i) - step;
    const double down = objective(x);
    x(i) = point(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw Error(ErrorCode::NonFiniteObjective, "objective is not finite near the point");
    const double numeric = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic(i) - numeric) / std::max(1.0, std::abs(analytic(i))));
  }
  return worst;
}

VectorXd flatten(const RtfParams& params) {
  VectorXd flat(params.parameter_count());
  flat << params.a().reshaped<Eigen::RowMajor>(), params.b().reshaped<Eigen::RowMajor>(),
      params.h0();
  return flat;
}

VectorXd flatten(const ParamGrads& grads) {
  VectorXd flat(grads.grad_a.size() + grads.grad_b.size() + grads.grad_h0.size());
  flat << grads.grad_a.reshaped<Eigen::RowMajor>(), grads.grad_b.reshaped<Eigen::RowMajor>(),
      grads.grad_h0;
  return flat;
}

RtfParams unflatten(const RtfParams& like, const VectorXd& flat) {
  if (flat.size() != like.parameter_count())
    throw Error(ErrorCode::LengthMismatch, "flat parameter vector has the wrong size");
  const Index na = like.a().size();
  const Index nb = like.b().size();
  RowMajorXd a = flat.head(na).reshaped<Eigen::RowMajor>(like.a().rows(), like.a().cols());
  RowMajorXd b = flat.segment(na, nb).reshaped<Eigen::RowMajor>(like.b().rows(), like.b().cols());
  VectorXd h0 = flat.tail(like.h0().size());
  return RtfParams(std::move(a), std::move(b), std::move(h0), like.numerator_form(),
                   like.trained_length());
}

}  // namespace rtf
