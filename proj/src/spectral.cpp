#include "rtf/spectral.hpp"

#include <cmath>

#include "rtf/fft.hpp"

namespace rtf {

Spectrum fft_roots_eval(const VectorXd& coeffs) {
  Spectrum s;
  s.bins = fft::forward(coeffs, coeffs.size()).transpose();
  return s;
}

VectorXd spectrum_to_coeffs(const Spectrum& spectrum, Index channel) {
  return fft::inverse_real(spectrum.bins.row(channel).transpose());
}

namespace {

constexpr double kSpectralFloor = 1e-300;

VectorXcd denominator_bins(const RtfParams& params, Index row, Index length) {
  VectorXd padded = VectorXd::Zero(length);
  padded(0) = 1.0;
  padded.segment(1, params.state_size()) = params.a().row(row).transpose();
  VectorXcd bins = fft::forward(padded, length);
  for (Index k = 0; k < length; ++k) {
    if (std::abs(bins(k)) <= kSpectralFloor)
      throw Error(ErrorCode::DenominatorZeroOnUnitCircle,
                  "denominator has a root at a root of unity");
  }
  return bins;
}

}  // namespace

Spectrum transfer_spectrum(const RtfParams& params, Index length) {
  const Index n = params.state_size();
  if (length < n + 1)
    throw Error(ErrorCode::LengthTooShort, "kernel length must be at least n + 1");
  Spectrum s;
  s.bins.resize(params.channels(), length);
  VectorXd padded = VectorXd::Zero(length);
  Index cached_row = -1;
  VectorXcd den;
  for (Index c = 0; c < params.channels(); ++c) {
    const Index row = params.denominator_row(c);
    if (row != cached_row) {
      den = denominator_bins(params, row, length);
      cached_row = row;
    }
    padded.setZero();
    padded.segment(1, n) = params.b().row(c).transpose();
    VectorXcd num = fft::forward(padded, length);
    s.bins.row(c) = (num.array() / den.array() + params.h0()(c)).transpose();
  }
  return s;
}

Kernel kernel_generate(const RtfParams& params, Index length) {
  const Spectrum s = transfer_spectrum(params, length);
  RowMajorXd out(params.channels(), length);
  for (Index c = 0; c < params.channels(); ++c)
    out.row(c) = spectrum_to_coeffs(s, c).transpose();
  return Kernel(std::move(out));
}

Index conv_fft_length(Index length) { return fft::next_pow2(2 * length); }

Signal fft_conv(const Signal& u, const Kernel& h) {
  if (u.channels() != h.channels())
    throw Error(ErrorCode::ChannelMismatch, "signal and kernel channel counts differ");
  const Index len = u.length();
  RowMajorXd y(u.channels(), len);
  if (len == 0) return Signal(std::move(y));
  const Index nfft = conv_fft_length(len);
  const Index taps = std::min(len, h.length());
  for (Index c = 0; c < u.channels(); ++c) {
    VectorXcd uf = fft::forward(u.values.row(c).transpose(), nfft);
    VectorXcd hf = fft::forward(h.values.row(c).head(taps).transpose(), nfft);
    VectorXd full = fft::inverse_real(uf.cwiseProduct(hf));
    y.row(c) = full.head(len).transpose();
  }
  return Signal(std::move(y));
}

}  // namespace rtf
