#pragma once

#include "rtf/core.hpp"

namespace rtf {

// Transfer-function values at the m-th roots of unity, one row per channel.
// Bin k corresponds to z = e^{2 pi i k / m}.
struct Spectrum {
  RowMajorXcd bins;

  Index size() const { return bins.cols(); }
  Index channels() const { return bins.rows(); }
};

// Evaluates sum_k coeffs_k z^{-tk} at every m-th root of unity (m = coeffs.size()).
Spectrum fft_roots_eval(const VectorXd& coeffs);

// Inverse of fft_roots_eval for one channel of a real-coefficient spectrum.
VectorXd spectrum_to_coeffs(const Spectrum& spectrum, Index channel = 0);

// H(z) = FFT(b)/FFT(a) + h0 at the `length`-th roots of unity.
Spectrum transfer_spectrum(const RtfParams& params, Index length);

// State-free kernel generation. For truncated-form parameters trained at
// `length` the result is the exact truncated impulse response; for the
// corrected form it is the time-aliased sum_j h_{t + j*length}.
Kernel kernel_generate(const RtfParams& params, Index length);

// Causal linear convolution y_t = sum_{j<=t} h_{t-j} u_j. Kernels shorter
// than the signal are zero-padded; extra kernel samples are ignored.
Signal fft_conv(const Signal& u, const Kernel& h);

// FFT size used by fft_conv for a length-L signal (>= 2L).
Index conv_fft_length(Index length);

}  // namespace rtf
