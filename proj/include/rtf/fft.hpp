#pragma once

#include "rtf/types.hpp"

// Thin wrappers over Eigen's FFT module. Forward transforms use the
// e^{-2 pi i k t / m} sign convention and return the full spectrum; the
// inverse is scaled by 1/m.
namespace rtf::fft {

// Forward transform of x zero-padded (or truncated) to nfft samples.
VectorXcd forward(const Eigen::Ref<const VectorXd>& x, Index nfft);

VectorXcd forward(const Eigen::Ref<const VectorXcd>& x);

// Inverse of a conjugate-symmetric full spectrum; only bins 0..nfft/2 are read.
VectorXd inverse_real(const Eigen::Ref<const VectorXcd>& spectrum);

VectorXcd inverse(const Eigen::Ref<const VectorXcd>& spectrum);

// Smallest power of two >= n.
Index next_pow2(Index n);

}  // namespace rtf::fft
