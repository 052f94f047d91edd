#include "rtf/fft.hpp"

#include <type_traits>

#include <unsupported/Eigen/FFT>

namespace rtf::fft {
namespace {

// Eigen::FFT caches plans internally and is not safe to share across threads.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

// kissfft dereferences an empty twiddle table at length 1, where the DFT is
// the identity anyway.
template <typename Out, typename In>
void fwd(Out& out, In& in) {
  if (in.size() == 1) out(0) = in(0);
  else if (in.size() > 1) engine().fwd(out.data(), in.data(), in.size());
}

template <typename Out, typename In>
void inv(Out& out, In& in) {
  if (in.size() == 1) {
    if constexpr (std::is_same_v<typename Out::Scalar, double>) out(0) = in(0).real();
    else out(0) = in(0);
  } else if (in.size() > 1) engine().inv(out.data(), in.data(), in.size());
}

}  // namespace

VectorXcd forward(const Eigen::Ref<const VectorXd>& x, Index nfft) {
  VectorXd padded = VectorXd::Zero(nfft);
  const Index n = std::min(nfft, x.size());
  padded.head(n) = x.head(n);
  VectorXcd out(nfft);
  fwd(out, padded);
  return out;
}

VectorXcd forward(const Eigen::Ref<const VectorXcd>& x) {
  VectorXcd in = x;
  VectorXcd out(in.size());
  fwd(out, in);
  return out;
}

VectorXd inverse_real(const Eigen::Ref<const VectorXcd>& spectrum) {
  VectorXcd in = spectrum;
  VectorXd out(in.size());
  inv(out, in);
  return out;
}

VectorXcd inverse(const Eigen::Ref<const VectorXcd>& spectrum) {
  VectorXcd in = spectrum;
  VectorXcd out(in.size());
  inv(out, in);
  return out;
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace rtf::fft
