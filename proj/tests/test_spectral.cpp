#include <gtest/gtest.h>

#include "rtf/spectral.hpp"
#include "rtf/stability.hpp"
#include "rtf/statespace.hpp"
#include "support/test_support.hpp"

namespace rtf {
namespace {

using testing::Rng;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an rtf::Error";
  return ErrorCode::IoError;
}

TEST(FftRootsEval, Examples) {
  const Spectrum c = fft_roots_eval((VectorXd(5) << 3, 0, 0, 0, 0).finished());
  for (Index k = 0; k < 5; ++k) EXPECT_NEAR(std::abs(c.bins(0, k) - 3.0), 0.0, 1e-15);
  const Spectrum d = fft_roots_eval((VectorXd(2) << 0, 1).finished());
  EXPECT_NEAR(std::abs(d.bins(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d.bins(0, 1) + 1.0), 0.0, 1e-15);
  const VectorXd x = (VectorXd(4) << 1, 2, 3, 4).finished();
  const VectorXcd want = testing::direct_dft(x);
  EXPECT_NEAR(std::abs(want(1) - Complex(-2, 2)), 0.0, 1e-12);
  EXPECT_LE(testing::max_abs_error(fft_roots_eval(x).bins.row(0).transpose(), want), 1e-12);
}

TEST(FftRootsEval, MatchesDirectDftAndRoundTrips) {
  Rng rng(2);
  for (Index m : {1, 2, 3, 7, 16, 100, 257}) {
    VectorXd v(m);
    for (Index i = 0; i < m; ++i) v(i) = testing::gaussian(rng);
    const Spectrum s = fft_roots_eval(v);
    EXPECT_LE(testing::max_rel_error(s.bins.row(0).transpose(), testing::direct_dft(v)), 1e-12);
    EXPECT_LE(testing::max_rel_error(spectrum_to_coeffs(s), v), 1e-12);
    for (Index k = 1; k < m; ++k)
      EXPECT_LE(std::abs(s.bins(0, k) - std::conj(s.bins(0, m - k))),
                1e-12 * s.bins.cwiseAbs().maxCoeff());
  }
}

TEST(KernelGenerate, Examples) {
  const RtfParams zero = initialize(ZeroInit{}, 3, 2, 1);
  RowMajorXd delta = RowMajorXd::Zero(2, 8);
  delta.col(0).setOnes();
  EXPECT_LE(testing::max_abs_error(kernel_generate(zero, 8).values, delta), 1e-15);

  const RtfParams fir = RtfParams::siso(VectorXd::Zero(2), (VectorXd(2) << 3, 4).finished(), 2.0);
  EXPECT_LE(testing::max_abs_error(kernel_generate(fir, 4).values,
                                   (RowMajorXd(1, 4) << 2, 3, 4, 0).finished()),
            1e-14);
}

// Corrected form gives the time-aliased kernel. Oracle: alias_fold of the
// exact series over 64 periods, plus the closed form 0.5^{t-1} / (1 - 0.5^4)
// with bin 0 collecting h_4 + h_8 + ... = 0.5^3 / (1 - 0.5^4).
TEST(KernelGenerate, CorrectedFormIsAliased) {
  const RtfParams p = RtfParams::siso(VectorXd::Constant(1, -0.5), VectorXd::Ones(1), 0.0);
  const Kernel got = kernel_generate(p, 4);
  const Kernel oracle = alias_fold(series_expand(p, 4 * 64), 4);
  EXPECT_LE(testing::max_abs_error(got.values, oracle.values), 1e-15);
  const RowMajorXd closed = (RowMajorXd(1, 4) << 2.0 / 15, 16.0 / 15, 8.0 / 15, 4.0 / 15).finished();
  EXPECT_LE(testing::max_abs_error(got.values, closed), 1e-15);
}

TEST(KernelGenerate, Errors) {
  const RtfParams p = RtfParams::siso(VectorXd::Zero(4), VectorXd::Zero(4), 1.0);
  EXPECT_EQ(code_of([&] { kernel_generate(p, 4); }), ErrorCode::LengthTooShort);
  // 1 + z^-1 vanishes at z = -1, which is a root of unity for even L.
  const RtfParams q = RtfParams::siso(VectorXd::Ones(1), VectorXd::Ones(1), 0.0);
  EXPECT_EQ(code_of([&] { kernel_generate(q, 8); }), ErrorCode::DenominatorZeroOnUnitCircle);
}

TEST(KernelGenerate, TruncationIdentity) {
  Rng rng(3);
  for (Index len : {64, 256, 1024}) {
    for (int i = 0; i < 10; ++i) {
      const Index n = 1 + Index(rng() % 32);
      const RtfParams p = testing::random_stable_params(n, rng, 2);
      const Kernel want = series_expand(p, len);
      EXPECT_LE(testing::max_rel_error(kernel_generate(to_truncated(p, len), len).values,
                                       want.values),
                1e-9)
          << "n=" << n << " L=" << len;
    }
  }
}

// The numerator map alone reproduces every sample but t = 0, which picks up
// the folded sample h_L; to_truncated moves that into h0.
TEST(KernelGenerate, BareNumeratorTruncationFoldsOneSample) {
  Rng rng(4);
  const Index len = 64;
  for (int i = 0; i < 10; ++i) {
    const Index n = 1 + Index(rng() % 8);
    const RtfParams p = testing::random_stable_params(n, rng);
    const VectorXd a = p.a().row(0).transpose();
    const VectorXd bt = truncate_numerator(a, p.b().row(0).transpose(), len);
    const RtfParams bare = RtfParams::siso(a, bt, p.h0()(0), NumeratorForm::truncated, len);
    const Kernel got = kernel_generate(bare, len);
    const Kernel want = series_expand(p, len + 1);
    const double scale = want.values.cwiseAbs().maxCoeff();
    EXPECT_LE(std::abs(got.values(0, 0) - want.values(0, 0) - want.values(0, len)), 1e-12 * scale);
    EXPECT_LE((got.values.rightCols(len - 1) - want.values.middleCols(1, len - 1)).cwiseAbs().maxCoeff(),
              1e-12 * scale);
  }
}

TEST(KernelGenerate, AliasIdentity) {
  Rng rng(6);
  for (Index len : {512, 1024}) {
    for (int i = 0; i < 8; ++i) {
      const Index n = 1 + Index(rng() % 16);
      const RtfParams p = testing::random_stable_params(n, rng, 1, 1, 0.99);
      const Kernel oracle = alias_fold(series_expand(p, 8 * len), len);
      EXPECT_LE(testing::max_abs_error(kernel_generate(p, len).values, oracle.values), 1e-9);
    }
  }
}

TEST(KernelGenerate, SpectrumIsConjugateSymmetric) {
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const RtfParams p = testing::random_stable_params(1 + Index(rng() % 8), rng, 3);
    const Spectrum s = transfer_spectrum(p, 63);
    const double scale = s.bins.cwiseAbs().maxCoeff();
    for (Index c = 0; c < 3; ++c)
      for (Index k = 1; k < 63; ++k)
        EXPECT_LE(std::abs(s.bins(c, k) - std::conj(s.bins(c, 63 - k))), 1e-12 * scale);
  }
}

TEST(FftConv, Examples) {
  Rng rng(8);
  const Signal u = testing::random_signal(2, 10, rng);
  RowMajorXd delta = RowMajorXd::Zero(2, 10);
  delta.col(0).setOnes();
  EXPECT_LE(testing::max_abs_error(fft_conv(u, Kernel(delta)).values, u.values), 1e-15);

  RowMajorXd shift = RowMajorXd::Zero(2, 10);
  shift.col(1).setOnes();
  const Signal y = fft_conv(u, Kernel(shift));
  EXPECT_NEAR(y.values(0, 0), 0.0, 1e-15);
  EXPECT_LE(testing::max_abs_error(y.values.rightCols(9), u.values.leftCols(9)), 1e-15);

  const Signal small((RowMajorXd(1, 3) << 1, 2, 3).finished());
  EXPECT_LE(testing::max_abs_error(fft_conv(small, Kernel((RowMajorXd(1, 3) << 1, 1, 0).finished())).values,
                                   (RowMajorXd(1, 3) << 1, 3, 5).finished()),
            1e-14);
}

TEST(FftConv, ChannelMismatch) {
  EXPECT_EQ(code_of([] { fft_conv(Signal(RowMajorXd::Zero(2, 4)), Kernel(RowMajorXd::Zero(1, 4))); }),
            ErrorCode::ChannelMismatch);
}

TEST(FftConv, MatchesDirectSummation) {
  Rng rng(9);
  for (Index len : {1, 2, 5, 64, 333, 1024, 4096}) {
    const Signal u = testing::random_signal(2, len, rng);
    const Kernel h(testing::random_signal(2, len, rng).values);
    EXPECT_LE(testing::max_rel_error(fft_conv(u, h).values, testing::direct_conv(u.values, h.values)),
              1e-10);
  }
  // Shorter and longer kernels.
  const Signal u = testing::random_signal(1, 50, rng);
  for (Index taps : {3, 80}) {
    const Kernel h(testing::random_signal(1, taps, rng).values);
    EXPECT_LE(testing::max_rel_error(fft_conv(u, h).values, testing::direct_conv(u.values, h.values)),
              1e-10);
  }
}

TEST(FftConv, LongSequenceAgainstSegmentOracle) {
  // 2^16 samples: check a strided subset of outputs by direct summation.
  Rng rng(10);
  const Index len = Index(1) << 16;
  const Signal u = testing::random_signal(1, len, rng);
  RowMajorXd hv(1, len);
  for (Index t = 0; t < len; ++t) hv(0, t) = testing::gaussian(rng) * std::exp(-double(t) / 2000.0);
  const Signal y = fft_conv(u, Kernel(hv));
  double worst = 0.0, scale = 0.0;
  for (Index t = 0; t < len; t += 4099) {
    double acc = 0.0;
    for (Index j = 0; j <= t; ++j) acc += hv(0, t - j) * u.values(0, j);
    worst = std::max(worst, std::abs(acc - y.values(0, t)));
    scale = std::max(scale, std::abs(acc));
  }
  EXPECT_LE(worst, 1e-10 * scale);
}

TEST(FftConv, Causality) {
  Rng rng(12);
  for (int i = 0; i < 5; ++i) {
    const Index len = 200;
    Signal u = testing::random_signal(1, len, rng);
    const Kernel h(testing::random_signal(1, len, rng).values);
    const Signal base = fft_conv(u, h);
    const Index j = Index(rng() % len);
    u.values(0, j) += 1.0;
    const Signal moved = fft_conv(u, h);
    if (j > 0)
      EXPECT_LE((moved.values.leftCols(j) - base.values.leftCols(j)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(std::abs(moved.values(0, j) - base.values(0, j)), 1e-6 * std::abs(h.values(0, 0)));
  }
}

TEST(FftConv, LengthIsPowerOfTwoAtLeastTwiceSignal) {
  for (Index len : {1, 3, 64, 100, 4096}) {
    const Index m = conv_fft_length(len);
    EXPECT_GE(m, 2 * len);
    EXPECT_EQ(m & (m - 1), 0);
  }
}

}  // namespace
}  // namespace rtf
