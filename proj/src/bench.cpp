#include "rtf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "rtf/spectral.hpp"
#include "rtf/statespace.hpp"

namespace rtf {

namespace {

constexpr double kRingRadius = 0.5;
constexpr int kWarmups = 2;

using HistoryView = Eigen::Ref<MatrixX<Complex>, 0, Eigen::OuterStride<>>;

void scan_channel(const ModalParams& modal, const double* u, double* y, Index len,
                  HistoryView history) {
  const Index n = modal.state_size();
  // history column t holds the state x_t.
  history.col(0).setZero();
  for (Index t = 0; t + 1 < len; ++t)
    history.col(t + 1) = modal.poles.cwiseProduct(history.col(t)).array() + u[t];
  for (Index t = 0; t < len; ++t) {
    Complex acc(0.0);
    for (Index i = 0; i < n; ++i) acc += modal.residues(i) * history(i, t);
    y[t] = modal.h0 * u[t] + acc.real();
  }
}

// Ring system: a = (0, ..., 0, -rho), poles rho^{1/n} e^{2 pi i k / n}.
RtfParams ring_params(Index n, Index channels, std::mt19937_64& rng) {
  RowMajorXd a = RowMajorXd::Zero(1, n);
  a(0, n - 1) = -kRingRadius;
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(double(n)));
  RowMajorXd b(channels, n);
  for (Index i = 0; i < b.size(); ++i) b.data()[i] = normal(rng);
  VectorXd h0(channels);
  for (Index c = 0; c < channels; ++c) h0(c) = normal(rng);
  return RtfParams(std::move(a), std::move(b), std::move(h0));
}

// Residue of B(z)/A(z) at a ring pole: z^n N(lambda) / (n lambda^{n-1}) with
// N(z) = b_1 z^{n-1} + ... + b_n and z^n A(z) = z^n - rho.
ModalParams ring_modal(const RtfParams& params, Index channel) {
  const Index n = params.state_size();
  ModalParams modal;
  modal.h0 = params.h0()(channel);
  modal.poles.resize(n);
  modal.residues.resize(n);
  const double radius = std::pow(kRingRadius, 1.0 / double(n));
  for (Index k = 0; k < n; ++k) {
    const Complex lambda =
        std::polar(radius, 2.0 * std::numbers::pi * double(k) / double(n));
    Complex num(0.0);
    for (Index j = 0; j < n; ++j) num = num * lambda + params.b()(channel, j);
    // lambda^{n-1} = rho / lambda
    modal.poles(k) = lambda;
    modal.residues(k) = num * lambda / (double(n) * kRingRadius);
  }
  return modal;
}

template <typename F>
double median_ms(int repeats, F&& run) {
  for (int i = 0; i < kWarmups; ++i) run();
  std::vector<double> ms;
  ms.reserve(std::size_t(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    run();
    ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count());
  }
  std::sort(ms.begin(), ms.end());
  const std::size_t mid = ms.size() / 2;
  const double med = ms.size() % 2 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
  // Timer granularity can report zero for tiny cells.
  return std::max(med, 1e-6);
}

}  // namespace

ScanResult scan_baseline_apply(const std::vector<ModalParams>& modal, const Signal& u) {
  if (Index(modal.size()) != u.channels())
    throw Error(ErrorCode::ChannelMismatch, "one modal system per channel is required");
  const Index len = u.length();
  Index n = 0;
  for (const ModalParams& m : modal) n = std::max(n, m.state_size());
  MatrixX<Complex> history(n, std::max<Index>(len, 1));
  RowMajorXd y(u.channels(), len);
  for (Index c = 0; c < u.channels(); ++c) {
    const ModalParams& m = modal[std::size_t(c)];
    if (len > 0) scan_channel(m, &u.values(c, 0), &y(c, 0), len, history.topRows(m.state_size()));
  }
  return {Signal(std::move(y)), scan_buffer_bytes(len, n)};
}

ScanResult scan_baseline_apply(const ModalParams& modal, const Signal& u) {
  return scan_baseline_apply(std::vector<ModalParams>(std::size_t(u.channels()), modal), u);
}

std::uint64_t rtf_buffer_bytes(Index seq_len, Index channels) {
  const auto len = std::uint64_t(seq_len);
  const auto d = std::uint64_t(channels);
  const auto nfft = std::uint64_t(conv_fft_length(seq_len));
  // kernel_generate: spectrum and kernel for all channels, plus one padded
  // coefficient vector and two coefficient spectra reused per channel.
  const std::uint64_t kernel = 16 * d * len + 8 * d * len + 8 * len + 32 * len;
  // fft_conv per channel: two padded real inputs and two spectra.
  const std::uint64_t conv = 2 * 8 * nfft + 2 * 16 * nfft;
  return kernel + conv;
}

std::uint64_t scan_buffer_bytes(Index seq_len, Index state_size) {
  return 16 * std::uint64_t(seq_len) * std::uint64_t(state_size);
}

std::uint64_t recurrent_buffer_bytes(Index state_size) { return 8 * std::uint64_t(state_size); }

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.repeats < 3) throw Error(ErrorCode::InvalidParams, "repeats must be >= 3");
  if (options.channels < 1) throw Error(ErrorCode::InvalidParams, "channels must be positive");
  std::mt19937_64 rng(options.seed);
  std::vector<BenchRow> rows;
  const Index d = options.channels;
  for (Index len : options.lengths) {
    for (Index n : options.state_sizes) {
      if (len < n + 1 || n < 1) continue;
      const RtfParams corrected = ring_params(n, d, rng);
      const RtfParams truncated = to_truncated(corrected, len);
      std::vector<ModalParams> modal;
      for (Index c = 0; c < d; ++c) modal.push_back(ring_modal(corrected, c));
      RowMajorXd uv(d, len);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Index i = 0; i < uv.size(); ++i) uv.data()[i] = normal(rng);
      const Signal u(std::move(uv));

      Signal y_rtf, y_scan, y_rec;
      const double rtf_ms =
          median_ms(options.repeats, [&] { y_rtf = fft_conv(u, kernel_generate(truncated, len)); });
      const double scan_ms =
          median_ms(options.repeats, [&] { y_scan = scan_baseline_apply(modal, u).y; });
      const double rec_ms = median_ms(options.repeats, [&] {
        RowMajorXd y(d, len);
        for (Index c = 0; c < d; ++c) {
          const CompanionSsm<double> ssm = companion_realize(corrected, c);
          StateVector<double> x = StateVector<double>::Zero(n);
          for (Index t = 0; t < len; ++t) y(c, t) = step(ssm, x, u.values(c, t));
        }
        y_rec = Signal(std::move(y));
      });

      auto deviation = [&](const Signal& y) {
        return (y.values - y_rtf.values).cwiseAbs().maxCoeff();
      };
      rows.push_back({"rtf", len, n, d, rtf_ms, rtf_buffer_bytes(len, d), 0.0});
      rows.push_back({"scan_modal", len, n, d, scan_ms, scan_buffer_bytes(len, n),
                      deviation(y_scan)});
      rows.push_back({"recurrent", len, n, d, rec_ms, recurrent_buffer_bytes(n),
                      deviation(y_rec)});
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "method,seq_len,state_size,channels,wall_ms_median,buffer_bytes\n";
  char ms[64];
  for (const BenchRow& r : rows) {
    std::snprintf(ms, sizeof ms, "%.17g", r.wall_ms_median);
    out << r.method << ',' << r.seq_len << ',' << r.state_size << ',' << r.channels << ','
        << ms << ',' << r.buffer_bytes << '\n';
  }
}

}  // namespace rtf
