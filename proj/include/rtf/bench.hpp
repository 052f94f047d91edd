#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtf/convert.hpp"

namespace rtf {

struct BenchRow {
  std::string method;  // rtf, scan_modal or recurrent
  Index seq_len = 0;
  Index state_size = 0;
  Index channels = 0;
  double wall_ms_median = 0.0;
  std::uint64_t buffer_bytes = 0;
  // Max |y - y_rtf| over the cell; not part of the CSV.
  double max_abs_deviation = 0.0;
};

struct ScanResult {
  Signal y;
  std::uint64_t buffer_bytes = 0;
};

// Diagonal recurrence x_{t+1} = lambda . x_t + u_t with the whole L x n
// complex state history kept, then y_t = h0 u_t + Re(r . x_t). Every channel
// of u goes through the same modal system; the history buffer is reused
// across channels.
ScanResult scan_baseline_apply(const ModalParams& modal, const Signal& u);

// Per-channel variant: channel c uses modal[c].
ScanResult scan_baseline_apply(const std::vector<ModalParams>& modal, const Signal& u);

// Working-buffer accounting. Input, output and parameter arrays are shared
// by all methods and not counted.
std::uint64_t rtf_buffer_bytes(Index seq_len, Index channels);
std::uint64_t scan_buffer_bytes(Index seq_len, Index state_size);
std::uint64_t recurrent_buffer_bytes(Index state_size);

struct BenchOptions {
  std::vector<Index> lengths;
  std::vector<Index> state_sizes;
  Index channels = 1;
  int repeats = 7;
  std::uint64_t seed = 0;
};

// One row per (method, length, state size) cell. Cells with length < n + 1
// are skipped. The benchmarked system is the ring filter
// A(z) = 1 - 0.5 z^{-n} with random numerators, whose poles are known in
// closed form.
std::vector<BenchRow> run_bench(const BenchOptions& options);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace rtf
