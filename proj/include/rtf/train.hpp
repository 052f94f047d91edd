#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtf/core.hpp"
#include "rtf/stability.hpp"

namespace rtf {

struct TrainConfig {
  Index state_size = 128;
  Index channels = 4;
  Index num_denominators = 0;  // 0 = one denominator per channel
  Index seq_len = 512;
  Index delay = 64;
  double band_fraction = 1.0;
  double learning_rate = 1e-2;
  Index steps = 2000;
  Index batch_size = 8;
  std::uint64_t seed = 0;
  bool project_montel = false;

  Index denominators() const { return num_denominators > 0 ? num_denominators : channels; }
  // Throws InvalidParams.
  void validate() const;
};

struct DelaySample {
  Signal u;
  Signal target;
};

// Unit-variance Gaussian noise, low-passed by zeroing every FFT bin above
// band_fraction * Nyquist; target_t = u_{t - delay}, zero before.
// Deterministic in (config.seed, sample_index).
DelaySample delay_dataset(const TrainConfig& config, std::uint64_t sample_index);

struct AdamMoments {
  VectorXd first;
  VectorXd second;

  static AdamMoments zeros(Index size) {
    return {VectorXd::Zero(size), VectorXd::Zero(size)};
  }
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam step; `step` counts from 1.
void adam_update(VectorXd& params, const VectorXd& grads, AdamMoments& moments,
                 Index step, double learning_rate, const AdamHyper& hyper = {});

struct TrainReport {
  std::vector<double> loss_trace;
  double final_rmse = 0.0;
  RtfParams final_params;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

// RMSE over t in [delay, seq_len) on a fixed held-out batch.
double delay_rmse(const TrainConfig& config, const RtfParams& params);

// Single SISO layer per channel, zero init, Adam on (a, b~, h0), loss = MSE
// over t >= delay.
TrainReport train_delay(const TrainConfig& config);

struct DistillOptions {
  Index iterations = 5000;
  double learning_rate = 1e-2;
  // Random schemes carry their own seed.
  InitScheme init = ZeroInit{};
};

struct DistillResult {
  RtfParams params;
  double mse = 0.0;
  std::vector<double> loss_trace;
};

// Fits truncated-form params so that kernel_generate(params, L) matches the
// target (L = target length); returns the best iterate seen.
DistillResult distill(const Kernel& target, Index state_size, const DistillOptions& options = {});

}  // namespace rtf
