#include "rtf/train.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "rtf/fft.hpp"
#include "rtf/grad.hpp"
#include "rtf/spectral.hpp"

namespace rtf {

namespace {

constexpr double kDivergenceLoss = 1e6;
// Held-out samples live far above any training index.
constexpr std::uint64_t kEvalOffset = std::uint64_t(1) << 40;
constexpr Index kEvalSamples = 16;

void project_denominators(RtfParams& params) {
  for (Index r = 0; r < params.a().rows(); ++r) {
    const double mass = params.a().row(r).cwiseAbs().sum();
    if (mass < 1.0) continue;
    VectorXd raw(params.state_size() + 1);
    raw << params.a().row(r).transpose(), 1e-6 * mass;
    params.a().row(r) = montel_project(raw).transpose();
  }
}

struct BatchLoss {
  double loss = 0.0;
  Kernel grad_h;
};

// Masked MSE of fft_conv(u, kernel) against the delayed targets.
BatchLoss delay_batch_loss(const TrainConfig& config, const Kernel& kernel,
                           std::uint64_t first_sample, Index samples, bool want_grad) {
  const Index len = config.seq_len;
  const Index masked = len - config.delay;
  const double count = double(samples * config.channels * masked);
  BatchLoss out;
  if (want_grad) out.grad_h = Kernel(RowMajorXd::Zero(config.channels, len));
  for (Index s = 0; s < samples; ++s) {
    const DelaySample sample = delay_dataset(config, first_sample + std::uint64_t(s));
    const Signal y = fft_conv(sample.u, kernel);
    RowMajorXd residual = y.values - sample.target.values;
    residual.leftCols(config.delay).setZero();
    out.loss += residual.squaredNorm() / count;
    if (want_grad) {
      const Signal grad_y(residual * (2.0 / count));
      out.grad_h.values += conv_backward(sample.u, kernel, grad_y).grad_h.values;
    }
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
  if (state_size < 1 || channels < 1 || seq_len < 1 || steps < 1 || batch_size < 1)
    fail("counts must be positive");
  if (delay < 0 || delay >= seq_len) fail("delay must lie in [0, seq_len)");
  if (!(band_fraction > 0.0 && band_fraction <= 1.0)) fail("band_fraction must lie in (0, 1]");
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (channels % denominators() != 0) fail("num_denominators must divide channels");
  if (seq_len < state_size + 1) fail("seq_len must be at least state_size + 1");
}

DelaySample delay_dataset(const TrainConfig& config, std::uint64_t sample_index) {
  const Index len = config.seq_len;
  std::seed_seq seq{std::uint32_t(config.seed), std::uint32_t(config.seed >> 32),
                    std::uint32_t(sample_index), std::uint32_t(sample_index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Index cutoff = Index(std::floor(config.band_fraction * double(len / 2)));
  RowMajorXd u(config.channels, len);
  for (Index c = 0; c < config.channels; ++c) {
    VectorXd noise(len);
    for (Index t = 0; t < len; ++t) noise(t) = normal(rng);
    if (cutoff < len / 2) {
      VectorXcd spec = fft::forward(noise, len);
      for (Index k = cutoff + 1; k < len - cutoff; ++k) spec(k) = 0.0;
      noise = fft::inverse_real(spec);
    }
    const double mean = noise.mean();
    const double sd = std::sqrt((noise.array() - mean).square().sum() / double(len));
    u.row(c) = (noise / sd).transpose();
  }
  RowMajorXd target = RowMajorXd::Zero(config.channels, len);
  target.rightCols(len - config.delay) = u.leftCols(len - config.delay);
  return {Signal(std::move(u)), Signal(std::move(target))};
}

void adam_update(VectorXd& params, const VectorXd& grads, AdamMoments& moments, Index step,
                 double learning_rate, const AdamHyper& hyper) {
  if (grads.size() != params.size() || moments.first.size() != params.size() ||
      moments.second.size() != params.size())
    throw Error(ErrorCode::LengthMismatch, "parameter, gradient and moment sizes differ");
  if (!grads.allFinite()) throw Error(ErrorCode::NonFiniteGradient, "gradient is not finite");
  moments.first = hyper.beta1 * moments.first + (1.0 - hyper.beta1) * grads;
  moments.second = hyper.beta2 * moments.second + (1.0 - hyper.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(hyper.beta1, double(step));
  const double c2 = 1.0 - std::pow(hyper.beta2, double(step));
  params.array() -= learning_rate * (moments.first.array() / c1) /
                    ((moments.second.array() / c2).sqrt() + hyper.epsilon);
}

double delay_rmse(const TrainConfig& config, const RtfParams& params) {
  const Kernel kernel = kernel_generate(params, config.seq_len);
  return std::sqrt(delay_batch_loss(config, kernel, kEvalOffset, kEvalSamples, false).loss);
}

TrainReport train_delay(const TrainConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> warnings;
  if (config.state_size < config.delay)
    warnings.push_back("state_size < delay: the delay is not exactly representable");

  RtfParams params = initialize(ZeroInit{}, config.state_size, config.channels,
                                config.denominators(), config.seq_len);
  VectorXd theta = flatten(params);
  AdamMoments moments = AdamMoments::zeros(theta.size());
  std::vector<double> trace;
  trace.reserve(std::size_t(config.steps));

  for (Index step = 1; step <= config.steps; ++step) {
    params = unflatten(params, theta);
    const Kernel kernel = kernel_generate(params, config.seq_len);
    const BatchLoss batch = delay_batch_loss(
        config, kernel, std::uint64_t(step - 1) * std::uint64_t(config.batch_size),
        config.batch_size, true);
    if (!std::isfinite(batch.loss) || batch.loss > kDivergenceLoss)
      throw Error(ErrorCode::TrainingDiverged, "loss exceeded 1e6 at step " + std::to_string(step));
    trace.push_back(batch.loss);
    const ParamGrads grads = kernel_backward(params, batch.grad_h, config.seq_len);
    adam_update(theta, flatten(grads), moments, step, config.learning_rate);
    if (config.project_montel) {
      RtfParams projected = unflatten(params, theta);
      project_denominators(projected);
      theta = flatten(projected);
    }
  }
  params = unflatten(params, theta);
  const double rmse = delay_rmse(config, params);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return TrainReport{std::move(trace), rmse, std::move(params), seconds, std::move(warnings)};
}

DistillResult distill(const Kernel& target, Index state_size, const DistillOptions& options) {
  const Index len = target.length();
  if (len < state_size + 1)
    throw Error(ErrorCode::LengthTooShort, "target length must be at least state_size + 1");
  const Index channels = target.channels();
  RtfParams params = initialize(options.init, state_size, channels, channels, len);
  VectorXd theta = flatten(params);
  AdamMoments moments = AdamMoments::zeros(theta.size());
  const double count = double(target.values.size());

  DistillResult best{params, std::numeric_limits<double>::infinity(), {}};
  best.loss_trace.reserve(std::size_t(options.iterations));
  for (Index it = 1; it <= options.iterations; ++it) {
    params = unflatten(params, theta);
    const Kernel kernel = kernel_generate(params, len);
    const RowMajorXd residual = kernel.values - target.values;
    const double mse = residual.squaredNorm() / count;
    if (!std::isfinite(mse) || mse > kDivergenceLoss)
      throw Error(ErrorCode::TrainingDiverged, "distillation loss exceeded 1e6");
    best.loss_trace.push_back(mse);
    if (mse < best.mse) {
      best.mse = mse;
      best.params = params;
    }
    const ParamGrads grads = kernel_backward(params, Kernel(residual * (2.0 / count)), len);
    adam_update(theta, flatten(grads), moments, it, options.learning_rate);
  }
  params = unflatten(params, theta);
  const RowMajorXd residual = kernel_generate(params, len).values - target.values;
  const double final_mse = residual.squaredNorm() / count;
  if (final_mse < best.mse) {
    best.mse = final_mse;
    best.params = params;
  }
  return best;
}

}  // namespace rtf
