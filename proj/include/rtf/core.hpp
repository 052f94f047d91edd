#pragma once

#include <algorithm>
#include <optional>

#include "rtf/types.hpp"

namespace rtf {

enum class NumeratorForm { corrected, truncated };

// Coefficients of a bank of proper rational transfer functions
//
//   H_c(z) = h0_c + (b_c1 z^-1 + ... + b_cn z^-n) / (1 + a_r1 z^-1 + ... + a_rn z^-n)
//
// with r = denominator_row(c). Storage is ascending in delay order; the
// implicit a_0 = 1 and b_0 = 0 are never stored. When the numerator is in
// truncated form, `b` holds b(I - A^L) for L = trained_length and h0 has
// absorbed the sample h_L that the L-point spectrum folds onto t = 0.
class RtfParams {
 public:
  RtfParams(RowMajorXd a, RowMajorXd b, VectorXd h0,
            NumeratorForm form = NumeratorForm::corrected,
            std::optional<Index> trained_length = std::nullopt);

  // Single-channel, single-denominator convenience constructor.
  static RtfParams siso(const VectorXd& a, const VectorXd& b, double h0,
                        NumeratorForm form = NumeratorForm::corrected,
                        std::optional<Index> trained_length = std::nullopt);

  Index state_size() const { return a_.cols(); }
  Index channels() const { return b_.rows(); }
  Index num_denominators() const { return a_.rows(); }

  // Channels are dealt to denominators in contiguous, equal-sized groups.
  Index denominator_row(Index channel) const {
    return channel * num_denominators() / channels();
  }

  const RowMajorXd& a() const { return a_; }
  const RowMajorXd& b() const { return b_; }
  const VectorXd& h0() const { return h0_; }
  RowMajorXd& a() { return a_; }
  RowMajorXd& b() { return b_; }
  VectorXd& h0() { return h0_; }

  VectorXd denominator(Index channel) const {
    return a_.row(denominator_row(channel)).transpose();
  }
  VectorXd numerator(Index channel) const { return b_.row(channel).transpose(); }

  NumeratorForm numerator_form() const { return form_; }
  std::optional<Index> trained_length() const { return trained_length_; }

  // Free parameters of one (denominator, numerator, feedthrough) triple.
  static constexpr Index dof_per_channel(Index state_size) {
    return 2 * state_size + 1;
  }
  Index parameter_count() const { return a_.size() + b_.size() + h0_.size(); }

  RtfParams with_numerator(RowMajorXd b, NumeratorForm form,
                           std::optional<Index> trained_length) const;

  // Throws InvalidParams when any invariant is violated.
  void validate() const;

 private:
  RowMajorXd a_;
  RowMajorXd b_;
  VectorXd h0_;
  NumeratorForm form_;
  std::optional<Index> trained_length_;
};

// d x L impulse responses, one row per channel.
struct Kernel {
  RowMajorXd values;

  Kernel() = default;
  explicit Kernel(RowMajorXd v) : values(std::move(v)) {}
  Index length() const { return values.cols(); }
  Index channels() const { return values.rows(); }
};

// d x L time series, one row per channel.
struct Signal {
  RowMajorXd values;

  Signal() = default;
  explicit Signal(RowMajorXd v) : values(std::move(v)) {}
  Index length() const { return values.cols(); }
  Index channels() const { return values.rows(); }
};

// First `length` samples of the power series of h0 + B(z)/A(z) in z^-1.
// The strictly proper part follows the long-division recurrence
// g_t = b_t - sum_k a_k g_{t-k} with g_0 = 0; h0 only enters at t = 0.
template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> expand_series(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    typename DerivedA::Scalar h0, Index length) {
  using Scalar = typename DerivedA::Scalar;
  const Index n = a.size();
  VectorX<Scalar> h(length);
  if (length == 0) return h;
  h(0) = Scalar(0);
  for (Index t = 1; t < length; ++t) {
    Scalar acc = t <= n ? b(t - 1) : Scalar(0);
    const Index kmax = std::min(t, n);
    for (Index k = 1; k <= kmax; ++k) acc -= a(k - 1) * h(t - k);
    h(t) = acc;
  }
  h(0) = h0;
  return h;
}

Kernel series_expand(const RtfParams& params, Index length);

Complex eval_tf(const RtfParams& params, Index channel, Complex z);

Kernel alias_fold(const Kernel& kernel, Index period);

}  // namespace rtf
