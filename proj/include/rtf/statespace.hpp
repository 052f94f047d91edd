#pragma once

#include <span>

#include "rtf/core.hpp"

namespace rtf {

// x_{t+1} = A x_t + B u_t,  y_t = C x_t + h0 u_t.
template <typename Scalar>
struct DenseSsm {
  MatrixX<Scalar> A;
  VectorX<Scalar> B;
  RowVectorX<Scalar> C;
  Scalar h0{0};

  Index state_size() const { return A.rows(); }
};

// Companion-form realization of h0 + B(z)/A(z). The implied matrices are
// A = [-a^T; I_{n-1} 0], B = e_1, C = b^T; they are only built on request.
template <typename Scalar>
struct CompanionSsm {
  VectorX<Scalar> a;
  VectorX<Scalar> b;
  Scalar h0{0};

  Index state_size() const { return a.size(); }
};

template <typename Scalar>
using StateVector = VectorX<Scalar>;

template <typename Derived>
MatrixX<typename Derived::Scalar> companion_matrix(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.size();
  MatrixX<Scalar> A = MatrixX<Scalar>::Zero(n, n);
  A.row(0) = -a.transpose();
  if (n > 1) A.bottomLeftCorner(n - 1, n - 1).setIdentity();
  return A;
}

template <typename Scalar>
DenseSsm<Scalar> to_dense(const CompanionSsm<Scalar>& ssm) {
  DenseSsm<Scalar> out;
  out.A = companion_matrix(ssm.a);
  out.B = VectorX<Scalar>::Unit(ssm.state_size(), 0);
  out.C = ssm.b.transpose();
  out.h0 = ssm.h0;
  return out;
}

// h_0 = h0, h_t = C A^{t-1} B, by iterated matrix-vector products.
template <typename Scalar>
VectorX<Scalar> dense_impulse(const DenseSsm<Scalar>& ssm, Index length) {
  VectorX<Scalar> h(length);
  if (length == 0) return h;
  h(0) = ssm.h0;
  VectorX<Scalar> v = ssm.B;
  for (Index t = 1; t < length; ++t) {
    h(t) = ssm.C.dot(v);
    v = (ssm.A * v).eval();
  }
  return h;
}

// One recurrent step in O(n): y = b.x + h0 u, then x <- (u - a.x, x_1, ..., x_{n-1}).
template <typename Scalar>
Scalar step(const CompanionSsm<Scalar>& ssm, StateVector<Scalar>& x, Scalar u) {
  const Index n = ssm.state_size();
  if (x.size() != n)
    throw Error(ErrorCode::StateSizeMismatch, "state length differs from state size");
  const Scalar y = ssm.b.dot(x) + ssm.h0 * u;
  const Scalar head = u - ssm.a.dot(x);
  for (Index i = n - 1; i > 0; --i) x(i) = x(i - 1);
  x(0) = head;
  return y;
}

// State after consuming u from the zero state, O(L n).
template <typename Scalar>
StateVector<Scalar> prefill_naive(const CompanionSsm<Scalar>& ssm,
                                  std::span<const Scalar> u) {
  StateVector<Scalar> x = StateVector<Scalar>::Zero(ssm.state_size());
  for (Scalar v : u) step(ssm, x, v);
  return x;
}

// A^power for the companion matrix of a, by binary exponentiation.
template <typename Derived>
MatrixX<typename Derived::Scalar> companion_power(const Eigen::MatrixBase<Derived>& a,
                                                  Index power) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.size();
  MatrixX<Scalar> result = MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> base = companion_matrix(a);
  bool first = true;
  while (power > 0) {
    if (power & 1) {
      result = first ? base : (result * base).eval();
      first = false;
    }
    power >>= 1;
    if (power > 0) base = (base * base).eval();
  }
  return result;
}

CompanionSsm<double> companion_realize(const RtfParams& params, Index channel);

// b~ = b (I - A^L), with b A^L accumulated by L structured row updates.
VectorXd truncate_numerator(const VectorXd& a, const VectorXd& b, Index trained_length);

// Solves b (I - A^L) = b~ with partially pivoted LU. Throws
// NearSingularCorrection when the reciprocal condition, taken relative to
// 1 + |A^L|, falls below 1e-12.
VectorXd correct_numerator(const VectorXd& a, const VectorXd& b_truncated,
                           Index trained_length);

// h_L = b A^{L-1} e_1 for the corrected numerator b. On the L-th roots of
// unity the truncated-form spectrum aliases this sample onto t = 0.
double aliased_sample(const VectorXd& a, const VectorXd& b, Index trained_length);

// Whole-bank conversions between numerator forms. Besides the numerator,
// h0 is shifted by the aliased sample h_L so that kernel_generate on the
// truncated form reproduces the first L samples of the corrected system
// exactly, t = 0 included.
RtfParams to_truncated(const RtfParams& params, Index trained_length);
RtfParams to_corrected(const RtfParams& params);

// Multi-channel recurrent inference from the zero state.
Signal apply_recurrent(const RtfParams& params, const Signal& u);

// Multi-channel state-free inference: kernel at the signal length, then fft_conv.
Signal apply_fft(const RtfParams& params, const Signal& u);

}  // namespace rtf
