#pragma once

#include "rtf/statespace.hpp"

namespace rtf {

template <typename Scalar>
struct CharPoly {
  // det(zI - A), monic, descending powers of z (n + 1 entries).
  VectorX<Scalar> coeffs;
  // Set when n > 64, where the trace recurrence loses most of its digits.
  bool ill_conditioned = false;
};

// Characteristic polynomial by the Faddeev-LeVerrier trace recurrence:
// M_k = A M_{k-1} + c_{k-1} I,  c_k = -tr(A M_k) / k.
template <typename Derived>
CharPoly<typename Derived::Scalar> charpoly(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  const Index n = A.rows();
  CharPoly<Scalar> out;
  out.coeffs.resize(n + 1);
  out.coeffs(0) = Scalar(1);
  out.ill_conditioned = n > 64;
  MatrixX<Scalar> M = MatrixX<Scalar>::Zero(n, n);
  MatrixX<Scalar> AM(n, n);
  for (Index k = 1; k <= n; ++k) {
    M.diagonal().array() += out.coeffs(k - 1);
    AM.noalias() = A * M;
    out.coeffs(k) = -AM.trace() / Scalar(k);
    M.swap(AM);
  }
  return out;
}

// Poles and residues of h0 + sum_i r_i / (z - lambda_i).
struct ModalParams {
  VectorXcd residues;
  VectorXcd poles;
  double h0 = 0.0;

  Index state_size() const { return poles.size(); }
};

// Roots of z^n + a_1 z^{n-1} + ... + a_n by Durand-Kerner iteration.
struct RootSet {
  VectorXcd roots;
  // Radius of a disc around each root guaranteed to contain a true root,
  // including the rounding floor of the polynomial evaluation.
  VectorXd inclusion_radius;
  bool converged = false;
  int iterations = 0;

  // True when two roots are closer than 1e-8 or their inclusion discs overlap.
  bool has_cluster() const;
};

RootSet find_roots(const VectorXd& a);

// a = tail of charpoly(A), b = tail of charpoly(A - BC) minus a.
RtfParams ssm_to_tf(const DenseSsm<double>& ssm);

DenseSsm<double> tf_to_ssm(const RtfParams& params, Index channel);

ModalParams tf_to_modal(const RtfParams& params, Index channel);

// h_0 = h0, h_t = Re sum_i r_i lambda_i^{t-1}; single-channel kernel.
Kernel modal_kernel(const ModalParams& modal, Index length);

}  // namespace rtf
