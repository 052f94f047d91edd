#include "rtf/convert.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rtf {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kStepTolerance = 1e-13;
constexpr double kMinPoleGap = 1e-8;

// Evaluates the monic polynomial and a bound on its rounding error.
std::pair<Complex, double> eval_monic(const VectorXd& a, Complex z) {
  Complex p(1.0);
  double bound = 1.0;
  const double r = std::abs(z);
  for (Index k = 0; k < a.size(); ++k) {
    p = p * z + a(k);
    bound = bound * r + std::abs(a(k));
  }
  return {p, 4.0 * std::numeric_limits<double>::epsilon() * bound * (a.size() + 1)};
}

Complex product_of_differences(const VectorXcd& z, Index i) {
  Complex prod(1.0);
  for (Index j = 0; j < z.size(); ++j)
    if (j != i) prod *= z(i) - z(j);
  return prod;
}

}  // namespace

bool RootSet::has_cluster() const {
  for (Index i = 0; i < roots.size(); ++i)
    for (Index j = i + 1; j < roots.size(); ++j) {
      const double gap = std::abs(roots(i) - roots(j));
      if (gap <= kMinPoleGap || gap <= inclusion_radius(i) + inclusion_radius(j))
        return true;
    }
  return false;
}

RootSet find_roots(const VectorXd& a) {
  const Index n = a.size();
  RootSet out;
  out.roots.resize(n);
  out.inclusion_radius.resize(n);
  const double radius = 1.0 + (n > 0 ? a.cwiseAbs().maxCoeff() : 0.0);
  for (Index i = 0; i < n; ++i)
    out.roots(i) = std::polar(radius, 2.0 * std::numbers::pi * double(i) / double(n) + 0.4);

  for (int it = 0; it < kMaxIterations && n > 0; ++it) {
    double max_step = 0.0;
    for (Index i = 0; i < n; ++i) {
      Complex denom = product_of_differences(out.roots, i);
      if (denom == Complex(0.0)) denom = Complex(std::numeric_limits<double>::epsilon());
      const Complex delta = eval_monic(a, out.roots(i)).first / denom;
      out.roots(i) -= delta;
      max_step = std::max(max_step, std::abs(delta) / std::max(1.0, std::abs(out.roots(i))));
    }
    out.iterations = it + 1;
    if (!std::isfinite(max_step)) break;
    if (max_step <= kStepTolerance) {
      out.converged = true;
      break;
    }
  }

  // Steps can stall just above the tolerance at the rounding floor of close
  // roots; the residual bound is what callers rely on, so accept it too.
  bool residual_ok = n > 0;
  for (Index i = 0; i < n; ++i) {
    const auto [value, bound] = eval_monic(a, out.roots(i));
    out.inclusion_radius(i) =
        double(n) * (std::abs(value) + bound) / std::abs(product_of_differences(out.roots, i));
    const double scale = std::max(1.0, std::pow(std::abs(out.roots(i)), double(n)));
    if (!(std::abs(value) < 1e-12 * scale)) residual_ok = false;
  }
  if (!out.converged && residual_ok) out.converged = true;
  return out;
}

RtfParams ssm_to_tf(const DenseSsm<double>& ssm) {
  const Index n = ssm.state_size();
  // The trace recurrence loses digits with the conditioning of the basis;
  // extended precision keeps a cond-1e3 similarity near 1e-11.
  using Wide = long double;
  const MatrixX<Wide> A = ssm.A.cast<Wide>();
  const VectorX<Wide> den = charpoly(A).coeffs;
  const MatrixX<Wide> closed = A - ssm.B.cast<Wide>() * ssm.C.cast<Wide>();
  const VectorX<Wide> shifted = charpoly(closed).coeffs;
  // det(zI - A + BC) - det(zI - A) = det(zI - A) C (zI - A)^{-1} B.
  return RtfParams::siso(den.tail(n).cast<double>(),
                         (shifted.tail(n) - den.tail(n)).cast<double>(), ssm.h0);
}

DenseSsm<double> tf_to_ssm(const RtfParams& params, Index channel) {
  return to_dense(companion_realize(params, channel));
}

ModalParams tf_to_modal(const RtfParams& params, Index channel) {
  if (params.numerator_form() != NumeratorForm::corrected)
    throw Error(ErrorCode::NeedsCorrectedNumerator, "modal form needs the corrected numerator");
  const VectorXd a = params.denominator(channel);
  const VectorXd b = params.numerator(channel);
  const RootSet roots = find_roots(a);
  if (roots.has_cluster())
    throw Error(ErrorCode::RepeatedPoles, "denominator roots are not pairwise separated");
  if (!roots.converged)
    throw Error(ErrorCode::RootFindingDiverged, "Durand-Kerner did not converge");

  ModalParams modal;
  modal.poles = roots.roots;
  modal.h0 = params.h0()(channel);
  modal.residues.resize(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    // N(z) = b_1 z^{n-1} + ... + b_n; D'(lambda_i) = prod_{j != i} (lambda_i - lambda_j).
    Complex num(0.0);
    for (Index k = 0; k < b.size(); ++k) num = num * modal.poles(i) + b(k);
    modal.residues(i) = num / product_of_differences(modal.poles, i);
  }
  return modal;
}

Kernel modal_kernel(const ModalParams& modal, Index length) {
  if (length < 1) throw Error(ErrorCode::LengthTooShort, "length must be >= 1");
  RowMajorXd h(1, length);
  h(0, 0) = modal.h0;
  VectorXcd powers = modal.residues;
  double max_imag = 0.0;
  for (Index t = 1; t < length; ++t) {
    const Complex sum = powers.sum();
    h(0, t) = sum.real();
    max_imag = std::max(max_imag, std::abs(sum.imag()));
    powers = powers.cwiseProduct(modal.poles);
  }
  const double scale = h.cwiseAbs().maxCoeff();
  if (max_imag > 1e-9 * std::max(scale, std::numeric_limits<double>::min()))
    throw Error(ErrorCode::NonRealKernel, "residues and poles do not form conjugate pairs");
  return Kernel(std::move(h));
}

}  // namespace rtf
