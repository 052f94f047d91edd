#pragma once

#include <functional>
#include <utility>

#include "rtf/core.hpp"

namespace rtf {

// dL/da, dL/db (stored numerator, i.e. b~ for truncated params), dL/dh0.
struct ParamGrads {
  RowMajorXd grad_a;
  RowMajorXd grad_b;
  VectorXd grad_h0;

  static ParamGrads zeros_like(const RtfParams& params);
  ParamGrads& operator+=(const ParamGrads& other);
};

// Adjoint of kernel_generate at `length`. With w = iFFT(1/A) and
// v = iFFT(B/A^2), the gradients are the circular correlations
//   dL/db_k = sum_t g_t w_{(t-k) mod L},  dL/da_k = -sum_t g_t v_{(t-k) mod L},
// and dL/dh0 = g_0. Shared denominators accumulate over their channels.
ParamGrads kernel_backward(const RtfParams& params, const Kernel& grad_h, Index length);

struct ConvGrads {
  Signal grad_u;
  Kernel grad_h;
};

// Adjoint of fft_conv:
//   dL/dh_t = sum_{s>=t} g_s u_{s-t},  dL/du_j = sum_{s>=j} g_s h_{s-j}.
ConvGrads conv_backward(const Signal& u, const Kernel& h, const Signal& grad_y);

// Largest |analytic_i - central_difference_i| / max(1, |analytic_i|).
double fd_check(const std::function<double(const VectorXd&)>& objective,
                const VectorXd& point, const VectorXd& analytic, double step);

// Flattening used by optimizers and finite-difference checks: a, then b, then h0.
VectorXd flatten(const RtfParams& params);
VectorXd flatten(const ParamGrads& grads);
RtfParams unflatten(const RtfParams& like, const VectorXd& flat);

}  // namespace rtf
