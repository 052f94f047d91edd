#pragma once

#include <cstdint>
#include <variant>

#include "rtf/core.hpp"

namespace rtf {

struct StabilityReport {
  bool jury_stable = false;
  VectorXd pole_radii;  // descending
  double montel_margin = 0.0;  // 1 - sum_k |a_k|
};

// True iff every root of z^n + a_1 z^{n-1} + ... + a_n lies strictly inside
// the unit circle. Schur-Cohn step-down recursion (equivalent to the Jury
// table); reflection coefficients within 1e-12 of unit magnitude fail.
bool jury_stable(const VectorXd& a);

VectorXd pole_radii(const VectorXd& a);

StabilityReport stability_report(const VectorXd& a);

// Scales raw (n + 1 values) to unit one-norm and keeps the first n.
VectorXd montel_project(const VectorXd& raw);

struct ZeroInit {};
struct FirInit {
  VectorXd taps;  // k_0 .. k_{m-1}
};
struct UniformMontelInit {
  std::uint64_t seed = 0;
};
struct XavierInit {
  std::uint64_t seed = 0;
};
using InitScheme = std::variant<ZeroInit, FirInit, UniformMontelInit, XavierInit>;

// When trained_length is given the numerator is labelled truncated-form at
// that length; otherwise corrected.
RtfParams initialize(const InitScheme& scheme, Index state_size, Index channels,
                     Index num_denominators,
                     std::optional<Index> trained_length = std::nullopt);

}  // namespace rtf
