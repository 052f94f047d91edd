#include "rtf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rtf/convert.hpp"

namespace rtf {

bool jury_stable(const VectorXd& a) {
  // Monic coefficients in descending powers of z.
  VectorXd c(a.size() + 1);
  c(0) = 1.0;
  c.tail(a.size()) = a;
  for (Index m = a.size(); m >= 1; --m) {
    const double k = c(m) / c(0);
    if (!std::isfinite(k) || std::abs(k) >= 1.0 - 1e-12) return false;
    VectorXd next(m);
    const double scale = 1.0 - k * k;
    for (Index i = 0; i < m; ++i) next(i) = (c(i) - k * c(m - i)) / scale;
    c = next;
  }
  return true;
}

VectorXd pole_radii(const VectorXd& a) {
  const RootSet roots = find_roots(a);
  if (!roots.converged && !roots.has_cluster())
    throw Error(ErrorCode::RootFindingDiverged, "Durand-Kerner did not converge");
  VectorXd radii = roots.roots.cwiseAbs();
  std::sort(radii.begin(), radii.end(), std::greater<>());
  return radii;
}

StabilityReport stability_report(const VectorXd& a) {
  StabilityReport report;
  report.jury_stable = jury_stable(a);
  report.pole_radii = pole_radii(a);
  report.montel_margin = 1.0 - a.cwiseAbs().sum();
  return report;
}

VectorXd montel_project(const VectorXd& raw) {
  const double norm = raw.cwiseAbs().sum();
  if (!(norm > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot project the zero vector");
  return raw.head(raw.size() - 1) / norm;
}

RtfParams initialize(const InitScheme& scheme, Index state_size, Index channels,
                     Index num_denominators, std::optional<Index> trained_length) {
  const Index n = state_size;
  const Index d = channels;
  const Index m = num_denominators;
  RowMajorXd a = RowMajorXd::Zero(m, n);
  RowMajorXd b = RowMajorXd::Zero(d, n);
  VectorXd h0 = VectorXd::Ones(d);

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FirInit>) {
          const Index taps = s.taps.size();
          if (taps < 1 || taps - 1 > n)
            throw Error(ErrorCode::FirTooLong, "FIR embedding needs 1 <= taps <= n + 1");
          h0.setConstant(s.taps(0));
          for (Index c = 0; c < d; ++c) b.row(c).head(taps - 1) = s.taps.tail(taps - 1).transpose();
        } else if constexpr (std::is_same_v<T, UniformMontelInit>) {
          std::mt19937_64 rng(s.seed);
          std::uniform_real_distribution<double> unit(0.0, 1.0);
          for (Index r = 0; r < m; ++r) {
            VectorXd raw(n + 1);
            for (Index k = 0; k <= n; ++k) raw(k) = unit(rng);
            a.row(r) = montel_project(raw).transpose();
          }
          for (Index i = 0; i < b.size(); ++i) b.data()[i] = unit(rng);
        } else if constexpr (std::is_same_v<T, XavierInit>) {
          std::mt19937_64 rng(s.seed);
          const double bound = std::sqrt(6.0 / double(n + n));
          std::uniform_real_distribution<double> dist(-bound, bound);
          for (Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng);
          for (Index i = 0; i < b.size(); ++i) b.data()[i] = dist(rng);
        }
      },
      scheme);

  const NumeratorForm form =
      trained_length ? NumeratorForm::truncated : NumeratorForm::corrected;
  return RtfParams(std::move(a), std::move(b), std::move(h0), form, trained_length);
}

}  // namespace rtf
