#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slope/patch.hpp"

namespace slope {

enum class KeepMode {
  /// Keep round(csr * n) coefficients in each cluster.
  CsrProportional,
  /// Keep round(keep_fraction * n) coefficients in each cluster.
  FixedFraction,
};

struct ShrinkagePolicy {
  KeepMode mode = KeepMode::CsrProportional;
  double keep_fraction = 0.5;
  double csr = 0.1;
  /// CsrProportional only: keep at least round(floor_scale * csr * n).
  double floor_scale = 0.5;

  void validate() const;
  /// m*_c for a cluster with n coefficients, clamped to [1, n - 1].
  std::size_t keep_count(std::size_t n) const;
};

/// (m_star + 1)-th largest magnitude. Requires 1 <= m_star < coeffs.size().
double select_lambda(std::span<const double> coeffs, std::size_t m_star);

/// beta_i = sign(alpha_i) * max(|alpha_i| - lambda, 0).
std::vector<double> soft_threshold(std::span<const double> coeffs, double lambda);
void soft_threshold_inplace(std::span<double> coeffs, double lambda);

struct ShrinkResult {
  CoefficientSet beta;
  std::vector<double> lambdas;
  std::vector<std::size_t> keep_counts;
  std::size_t nonzeros = 0;
};

/// Per-cluster threshold selection followed by soft thresholding.
ShrinkResult shrink_set(CoefficientSet alpha, const ShrinkagePolicy& policy);

}  // namespace slope
