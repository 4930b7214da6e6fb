#include "slope/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "slope/error.hpp"

namespace slope {

void ShrinkagePolicy::validate() const {
  if (mode == KeepMode::FixedFraction && !(keep_fraction > 0.0 && keep_fraction < 1.0)) {
    throw InvalidArgument("keep fraction must be in (0, 1)");
  }
  if (mode == KeepMode::CsrProportional && !(csr > 0.0 && csr <= 1.0)) {
    throw InvalidArgument("shrinkage csr must be in (0, 1]");
  }
  if (!(floor_scale >= 0.0)) throw InvalidArgument("floor scale must be non-negative");
}

std::size_t ShrinkagePolicy::keep_count(std::size_t n) const {
  if (n < 2) {
    throw InvalidArgument("cluster with " + std::to_string(n) +
                          " coefficient(s) cannot be thresholded");
  }
  const double dn = static_cast<double>(n);
  long long m = 0;
  if (mode == KeepMode::FixedFraction) {
    m = std::llround(keep_fraction * dn);
  } else {
    m = std::max(std::llround(csr * dn), std::llround(floor_scale * csr * dn));
  }
  return static_cast<std::size_t>(std::clamp<long long>(m, 1, static_cast<long long>(n) - 1));
}

double select_lambda(std::span<const double> coeffs, std::size_t m_star) {
  if (m_star < 1 || m_star >= coeffs.size()) {
    throw InvalidArgument("keep count " + std::to_string(m_star) + " outside [1, " +
                          std::to_string(coeffs.size()) + ")");
  }
  std::vector<double> mags(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), mags.begin(), [](double a) { return std::abs(a); });
  const auto nth = mags.begin() + static_cast<std::ptrdiff_t>(m_star);
  std::nth_element(mags.begin(), nth, mags.end(), std::greater<>());
  return *nth;
}

void soft_threshold_inplace(std::span<double> coeffs, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidArgument("threshold must be non-negative");
  for (double& a : coeffs) {
    const double mag = std::abs(a) - lambda;
    a = mag > 0.0 ? std::copysign(mag, a) : 0.0;
  }
}

std::vector<double> soft_threshold(std::span<const double> coeffs, double lambda) {
  std::vector<double> out(coeffs.begin(), coeffs.end());
  soft_threshold_inplace(out, lambda);
  return out;
}

ShrinkResult shrink_set(CoefficientSet alpha, const ShrinkagePolicy& policy) {
  policy.validate();
  const std::size_t nc = alpha.clusters.size();
  ShrinkResult out;
  out.lambdas.resize(nc);
  out.keep_counts.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) out.keep_counts[c] = policy.keep_count(alpha.clusters[c].size());

  std::vector<std::size_t> nnz(nc, 0);
  const auto count = static_cast<std::int64_t>(nc);
#pragma omp parallel for schedule(dynamic) if (nc > 1)
  for (std::int64_t ci = 0; ci < count; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    auto& block = alpha.clusters[c];
    out.lambdas[c] = select_lambda(block, out.keep_counts[c]);
    soft_threshold_inplace(block, out.lambdas[c]);
    nnz[c] = static_cast<std::size_t>(
        std::count_if(block.begin(), block.end(), [](double b) { return b != 0.0; }));
  }
  for (std::size_t v : nnz) out.nonzeros += v;
  out.beta = std::move(alpha);
  return out;
}

}  // namespace slope
