#include "slope/hadamard.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "slope/error.hpp"
#include "slope/kernels.hpp"
#include "slope/random.hpp"

namespace slope {

bool is_power_of_two(std::size_t n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht(std::span<double> v) {
  if (!is_power_of_two(v.size())) {
    throw InvalidArgument("fwht: length " + std::to_string(v.size()) + " is not a power of two");
  }
  kernels::parallel::fwht(v);
}

std::vector<double> fwht_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  fwht(out);
  return out;
}

OperatorSeeds derive_seeds(std::uint64_t seed) noexcept {
  std::uint64_t state = seed;
  OperatorSeeds seeds;
  seeds.permutation = seed;
  splitmix64(state);
  seeds.rows = splitmix64(state);
  return seeds;
}

HadamardOperator::HadamardOperator(std::size_t width, std::size_t height,
                                   std::vector<std::uint32_t> permutation,
                                   std::vector<std::uint32_t> rows, OperatorSeeds seeds)
    : order_(permutation.size()),
      width_(width),
      height_(height),
      scale_(0.0),
      perm_(std::move(permutation)),
      rows_(std::move(rows)),
      seeds_(seeds) {
  if (!is_power_of_two(order_)) {
    throw InvalidArgument("operator order " + std::to_string(order_) + " is not a power of two");
  }
  if (width_ * height_ == 0 || width_ * height_ > order_) {
    throw InvalidArgument("image of " + std::to_string(width_ * height_) +
                          " pixels does not fit operator order " + std::to_string(order_));
  }
  if (rows_.empty() || rows_.size() > order_) {
    throw InvalidArgument("operator needs between 1 and N selected rows");
  }
  inv_perm_.assign(order_, order_);
  for (std::size_t i = 0; i < order_; ++i) {
    const std::uint32_t p = perm_[i];
    if (p >= order_ || inv_perm_[p] != order_) {
      throw InvalidArgument("permutation is not a bijection on 0..N-1");
    }
    inv_perm_[p] = static_cast<std::uint32_t>(i);
  }
  std::vector<bool> seen(order_, false);
  for (std::uint32_t r : rows_) {
    if (r >= order_ || seen[r]) throw InvalidArgument("selected rows out of range or duplicated");
    seen[r] = true;
  }
  scale_ = 1.0 / std::sqrt(static_cast<double>(order_));
}

double HadamardOperator::csr() const noexcept {
  return static_cast<double>(rows_.size()) / static_cast<double>(pixels());
}

bool HadamardOperator::has_dc_row() const noexcept {
  for (std::uint32_t r : rows_) {
    if (r == 0) return true;
  }
  return false;
}

std::size_t HadamardOperator::dc_index() const {
  for (std::size_t m = 0; m < rows_.size(); ++m) {
    if (rows_[m] == 0) return m;
  }
  throw PreconditionError("operator does not include Hadamard row 0 (all-open pattern)");
}

std::vector<double> HadamardOperator::signed_responses(std::span<const double> x) const {
  if (x.size() != order_) {
    throw InvalidArgument("forward: expected length " + std::to_string(order_) + ", got " +
                          std::to_string(x.size()));
  }
  std::vector<double> u(order_);
  for (std::size_t i = 0; i < order_; ++i) u[i] = x[perm_[i]];
  kernels::parallel::fwht(u);
  std::vector<double> y(rows_.size());
  for (std::size_t m = 0; m < rows_.size(); ++m) y[m] = u[rows_[m]];
  return y;
}

std::vector<double> HadamardOperator::forward(std::span<const double> x) const {
  std::vector<double> y = signed_responses(x);
  for (double& v : y) v *= scale_;
  return y;
}

std::vector<double> HadamardOperator::adjoint(std::span<const double> y) const {
  if (y.size() != rows_.size()) {
    throw InvalidArgument("adjoint: expected length " + std::to_string(rows_.size()) + ", got " +
                          std::to_string(y.size()));
  }
  std::vector<double> u(order_, 0.0);
  for (std::size_t m = 0; m < rows_.size(); ++m) u[rows_[m]] = y[m];
  kernels::parallel::fwht(u);
  std::vector<double> x(order_);
  for (std::size_t i = 0; i < order_; ++i) x[perm_[i]] = scale_ * u[i];
  return x;
}

std::size_t measurement_count(std::size_t n_x, std::size_t n_y, double csr) {
  if (!(csr > 0.0 && csr <= 1.0)) {
    throw InvalidArgument("compressive sensing ratio must be in (0, 1], got " +
                          std::to_string(csr));
  }
  const std::size_t order = next_power_of_two(n_x * n_y);
  const auto m = static_cast<std::size_t>(std::llround(csr * static_cast<double>(n_x * n_y)));
  return std::clamp<std::size_t>(m, 1, order);
}

HadamardOperator build_operator(std::size_t n_x, std::size_t n_y, std::size_t m,
                                OperatorSeeds seeds) {
  if (n_x == 0 || n_y == 0) throw InvalidArgument("image dimensions must be positive");
  const std::size_t order = next_power_of_two(n_x * n_y);
  if (m < 1 || m > order) {
    throw InvalidArgument("measurement count " + std::to_string(m) + " outside [1, " +
                          std::to_string(order) + "]");
  }
  std::vector<std::uint32_t> perm = random_permutation(order, seeds.permutation);

  // Partial Fisher-Yates over rows 1..N-1.
  std::vector<std::uint32_t> pool(order - 1);
  for (std::size_t i = 0; i + 1 < order; ++i) pool[i] = static_cast<std::uint32_t>(i + 1);
  Xoshiro256 rng(seeds.rows);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::uint32_t> rows;
  rows.reserve(m);
  rows.push_back(0);
  rows.insert(rows.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m - 1));
  return HadamardOperator(n_x, n_y, std::move(perm), std::move(rows), seeds);
}

HadamardOperator build_operator(std::size_t n_x, std::size_t n_y, double csr, std::uint64_t seed) {
  return build_operator(n_x, n_y, measurement_count(n_x, n_y, csr), derive_seeds(seed));
}

}  // namespace slope
