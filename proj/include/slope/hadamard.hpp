#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace slope {

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;

/// In-place unnormalized Walsh-Hadamard transform in Sylvester (natural)
/// order: v <- H_N v with H_N[i][j] = (-1)^popcount(i & j).
/// Throws InvalidArgument unless v.size() is a power of two.
void fwht(std::span<double> v);

/// Out-of-place convenience wrapper around fwht().
std::vector<double> fwht_copy(std::span<const double> v);

struct OperatorSeeds {
  std::uint64_t permutation = 0;
  std::uint64_t rows = 0;

  friend bool operator==(const OperatorSeeds&, const OperatorSeeds&) = default;
};

/// Permutation and row-selection seeds derived from one user seed.
OperatorSeeds derive_seeds(std::uint64_t seed) noexcept;

/// Sensing matrix A built from M rows of the order-N Sylvester Hadamard
/// matrix, with one global pixel permutation and scale 1/sqrt(N):
///
///   A[m][j] = (1/sqrt(N)) * H_N[rows[m]][perm_inv[j]]
///
/// i.e. forward() transforms the gathered signal u[i] = x[perm[i]] and keeps the
/// selected rows. Rows are orthonormal, so A A^T = I for any row subset.
/// Immutable after construction; forward/adjoint are safe to call concurrently.
class HadamardOperator {
 public:
  /// `width * height` is the number of real pixels (<= order); remaining
  /// entries of the length-order signal are zero padding.
  HadamardOperator(std::size_t width, std::size_t height, std::vector<std::uint32_t> permutation,
                   std::vector<std::uint32_t> rows, OperatorSeeds seeds = {});

  std::size_t order() const noexcept { return order_; }
  std::size_t measurements() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  double scale() const noexcept { return scale_; }
  /// M / (width * height).
  double csr() const noexcept;
  const OperatorSeeds& seeds() const noexcept { return seeds_; }

  std::span<const std::uint32_t> permutation() const noexcept { return perm_; }
  std::span<const std::uint32_t> selected_rows() const noexcept { return rows_; }
  bool has_dc_row() const noexcept;
  /// Position of row 0 within selected_rows(); throws PreconditionError if absent.
  std::size_t dc_index() const;

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> adjoint(std::span<const double> y) const;

  /// Unnormalized +-1 row responses (H_N u)[rows[m]]: forward() without the scale.
  std::vector<double> signed_responses(std::span<const double> x) const;

 private:
  std::size_t order_;
  std::size_t width_;
  std::size_t height_;
  double scale_;
  std::vector<std::uint32_t> perm_;
  std::vector<std::uint32_t> inv_perm_;
  std::vector<std::uint32_t> rows_;
  OperatorSeeds seeds_;
};

/// round(csr * n_x * n_y), clamped to [1, N]. Throws unless csr is in (0, 1].
std::size_t measurement_count(std::size_t n_x, std::size_t n_y, double csr);

/// Operator for an n_x x n_y image: order N is the next power of two of
/// n_x * n_y; row 0 always comes first, the other M-1 rows are a seeded
/// draw without replacement from 1..N-1.
HadamardOperator build_operator(std::size_t n_x, std::size_t n_y, std::size_t m,
                                OperatorSeeds seeds);
HadamardOperator build_operator(std::size_t n_x, std::size_t n_y, double csr, std::uint64_t seed);

}  // namespace slope
