#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slope/image.hpp"
#include "slope/kernels.hpp"

namespace slope {

struct PatchConfig {
  std::size_t edge = 8;
  std::size_t stride = 4;
};

/// Overlapping patch grid over a width x height image.
///
/// Positions along each axis are 0, s, 2s, ... while the patch fits; if the
/// last one stops short of the border, one more patch is clamped flush with
/// it. Every pixel is therefore covered, and averaging the extracted copies
/// reproduces the image exactly.
class PatchSystem {
 public:
  PatchSystem(std::size_t width, std::size_t height, PatchConfig config = {});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t edge() const noexcept { return config_.edge; }
  std::size_t stride() const noexcept { return config_.stride; }
  std::size_t patch_size() const noexcept { return config_.edge * config_.edge; }
  std::size_t patch_count() const noexcept { return rows_.size() * cols_.size(); }
  /// N_c = q * N_p.
  std::size_t coefficient_count() const noexcept { return patch_size() * patch_count(); }

  std::span<const std::size_t> row_positions() const noexcept { return rows_; }
  std::span<const std::size_t> col_positions() const noexcept { return cols_; }
  /// Number of patches covering each pixel (c_p), row-major.
  std::span<const std::uint32_t> coverage() const noexcept { return coverage_; }

  kernels::PatchGrid grid() const noexcept;

 private:
  std::size_t width_;
  std::size_t height_;
  PatchConfig config_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> cols_;
  std::vector<std::uint32_t> coverage_;
};

/// q x N_p matrix stored patch-major: patch p occupies [p*q, (p+1)*q),
/// row-major inside the patch.
struct PatchMatrix {
  std::size_t patch_size = 0;
  std::size_t count = 0;
  std::vector<double> data;

  std::span<double> patch(std::size_t p) { return {data.data() + p * patch_size, patch_size}; }
  std::span<const double> patch(std::size_t p) const {
    return {data.data() + p * patch_size, patch_size};
  }
};

PatchMatrix extract_patches(const PatchSystem& sys, const ImagePlane& x);
ImagePlane average_synthesize(const PatchSystem& sys, const PatchMatrix& patches);

/// Orthonormal DCT-II matrix, row-major: basis[k*n + j] = w_k cos(pi (2j+1) k / 2n).
std::vector<double> dct_basis(std::size_t n);

/// Separable orthonormal DCT-II over both axes of every patch (and its inverse).
PatchMatrix dct2_analyze(PatchMatrix patches);
PatchMatrix dct2_synthesize(PatchMatrix coefficients);

/// Orthonormal 1-D DCT-II / DCT-III along `length` items of `howmany`
/// interleaved sequences: element i of item j sits at data[j*howmany + i].
void dct_along_stack(std::span<double> data, std::size_t length, std::size_t howmany, bool inverse);

struct ClusterAssignment {
  std::size_t n_clusters = 1;
  std::vector<std::uint32_t> labels;

  /// Patch indices of each cluster, ascending.
  std::vector<std::vector<std::uint32_t>> members() const;
};

/// k-means on raw patch vectors: k-means++ seeding from Xoshiro256(seed), at
/// most 20 Lloyd iterations; an emptied cluster takes the patch farthest from
/// its centroid. n_clusters == 1 returns the trivial assignment.
ClusterAssignment cluster_patches(const PatchMatrix& patches, std::size_t n_clusters,
                                  std::uint64_t seed);

/// Coefficients grouped by cluster. Block c holds members[c].size() patches
/// of patch_size coefficients, member-major, in ascending patch order.
struct CoefficientSet {
  std::size_t patch_size = 0;
  std::vector<std::vector<double>> clusters;

  std::size_t total() const;
};

/// 2-D DCT per patch, then (if `stack_transform`) an orthonormal DCT along
/// each cluster's member stack.
CoefficientSet analyze3d(const PatchSystem& sys, const ClusterAssignment& assignment,
                         const PatchMatrix& patches, bool stack_transform);
PatchMatrix synthesize3d(const PatchSystem& sys, const ClusterAssignment& assignment,
                         const CoefficientSet& coefficients, bool stack_transform);

}  // namespace slope
