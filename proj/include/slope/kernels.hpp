#pragma once

// Hot loops of the pipeline, each in two builds with identical signatures:
// `serial` is the straightforward reference, `parallel` is the OpenMP version
// used by the public API. Both produce bitwise-identical results; the
// parallel versions only distribute independent work items and never change
// the order of floating-point reductions.

#include <cstddef>
#include <cstdint>
#include <span>

namespace slope::kernels {

/// Geometry of an overlapping patch grid. Patch (i, j) has its top-left
/// corner at (rows[i], cols[j]) and is stored at index i * cols.size() + j.
struct PatchGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t edge = 0;
  std::span<const std::size_t> rows;
  std::span<const std::size_t> cols;

  std::size_t patch_size() const { return edge * edge; }
  std::size_t patch_count() const { return rows.size() * cols.size(); }
};

namespace serial {

/// Unnormalized Sylvester-ordered Walsh-Hadamard transform, in place.
void fwht(std::span<double> v);

void extract_patches(const PatchGrid& grid, std::span<const double> image, std::span<double> out);

/// Mean of every pixel's patch copies, accumulated in patch raster order as a
/// running mean, so identical copies reproduce the pixel exactly.
void average_patches(const PatchGrid& grid, std::span<const double> patches, std::span<double> out);

/// Separable 2-D transform of every patch with an edge x edge basis
/// (row-major, basis[k * edge + j]). Forward computes B P B^T, inverse B^T P B.
void transform_patches(std::span<double> patches, std::size_t edge, std::span<const double> basis,
                       bool inverse);

/// Nearest centroid (squared Euclidean, lowest index wins ties).
void assign_nearest(std::span<const double> points, std::size_t dim,
                    std::span<const double> centroids, std::span<std::uint32_t> labels,
                    std::span<double> distances);

}  // namespace serial

namespace parallel {

void fwht(std::span<double> v);
void extract_patches(const PatchGrid& grid, std::span<const double> image, std::span<double> out);
/// Gathers each pixel's copies in patch raster order, so the running means match the serial scatter.
void average_patches(const PatchGrid& grid, std::span<const double> patches, std::span<double> out);
void transform_patches(std::span<double> patches, std::size_t edge, std::span<const double> basis,
                       bool inverse);
void assign_nearest(std::span<const double> points, std::size_t dim,
                    std::span<const double> centroids, std::span<std::uint32_t> labels,
                    std::span<double> distances);

}  // namespace parallel

namespace detail {

// Shared per-item bodies; the serial and parallel loops differ only in scheduling.

/// mean <- mean + (value - mean) / count, for the count-th sample.
inline void running_mean(double& mean, double value, std::uint32_t count) {
  mean += (value - mean) / static_cast<double>(count);
}

inline void transform_one(double* patch, double* scratch, std::size_t edge, const double* basis,
                          bool inverse) {
  // scratch = B P (or B^T P)
  for (std::size_t k = 0; k < edge; ++k) {
    for (std::size_t j = 0; j < edge; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < edge; ++i) {
        const double b = inverse ? basis[i * edge + k] : basis[k * edge + i];
        acc += b * patch[i * edge + j];
      }
      scratch[k * edge + j] = acc;
    }
  }
  // patch = scratch B^T (or scratch B)
  for (std::size_t k = 0; k < edge; ++k) {
    for (std::size_t l = 0; l < edge; ++l) {
      double acc = 0.0;
      for (std::size_t j = 0; j < edge; ++j) {
        const double b = inverse ? basis[j * edge + l] : basis[l * edge + j];
        acc += scratch[k * edge + j] * b;
      }
      patch[k * edge + l] = acc;
    }
  }
}

inline void nearest_one(const double* point, std::size_t dim, std::span<const double> centroids,
                        std::uint32_t& label, double& distance) {
  const std::size_t k = centroids.size() / dim;
  double best = 0.0;
  std::uint32_t best_c = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double* centroid = centroids.data() + c * dim;
    double d = 0.0;
    for (std::size_t t = 0; t < dim; ++t) {
      const double diff = point[t] - centroid[t];
      d += diff * diff;
    }
    if (c == 0 || d < best) {
      best = d;
      best_c = static_cast<std::uint32_t>(c);
    }
  }
  label = best_c;
  distance = best;
}

}  // namespace detail

}  // namespace slope::kernels
