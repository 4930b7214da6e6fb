#include "slope/patch.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "slope/error.hpp"
#include "slope/random.hpp"

namespace slope {

namespace {

constexpr std::size_t kKmeansIterations = 20;

std::vector<std::size_t> axis_positions(std::size_t extent, std::size_t edge, std::size_t stride) {
  std::vector<std::size_t> pos;
  for (std::size_t p = 0; p + edge <= extent; p += stride) pos.push_back(p);
  if (pos.back() + edge < extent) pos.push_back(extent - edge);
  return pos;
}

// FFTW's planner is not thread-safe; execution on a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const std::vector<double>& cached_basis(std::size_t n) {
  // Patch edges are tiny and few; one cache slot per edge up to 64.
  static std::vector<std::vector<double>> cache(65);
  static std::once_flag flags[65];
  if (n > 64) {
    thread_local std::vector<double> big;
    big = dct_basis(n);
    return big;
  }
  std::call_once(flags[n], [n] { cache[n] = dct_basis(n); });
  return cache[n];
}

std::size_t edge_of(std::size_t patch_size) {
  const auto e = static_cast<std::size_t>(std::llround(std::sqrt(double(patch_size))));
  if (e == 0 || e * e != patch_size) {
    throw InvalidArgument("patch size " + std::to_string(patch_size) + " is not a square");
  }
  return e;
}

void check_matrix(const PatchMatrix& m) {
  if (m.data.size() != m.patch_size * m.count) {
    throw InvalidArgument("patch matrix storage does not match its shape");
  }
}

void check_assignment(const PatchSystem& sys, const ClusterAssignment& a) {
  if (a.labels.size() != sys.patch_count()) {
    throw InvalidArgument("cluster labels cover " + std::to_string(a.labels.size()) +
                          " patches, system has " + std::to_string(sys.patch_count()));
  }
  for (std::uint32_t l : a.labels) {
    if (l >= a.n_clusters) throw InvalidArgument("cluster label out of range");
  }
}

}  // namespace

PatchSystem::PatchSystem(std::size_t width, std::size_t height, PatchConfig config)
    : width_(width), height_(height), config_(config) {
  if (config_.edge == 0 || config_.stride == 0) {
    throw InvalidArgument("patch edge and stride must be positive");
  }
  if (config_.edge > std::min(width_, height_)) {
    throw InvalidArgument("patch edge " + std::to_string(config_.edge) + " exceeds image size " +
                          std::to_string(width_) + "x" + std::to_string(height_));
  }
  rows_ = axis_positions(height_, config_.edge, config_.stride);
  cols_ = axis_positions(width_, config_.edge, config_.stride);
  coverage_.assign(width_ * height_, 0);
  for (std::size_t r0 : rows_) {
    for (std::size_t c0 : cols_) {
      for (std::size_t r = r0; r < r0 + config_.edge; ++r) {
        for (std::size_t c = c0; c < c0 + config_.edge; ++c) ++coverage_[r * width_ + c];
      }
    }
  }
}

kernels::PatchGrid PatchSystem::grid() const noexcept {
  return kernels::PatchGrid{width_, height_, config_.edge, rows_, cols_};
}

PatchMatrix extract_patches(const PatchSystem& sys, const ImagePlane& x) {
  if (x.width() != sys.width() || x.height() != sys.height()) {
    throw InvalidArgument("image does not match patch system dimensions");
  }
  PatchMatrix out{sys.patch_size(), sys.patch_count(),
                  std::vector<double>(sys.coefficient_count())};
  kernels::parallel::extract_patches(sys.grid(), x.values(), out.data);
  return out;
}

ImagePlane average_synthesize(const PatchSystem& sys, const PatchMatrix& patches) {
  check_matrix(patches);
  if (patches.patch_size != sys.patch_size() || patches.count != sys.patch_count()) {
    throw InvalidArgument("patch matrix shape does not match patch system");
  }
  ImagePlane out(sys.width(), sys.height());
  kernels::parallel::average_patches(sys.grid(), patches.data, out.values());
  return out;
}

std::vector<double> dct_basis(std::size_t n) {
  std::vector<double> basis(n * n);
  const double w0 = std::sqrt(1.0 / double(n));
  const double wk = std::sqrt(2.0 / double(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = std::numbers::pi * double((2 * j + 1) * k) / double(2 * n);
      basis[k * n + j] = (k == 0 ? w0 : wk) * std::cos(angle);
    }
  }
  return basis;
}

PatchMatrix dct2_analyze(PatchMatrix patches) {
  check_matrix(patches);
  const std::size_t edge = edge_of(patches.patch_size);
  kernels::parallel::transform_patches(patches.data, edge, cached_basis(edge), false);
  return patches;
}

PatchMatrix dct2_synthesize(PatchMatrix coefficients) {
  check_matrix(coefficients);
  const std::size_t edge = edge_of(coefficients.patch_size);
  kernels::parallel::transform_patches(coefficients.data, edge, cached_basis(edge), true);
  return coefficients;
}

void dct_along_stack(std::span<double> data, std::size_t length, std::size_t howmany, bool inverse) {
  if (data.size() != length * howmany) throw InvalidArgument("stack transform shape mismatch");
  if (length <= 1) return;

  const double n = double(length);
  const double s0 = std::sqrt(1.0 / n);
  const double sk = std::sqrt(2.0 / n);
  // FFTW's REDFT10 is an unnormalized DCT-II scaled by 2; REDFT01 is its
  // DCT-III counterpart. Pre/post scaling makes the pair orthonormal.
  if (inverse) {
    for (std::size_t i = 0; i < howmany; ++i) data[i] *= s0;
    for (std::size_t j = 1; j < length; ++j) {
      for (std::size_t i = 0; i < howmany; ++i) data[j * howmany + i] *= 0.5 * sk;
    }
  }

  fftw_plan plan;
  {
    const std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(length);
    const fftw_r2r_kind kind = inverse ? FFTW_REDFT01 : FFTW_REDFT10;
    plan = fftw_plan_many_r2r(1, &len, static_cast<int>(howmany), data.data(), nullptr,
                              static_cast<int>(howmany), 1, data.data(), nullptr,
                              static_cast<int>(howmany), 1, &kind, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw InvalidArgument("FFTW could not plan the stack transform");
  fftw_execute(plan);
  {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  if (!inverse) {
    for (std::size_t i = 0; i < howmany; ++i) data[i] *= 0.5 * s0;
    for (std::size_t j = 1; j < length; ++j) {
      for (std::size_t i = 0; i < howmany; ++i) data[j * howmany + i] *= 0.5 * sk;
    }
  }
}

std::vector<std::vector<std::uint32_t>> ClusterAssignment::members() const {
  std::vector<std::vector<std::uint32_t>> out(n_clusters);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    out[labels[p]].push_back(static_cast<std::uint32_t>(p));
  }
  return out;
}

ClusterAssignment cluster_patches(const PatchMatrix& patches, std::size_t n_clusters,
                                  std::uint64_t seed) {
  check_matrix(patches);
  if (n_clusters < 1) throw InvalidArgument("cluster count must be at least 1");
  if (n_clusters > patches.count) {
    throw InvalidArgument("cluster count " + std::to_string(n_clusters) + " exceeds patch count " +
                          std::to_string(patches.count));
  }
  ClusterAssignment out{n_clusters, std::vector<std::uint32_t>(patches.count, 0)};
  if (n_clusters == 1) return out;

  const std::size_t dim = patches.patch_size;
  const std::size_t n = patches.count;
  std::span<const double> points = patches.data;
  std::vector<double> centroids(n_clusters * dim);
  std::vector<double> dist(n);

  // k-means++ seeding.
  Xoshiro256 rng(seed);
  std::size_t first = rng.below(n);
  std::copy_n(points.begin() + first * dim, dim, centroids.begin());
  for (std::size_t c = 1; c < n_clusters; ++c) {
    kernels::parallel::assign_nearest(points, dim, std::span(centroids).first(c * dim), out.labels,
                                      dist);
    double total = 0.0;
    for (double d : dist) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    std::copy_n(points.begin() + pick * dim, dim, centroids.begin() + c * dim);
  }

  std::vector<std::uint32_t> previous;
  std::vector<std::size_t> sizes(n_clusters);
  for (std::size_t iter = 0; iter < kKmeansIterations; ++iter) {
    kernels::parallel::assign_nearest(points, dim, centroids, out.labels, dist);

    // Refill empty clusters with the patch farthest from its own centroid.
    for (;;) {
      std::fill(sizes.begin(), sizes.end(), 0);
      for (std::uint32_t l : out.labels) ++sizes[l];
      const auto empty = std::find(sizes.begin(), sizes.end(), 0);
      if (empty == sizes.end()) break;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[out.labels[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
      }
      if (far == n) break;  // cannot happen while n_clusters <= n
      const auto c = static_cast<std::uint32_t>(empty - sizes.begin());
      out.labels[far] = c;
      dist[far] = 0.0;
      std::copy_n(points.begin() + far * dim, dim, centroids.begin() + c * dim);
    }

    if (out.labels == previous) break;
    previous = out.labels;

    std::fill(centroids.begin(), centroids.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* centroid = centroids.data() + out.labels[i] * dim;
      for (std::size_t t = 0; t < dim; ++t) centroid[t] += points[i * dim + t];
    }
    for (std::size_t c = 0; c < n_clusters; ++c) {
      for (std::size_t t = 0; t < dim; ++t) centroids[c * dim + t] /= double(sizes[c]);
    }
  }
  return out;
}

std::size_t CoefficientSet::total() const {
  std::size_t n = 0;
  for (const auto& block : clusters) n += block.size();
  return n;
}

CoefficientSet analyze3d(const PatchSystem& sys, const ClusterAssignment& assignment,
                         const PatchMatrix& patches, bool stack_transform) {
  check_matrix(patches);
  if (patches.patch_size != sys.patch_size() || patches.count != sys.patch_count()) {
    throw InvalidArgument("patch matrix shape does not match patch system");
  }
  check_assignment(sys, assignment);
  const PatchMatrix coeffs = dct2_analyze(patches);
  const std::size_t q = sys.patch_size();
  const auto members = assignment.members();

  CoefficientSet out{q, std::vector<std::vector<double>>(assignment.n_clusters)};
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) throw InvalidArgument("cluster " + std::to_string(c) + " is empty");
    auto& block = out.clusters[c];
    block.resize(members[c].size() * q);
    for (std::size_t j = 0; j < members[c].size(); ++j) {
      const auto src = coeffs.patch(members[c][j]);
      std::copy(src.begin(), src.end(), block.begin() + j * q);
    }
    if (stack_transform) dct_along_stack(block, members[c].size(), q, false);
  }
  return out;
}

PatchMatrix synthesize3d(const PatchSystem& sys, const ClusterAssignment& assignment,
                         const CoefficientSet& coefficients, bool stack_transform) {
  check_assignment(sys, assignment);
  const std::size_t q = sys.patch_size();
  if (coefficients.patch_size != q || coefficients.clusters.size() != assignment.n_clusters) {
    throw InvalidArgument("coefficient set does not match the cluster assignment");
  }
  const auto members = assignment.members();
  PatchMatrix out{q, sys.patch_count(), std::vector<double>(sys.coefficient_count())};
  std::vector<double> block;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (coefficients.clusters[c].size() != members[c].size() * q) {
      throw InvalidArgument("coefficient block " + std::to_string(c) + " has wrong size");
    }
    block = coefficients.clusters[c];
    if (stack_transform) dct_along_stack(block, members[c].size(), q, true);
    for (std::size_t j = 0; j < members[c].size(); ++j) {
      std::copy_n(block.begin() + j * q, q, out.patch(members[c][j]).begin());
    }
  }
  return dct2_synthesize(std::move(out));
}

}  // namespace slope
