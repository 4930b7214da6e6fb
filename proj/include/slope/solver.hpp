#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "slope/acquisition.hpp"
#include "slope/hadamard.hpp"
#include "slope/image.hpp"
#include "slope/patch.hpp"
#include "slope/shrinkage.hpp"

namespace slope {

/// How the data-consistency step size is parameterized. With A A^T = I all
/// four reduce to x + step * A^T (y - A x):
///   SlopeXi: step = xi, 0 < xi <= 2 (non-increase of the error is only
///            guaranteed up to 2, strict decrease below it)
///   IstEta:  step = 1 / eta, eta >= 1 (majorization-minimization IST)
///   Gap:     step = 1 (Euclidean projection onto {x : A x = y})
///   AdmmB:   step = 1 / (1 + b), b >= 0
enum class Variant { SlopeXi, IstEta, Gap, AdmmB };

const char* variant_name(Variant v);
/// Accepts slope_xi, ist_eta, gap, admm_b.
Variant parse_variant(const std::string& name);

struct ClusterConfig {
  std::size_t clusters = 1;
  std::uint64_t seed = 0;
  /// 1-D DCT along each cluster's patch stack; defaults to on iff clusters > 1.
  std::optional<bool> stack_transform;

  bool stack() const { return stack_transform.value_or(clusters > 1); }
};

struct SolverConfig {
  Variant variant = Variant::SlopeXi;
  double xi = 1.5;
  double eta = 1.0;
  double b = 0.0;
  std::size_t max_iter = 50;

  PatchConfig patch;
  ClusterConfig cluster;
  ShrinkagePolicy shrinkage;
  /// Replace shrinkage.csr with the operator's M / (n_x n_y) at solve time.
  bool csr_from_operator = true;

  /// Stop once |r_k - r_{k-w}| <= tolerance * r_{k-w} for residual r and window w.
  bool early_stop = false;
  double early_stop_tolerance = 1e-8;
  std::size_t early_stop_window = 5;

  std::optional<ImagePlane> ground_truth;

  double step() const;
  /// Throws InvalidArgument for out-of-range parameters.
  void validate() const;
  /// Non-fatal notes, e.g. xi == 2 where monotone decrease is not guaranteed.
  std::vector<std::string> warnings() const;
};

struct IterationRecord {
  std::size_t k = 0;
  /// ||y - A x~_k||
  double residual = 0.0;
  /// ||x_k - x*|| for the data-updated iterate (NaN without ground truth).
  double error = 0.0;
  /// ||x~_k - x*|| for the denoised iterate.
  double error_denoised = 0.0;
  /// PSNR of x~_k against the ground truth.
  double psnr = 0.0;
  std::size_t nonzeros = 0;
  double lambda_mean = 0.0;
  std::vector<double> lambdas;
  double noise_estimate = 0.0;
  double ms = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  /// Columns k,residual,error,psnr,nnz,lambda_mean,ms. Missing ground-truth
  /// values are left empty; infinite PSNR is written as "inf".
  void write_csv(std::ostream& out) const;
};

struct SolveResult {
  /// Final denoised iterate x~ (the reconstruction).
  ImagePlane image;
  /// Final data-updated iterate x.
  ImagePlane updated;
  IterationTrace trace;
  std::vector<std::string> warnings;
};

/// x_0 = A^T y (A A^T = I makes this the minimum-norm feasible point).
std::vector<double> init(const HadamardOperator& op, std::span<const double> y);

/// x + step * A^T (y - A x).
std::vector<double> data_update(const HadamardOperator& op, std::span<const double> y,
                                std::span<const double> x, double step);

struct DenoiseResult {
  ImagePlane image;
  std::vector<double> lambdas;
  std::size_t nonzeros = 0;
};

/// Patch extraction, optional clustering, transform, per-cluster shrinkage,
/// inverse transform and pixel averaging.
DenoiseResult denoise_step(const ImagePlane& x, const PatchSystem& sys, const ClusterConfig& clustering,
                           const ShrinkagePolicy& policy);

/// Sample standard deviation of A x - A x~, the measurement-space change
/// made by denoising.
double estimate_noise(const HadamardOperator& op, std::span<const double> y,
                      std::span<const double> x, std::span<const double> x_denoised);

/// Runs init, then max_iter rounds of denoise_step followed by data_update.
/// Throws DivergenceError naming the iteration if non-finite values appear.
SolveResult solve(const HadamardOperator& op, std::span<const double> y, const SolverConfig& cfg);

/// Independent per-channel solves sharing `cfg`; channels run concurrently.
/// `truth`, when given, replaces cfg.ground_truth per channel.
std::array<SolveResult, 3> solve_rgb(const HadamardOperator& op,
                                     const std::array<MeasurementVector, 3>& y,
                                     const SolverConfig& cfg,
                                     const std::optional<std::array<ImagePlane, 3>>& truth = {});

}  // namespace slope
