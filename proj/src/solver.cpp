#include "slope/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#include "slope/error.hpp"
#include "slope/metrics.hpp"

namespace slope {

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) return;
  if (std::isinf(v)) {
    out << (v > 0 ? "inf" : "-inf");
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::SlopeXi: return "slope_xi";
    case Variant::IstEta: return "ist_eta";
    case Variant::Gap: return "gap";
    case Variant::AdmmB: return "admm_b";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "slope_xi" || name == "slope") return Variant::SlopeXi;
  if (name == "ist_eta" || name == "ist") return Variant::IstEta;
  if (name == "gap") return Variant::Gap;
  if (name == "admm_b" || name == "admm") return Variant::AdmmB;
  throw InvalidArgument("unknown variant '" + name + "' (slope_xi, ist_eta, gap, admm_b)");
}

double SolverConfig::step() const {
  switch (variant) {
    case Variant::SlopeXi: return xi;
    case Variant::IstEta: return 1.0 / eta;
    case Variant::Gap: return 1.0;
    case Variant::AdmmB: return 1.0 / (1.0 + b);
  }
  return 1.0;
}

void SolverConfig::validate() const {
  switch (variant) {
    case Variant::SlopeXi:
      if (!(xi > 0.0 && xi <= 2.0)) throw InvalidArgument("xi must be in (0, 2]");
      break;
    case Variant::IstEta:
      if (!(eta >= 1.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be >= 1");
      break;
    case Variant::AdmmB:
      if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("b must be >= 0");
      break;
    case Variant::Gap: break;
  }
  if (cluster.clusters < 1) throw InvalidArgument("cluster count must be at least 1");
  if (early_stop && early_stop_window < 1) throw InvalidArgument("early-stop window must be >= 1");
  shrinkage.validate();
}

std::vector<std::string> SolverConfig::warnings() const {
  std::vector<std::string> out;
  if (variant == Variant::SlopeXi && xi == 2.0) {
    out.emplace_back("xi = 2: the error is non-increasing but not guaranteed to decrease");
  }
  return out;
}

void IterationTrace::write_csv(std::ostream& out) const {
  out << "k,residual,error,psnr,nnz,lambda_mean,ms\n";
  for (const auto& r : records) {
    out << r.k << ',';
    write_number(out, r.residual);
    out << ',';
    write_number(out, r.error);
    out << ',';
    write_number(out, r.psnr);
    out << ',' << r.nonzeros << ',';
    write_number(out, r.lambda_mean);
    out << ',';
    write_number(out, r.ms);
    out << '\n';
  }
}

std::vector<double> init(const HadamardOperator& op, std::span<const double> y) {
  return op.adjoint(y);
}

std::vector<double> data_update(const HadamardOperator& op, std::span<const double> y,
                                std::span<const double> x, double step) {
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  if (y.size() != op.measurements()) throw InvalidArgument("data_update: measurement length mismatch");
  std::vector<double> r = op.forward(x);
  for (std::size_t m = 0; m < r.size(); ++m) r[m] = y[m] - r[m];
  const std::vector<double> back = op.adjoint(r);
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += step * back[i];
  return out;
}

DenoiseResult denoise_step(const ImagePlane& x, const PatchSystem& sys, const ClusterConfig& clustering,
                           const ShrinkagePolicy& policy) {
  const PatchMatrix patches = extract_patches(sys, x);
  ClusterAssignment assignment{1, std::vector<std::uint32_t>(patches.count, 0)};
  if (clustering.clusters > 1) assignment = cluster_patches(patches, clustering.clusters, clustering.seed);
  const bool stack = clustering.stack();
  ShrinkResult shrunk = shrink_set(analyze3d(sys, assignment, patches, stack), policy);
  const PatchMatrix back = synthesize3d(sys, assignment, shrunk.beta, stack);
  return DenoiseResult{average_synthesize(sys, back), std::move(shrunk.lambdas), shrunk.nonzeros};
}

double estimate_noise(const HadamardOperator& op, [[maybe_unused]] std::span<const double> y,
                      std::span<const double> x, std::span<const double> x_denoised) {
  const std::vector<double> a = op.forward(x);
  const std::vector<double> b = op.forward(x_denoised);
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (std::size_t m = 0; m < n; ++m) mean += a[m] - b[m];
  mean /= double(n);
  double ss = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double d = a[m] - b[m] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / double(n - 1));
}

SolveResult solve(const HadamardOperator& op, std::span<const double> y, const SolverConfig& cfg) {
  cfg.validate();
  if (y.size() != op.measurements()) {
    throw InvalidArgument("solve: expected " + std::to_string(op.measurements()) +
                          " measurements, got " + std::to_string(y.size()));
  }
  std::vector<double> truth;
  if (cfg.ground_truth) {
    if (cfg.ground_truth->width() != op.width() || cfg.ground_truth->height() != op.height()) {
      throw InvalidArgument("ground truth dimensions do not match the operator");
    }
    truth = pad_to_order(*cfg.ground_truth, op.order());
  }
  ShrinkagePolicy policy = cfg.shrinkage;
  if (cfg.csr_from_operator) policy.csr = std::min(1.0, op.csr());

  const PatchSystem sys(op.width(), op.height(), cfg.patch);
  const std::size_t width = op.width();
  const std::size_t height = op.height();
  const double step = cfg.step();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SolveResult result;
  result.warnings = cfg.warnings();

  std::vector<double> x = init(op, y);
  if (!all_finite(x)) throw DivergenceError(0, "non-finite values in the initial estimate");
  std::vector<double> x_tilde = x;

  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    DenoiseResult den = denoise_step(crop_from_order(x, width, height), sys, cfg.cluster, policy);
    x_tilde = pad_to_order(den.image, op.order());

    std::vector<double> r = op.forward(x_tilde);
    for (std::size_t m = 0; m < r.size(); ++m) r[m] = y[m] - r[m];
    const std::vector<double> back = op.adjoint(r);

    IterationRecord rec;
    rec.k = k;
    rec.residual = l2_norm(r);
    rec.noise_estimate = estimate_noise(op, y, x, x_tilde);

    // Data update; pad pixels carry no signal and stay zero.
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x_tilde[i] + step * back[i];
    for (std::size_t i = width * height; i < x.size(); ++i) x[i] = 0.0;

    if (!all_finite(x) || !std::isfinite(rec.residual)) {
      throw DivergenceError(k, "non-finite values at iteration " + std::to_string(k));
    }
    rec.nonzeros = den.nonzeros;
    rec.lambdas = std::move(den.lambdas);
    double lsum = 0.0;
    for (double l : rec.lambdas) lsum += l;
    rec.lambda_mean = rec.lambdas.empty() ? 0.0 : lsum / double(rec.lambdas.size());
    if (!truth.empty()) {
      rec.error = l2_distance(x, truth);
      rec.error_denoised = l2_distance(x_tilde, truth);
      rec.psnr = psnr(den.image, *cfg.ground_truth).psnr_db;
    } else {
      rec.error = rec.error_denoised = rec.psnr = nan;
    }
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.records.push_back(std::move(rec));

    if (cfg.early_stop && k > cfg.early_stop_window) {
      const auto& recs = result.trace.records;
      const double now = recs.back().residual;
      const double then = recs[recs.size() - 1 - cfg.early_stop_window].residual;
      if (std::abs(now - then) <= cfg.early_stop_tolerance * then) break;
    }
  }

  result.image = crop_from_order(x_tilde, width, height);
  result.updated = crop_from_order(x, width, height);
  return result;
}

std::array<SolveResult, 3> solve_rgb(const HadamardOperator& op,
                                     const std::array<MeasurementVector, 3>& y,
                                     const SolverConfig& cfg,
                                     const std::optional<std::array<ImagePlane, 3>>& truth) {
  std::array<SolveResult, 3> out;
  std::array<std::exception_ptr, 3> errors;
#pragma omp parallel for schedule(static, 1)
  for (int c = 0; c < 3; ++c) {
    try {
      SolverConfig channel_cfg = cfg;
      if (truth) channel_cfg.ground_truth = (*truth)[c];
      out[c] = solve(op, y[c].values, channel_cfg);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace slope
