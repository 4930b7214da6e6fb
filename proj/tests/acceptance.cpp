// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slope/acquisition.hpp"
#include "slope/hadamard.hpp"
#include "slope/metrics.hpp"
#include "slope/patch.hpp"
#include "slope/pnm.hpp"
#include "slope/random.hpp"
#include "slope/shrinkage.hpp"
#include "slope/solver.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

slope::ImagePlane fixture(const char* name) {
  return slope::read_pnm(std::filesystem::path(SLOPE_TEST_DATA_DIR) / name).planes.at(0);
}

double initial_error(const slope::HadamardOperator& op, std::span<const double> y, const slope::ImagePlane& truth) {
  return slope::l2_distance(slope::init(op, y), slope::pad_to_order(truth, op.order()));
}

Outcome operator_correctness() {
  const auto t0 = Clock::now();
  double fwht_err = 0.0;
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    const auto x = oracle::random_vector(n, n);
    fwht_err = std::max(fwht_err, oracle::max_abs_diff(slope::fwht_copy(x), oracle::matvec(oracle::sylvester(n), x)));
  }
  double adj_err = 0.0, gram_err = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    slope::Xoshiro256 rng(1000 + t);
    const std::size_t w = 1 + rng.below(48), h = 1 + rng.below(48);
    const std::size_t n = slope::next_power_of_two(w * h);
    const std::size_t m = 1 + rng.below(n);
    const auto op = slope::build_operator(w, h, m, slope::derive_seeds(t));
    const auto x = oracle::random_vector(n, 2 * t);
    const auto y = oracle::random_vector(m, 2 * t + 1);
    adj_err = std::max(adj_err, std::fabs(oracle::dot(op.forward(x), y) - oracle::dot(x, op.adjoint(y))));
    gram_err = std::max(gram_err, oracle::max_abs_diff(op.forward(op.adjoint(y)), y));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = fwht_err < 1e-10 && adj_err < 1e-10 && gram_err < 1e-12 && secs < 10.0;
  o.detail = format("fwht vs dense max err %.2e (<1e-10); adjoint gap %.2e (<1e-10); |A A^T y - y| %.2e (<1e-12); %.2f s (<10 s)",
                    fwht_err, adj_err, gram_err, secs);
  return o;
}

Outcome calibration_round_trip() {
  slope::Xoshiro256 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double f = 0.3 * rng.uniform();
    const double g = f + (1.0 - f) * (1.0 - rng.uniform());  // (f, 1]
    const std::size_t w = 8 + rng.below(40), h = 8 + rng.below(40);
    const auto op = slope::build_operator(w, h, 0.05 + 0.9 * rng.uniform(), 100 + t);
    const slope::ImagePlane x(w, h, oracle::random_vector(w * h, 300 + t, 0.0, 1.0));
    const slope::CalibrationModel cal{g, f};
    const auto y = slope::calibrate(slope::sense_physical(op, x, cal), cal, op);
    worst = std::max(worst, oracle::max_abs_diff(y.values, slope::sense_ideal(op, x).values));
  }
  return {worst < 1e-9, format("50 random (g, f): max |calibrate(sense_physical) - sense_ideal| = %.2e (<1e-9)", worst)};
}

Outcome patch_algebra() {
  bool identity_exact = true;
  double diag_err = 0.0;
  std::size_t configs = 0;
  for (std::size_t edge : {2u, 3u, 4u, 8u}) {
    for (std::size_t stride = 1; stride <= edge; ++stride) {
      for (std::size_t w = edge; w <= 16; ++w) {
        for (std::size_t h = edge; h <= 16; h += 3) {
          const slope::PatchSystem sys(w, h, {edge, stride});
          const slope::ImagePlane x(w, h, oracle::random_vector(w * h, w * 31 + h));
          identity_exact &= slope::average_synthesize(sys, slope::extract_patches(sys, x)) == x;

          std::vector<double> diag(w * h, 0.0);
          slope::PatchMatrix unit{sys.patch_size(), sys.patch_count(),
                                  std::vector<double>(sys.coefficient_count(), 0.0)};
          for (std::size_t col = 0; col < unit.data.size(); ++col) {
            unit.data[col] = 1.0;
            const auto img = slope::average_synthesize(sys, unit);
            for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += img.data()[i] * img.data()[i];
            unit.data[col] = 0.0;
          }
          const auto cov = oracle::coverage(w, h, edge, stride);
          for (std::size_t i = 0; i < diag.size(); ++i) diag_err = std::max(diag_err, std::fabs(diag[i] - 1.0 / cov[i]));
          ++configs;
        }
      }
    }
  }

  const auto img = fixture("camera_64.pgm");
  const slope::PatchSystem sys(64, 64);
  const auto patches = slope::extract_patches(sys, img);
  const double err2d = oracle::max_abs_diff(slope::dct2_synthesize(slope::dct2_analyze(patches)).data, patches.data);
  double err3d = 0.0;
  for (std::size_t c : {1u, 4u, 9u}) {
    const auto a = slope::cluster_patches(patches, c, 7);
    for (bool stack : {false, true}) {
      const auto back = slope::synthesize3d(sys, a, slope::analyze3d(sys, a, patches, stack), stack);
      err3d = std::max(err3d, oracle::max_abs_diff(back.data, patches.data));
    }
  }
  Outcome o;
  o.pass = identity_exact && diag_err < 1e-15 && err2d < 1e-10 && err3d < 1e-10;
  o.detail = format("W Q = I exact on %zu geometries: %s; diag(W W^T) vs 1/c_p max err %.1e; 2-D round trip %.1e, 3-D %.1e (<1e-10)",
                    configs, identity_exact ? "yes" : "NO", diag_err, err2d, err3d);
  return o;
}

Outcome shrinkage_oracle() {
  slope::Xoshiro256 rng(77);
  double worst = 0.0;
  bool lambda_ok = true, sparsity_ok = true;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    slope::CoefficientSet alpha;
    alpha.patch_size = 16;
    const std::size_t clusters = 1 + rng.below(6);
    for (std::size_t c = 0; c < clusters; ++c) {
      auto block = oracle::random_vector(16 * (1 + rng.below(40)), t * 16 + c, -4.0, 4.0);
      // Some exact ties and zeros.
      for (std::size_t i = 0; i + 3 < block.size(); i += 7) block[i + 1] = -block[i], block[i + 3] = 0.0;
      alpha.clusters.push_back(std::move(block));
    }
    slope::ShrinkagePolicy policy;
    policy.mode = t % 2 ? slope::KeepMode::FixedFraction : slope::KeepMode::CsrProportional;
    policy.keep_fraction = 0.02 + 0.96 * rng.uniform();
    policy.csr = 0.01 + 0.99 * rng.uniform();
    const auto r = slope::shrink_set(alpha, policy);
    for (std::size_t c = 0; c < clusters; ++c) {
      const auto& a = alpha.clusters[c];
      // m* from its definition: round(rate * n) clamped to [1, n - 1].
      const double n = double(a.size());
      const double rate = policy.mode == slope::KeepMode::FixedFraction ? policy.keep_fraction : policy.csr;
      const auto m = static_cast<std::size_t>(std::clamp<long long>(
          std::max(std::llround(rate * n),
                   policy.mode == slope::KeepMode::CsrProportional ? std::llround(policy.floor_scale * rate * n) : 0LL),
          1, static_cast<long long>(a.size()) - 1));
      const double lambda = oracle::lambda_by_sort(a, m);
      lambda_ok &= r.lambdas[c] == lambda;
      std::size_t nnz = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::fabs(r.beta.clusters[c][i] - oracle::soft(a[i], lambda)));
        nnz += r.beta.clusters[c][i] != 0.0;
      }
      sparsity_ok &= nnz <= m;
    }
  }
  return {worst <= 1e-14 && lambda_ok && sparsity_ok,
          format("1000 sets: max |beta - brute force| %.1e (<=1e-14); thresholds %s; nnz <= m* %s", worst,
                 lambda_ok ? "identical" : "DIFFER", sparsity_ok ? "always" : "VIOLATED")};
}

struct Problem {
  double csr;
  std::uint64_t seed;
};

Outcome anytime_property() {
  const auto truth = fixture("camera_128.pgm");
  std::size_t runs = 0, monotone_runs = 0, tenfold_runs = 0;
  double worst_violation = 0.0, best_ratio = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
  double slowest = 0.0;
  for (double csr : {0.05, 0.1}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto op = slope::build_operator(128, 128, csr, seed);
      const auto y = slope::sense_ideal(op, truth).values;
      const double e0 = initial_error(op, y, truth);
      for (double xi : {0.5, 1.0, 1.5}) {
        slope::SolverConfig cfg;
        cfg.xi = xi;
        cfg.max_iter = 100;
        cfg.ground_truth = truth;
        const auto t0 = Clock::now();
        const auto r = slope::solve(op, y, cfg);
        slowest = std::max(slowest, seconds_since(t0));
        double prev = e0;
        bool mono = true;
        for (const auto& rec : r.trace.records) {
          const double rel = (rec.error - prev) / prev;
          if (rel > 1e-9) mono = false;
          worst_violation = std::max(worst_violation, rel);
          prev = rec.error;
        }
        const double ratio = e0 / r.trace.records.back().error;
        best_ratio = std::max(best_ratio, ratio);
        worst_ratio = std::min(worst_ratio, ratio);
        ++runs;
        monotone_runs += mono;
        tenfold_runs += ratio >= 10.0;
      }
    }
  }
  Outcome o;
  o.pass = monotone_runs == runs && tenfold_runs == runs && slowest < 120.0;
  o.detail = format("non-increasing error in %zu/%zu runs (largest relative rise %.1e); "
                    "final <= initial/10 in %zu/%zu runs (reduction %.2fx..%.2fx); slowest run %.2f s (<120 s)",
                    monotone_runs, runs, std::max(0.0, worst_violation), tenfold_runs, runs, worst_ratio, best_ratio,
                    slowest);
  return o;
}

Outcome step_ordering() {
  const auto truth = fixture("camera_128.pgm");
  const std::size_t horizon = 400;
  bool ordered = true;
  std::string detail;
  for (double csr : {0.05, 0.1}) {
    const auto op = slope::build_operator(128, 128, csr, 1);
    const auto y = slope::sense_ideal(op, truth).values;
    std::vector<std::vector<double>> errors;
    for (double xi : {0.5, 1.0, 1.5}) {
      slope::SolverConfig cfg;
      cfg.xi = xi;
      cfg.max_iter = horizon;
      cfg.ground_truth = truth;
      std::vector<double> e;
      for (const auto& rec : slope::solve(op, y, cfg).trace.records) e.push_back(rec.error);
      errors.push_back(std::move(e));
    }
    const double target = 2.0 * errors[2][99];  // ξ = 1.5 after the 100-iteration budget
    std::vector<std::size_t> hits;
    for (const auto& e : errors) {
      const auto it = std::find_if(e.begin(), e.end(), [&](double v) { return v <= target; });
      hits.push_back(it == e.end() ? horizon + 1 : std::size_t(it - e.begin()) + 1);
    }
    ordered &= hits[0] >= hits[1] && hits[1] >= hits[2] && hits[0] <= horizon;
    detail += format("%scsr %.2f: iterations to 2x final error %zu / %zu / %zu", detail.empty() ? "" : "; ", csr,
                     hits[0], hits[1], hits[2]);
  }
  return {ordered, detail + " for xi = 0.5 / 1 / 1.5 (non-increasing)"};
}

Outcome variant_equivalence() {
  const auto truth = fixture("camera_128.pgm");
  const auto op = slope::build_operator(128, 128, 0.1, 4);
  const auto y = slope::sense_ideal(op, truth).values;
  double worst = 0.0;
  for (std::size_t k = 1; k <= 20; ++k) {
    slope::SolverConfig base;
    base.max_iter = k;
    base.variant = slope::Variant::Gap;
    const auto ref = slope::solve(op, y, base);
    auto xi = base;
    xi.variant = slope::Variant::SlopeXi;
    xi.xi = 1.0;
    auto ist = base;
    ist.variant = slope::Variant::IstEta;
    ist.eta = 1.0;
    auto admm = base;
    admm.variant = slope::Variant::AdmmB;
    admm.b = 0.0;
    for (const auto* cfg : {&xi, &ist, &admm}) {
      const auto r = slope::solve(op, y, *cfg);
      worst = std::max(worst, oracle::max_abs_diff(r.image.data(), ref.image.data()));
      worst = std::max(worst, oracle::max_abs_diff(r.updated.data(), ref.updated.data()));
    }
  }
  return {worst <= 1e-12,
          format("gap vs slope_xi(1), ist_eta(1), admm_b(0) over iterations 1..20: max iterate difference %.1e (<=1e-12)",
                 worst)};
}

Outcome exact_recovery() {
  const auto camera = fixture("camera_128.pgm");
  const auto full = slope::build_operator(128, 128, 1.0, 5);
  slope::SolverConfig one;
  one.max_iter = 1;
  one.ground_truth = camera;
  const double full_psnr = slope::solve(full, slope::sense_ideal(full, camera).values, one).trace.records[0].psnr;

  // Block-DCT-sparse scene: K random coefficients on non-overlapping 8x8 blocks.
  const std::size_t n = 64, k = 100;
  const slope::PatchSystem blocks(n, n, {8, 8});
  slope::PatchMatrix coeffs{64, blocks.patch_count(), std::vector<double>(blocks.coefficient_count(), 0.0)};
  slope::Xoshiro256 rng(5);
  for (std::size_t placed = 0; placed < k;) {
    const auto i = rng.below(coeffs.data.size());
    if (coeffs.data[i] != 0.0) continue;
    coeffs.data[i] = 2.0 * rng.uniform() - 1.0 + (rng.uniform() < 0.5 ? -1.0 : 1.0);
    ++placed;
  }
  const auto sparse = slope::average_synthesize(blocks, slope::dct2_synthesize(coeffs));
  const auto op = slope::build_operator(n, n, 0.3, 11);
  slope::SolverConfig cfg;
  cfg.xi = 1.0;
  cfg.max_iter = 100;
  cfg.patch = {8, 8};
  cfg.shrinkage.mode = slope::KeepMode::FixedFraction;
  cfg.shrinkage.keep_fraction = 0.1;
  cfg.ground_truth = sparse;
  const auto r = slope::solve(op, slope::sense_ideal(op, sparse).values, cfg);
  const double norm = slope::l2_norm(sparse.values());
  std::size_t reached = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : r.trace.records) {
    best = std::min(best, rec.error / norm);
    if (reached == 0 && rec.error / norm < 1e-3) reached = rec.k;
  }
  Outcome o;
  o.pass = full_psnr >= 100.0 && k <= 0.1 * double(op.measurements()) && reached > 0;
  o.detail = format("csr 1: psnr %.1f dB after 1 iteration (>=100); K=%zu <= 0.1 M=%.1f at csr 0.3: relative error "
                    "< 1e-3 %s%zu (best %.1e)",
                    full_psnr, k, 0.1 * double(op.measurements()), reached ? "at iteration " : "never, ", reached, best);
  return o;
}

Outcome desk_scale_table() {
  const auto truth = fixture("camera_256.pgm");
  const auto op = slope::build_operator(256, 256, 0.1, 1);
  const auto y = slope::sense_ideal(op, truth).values;
  slope::SolverConfig slope_cfg;
  slope_cfg.ground_truth = truth;
  auto gap_cfg = slope_cfg;
  gap_cfg.variant = slope::Variant::Gap;
  const auto s = slope::solve(op, y, slope_cfg);
  const auto g = slope::solve(op, y, gap_cfg);
  const double ps = slope::psnr(s.image, truth).psnr_db;
  const double pg = slope::psnr(g.image, truth).psnr_db;
  double max_ms = 0.0, sum_ms = 0.0;
  for (const auto& rec : s.trace.records) {
    max_ms = std::max(max_ms, rec.ms);
    sum_ms += rec.ms;
  }
  return {ps >= 23.0 && ps >= pg && max_ms <= 1000.0,
          format("256x256 camera, csr 0.1, 50 iterations: xi=1.5 %.2f dB (>=23), gap %.2f dB (<= xi=1.5); "
                 "per-iteration %.0f ms mean, %.0f ms max (<=1000)",
                 ps, pg, sum_ms / double(s.trace.records.size()), max_ms)};
}

Outcome noise_robustness() {
  const auto truth = fixture("camera_256.pgm");
  const auto op = slope::build_operator(256, 256, 0.1, 1);
  const auto clean = slope::sense_ideal(op, truth).values;
  double mean_abs = 0.0;
  for (double v : clean) mean_abs += std::fabs(v);
  mean_abs /= double(clean.size());
  const double sigma = 0.01 * mean_abs;
  const auto noisy = slope::sense_ideal(op, truth, sigma, 99).values;

  slope::SolverConfig cfg;
  cfg.ground_truth = truth;
  const auto a = slope::solve(op, clean, cfg);
  const auto b = slope::solve(op, noisy, cfg);
  const double pa = slope::psnr(a.image, truth).psnr_db;
  const double pb = slope::psnr(b.image, truth).psnr_db;
  const double sigma_hat = b.trace.records.back().noise_estimate;
  const double factor = std::max(sigma_hat / sigma, sigma / sigma_hat);
  return {pa - pb <= 3.0 && factor <= 3.0,
          format("sigma %.3e (1%% of mean |y|): psnr %.2f dB noisy vs %.2f dB clean, loss %.2f dB (<=3); "
                 "estimated sigma %.3e, off by %.1fx (<=3x)",
                 sigma, pb, pa, pa - pb, sigma_hat, factor)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "operator correctness", operator_correctness},
      {2, "calibration round trip", calibration_round_trip},
      {3, "patch algebra", patch_algebra},
      {4, "shrinkage oracle equivalence", shrinkage_oracle},
      {5, "anytime property", anytime_property},
      {6, "step-size ordering", step_ordering},
      {7, "variant equivalence", variant_equivalence},
      {8, "exact recovery", exact_recovery},
      {9, "desk-scale quality", desk_scale_table},
      {10, "noise robustness", noise_robustness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %2d %-28s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
