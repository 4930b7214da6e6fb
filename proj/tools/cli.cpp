#include "cli.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "scene.hpp"
#include "slope/acquisition.hpp"
#include "slope/error.hpp"
#include "slope/hadamard.hpp"
#include "slope/measurement_io.hpp"
#include "slope/metrics.hpp"
#include "slope/pnm.hpp"
#include "slope/solver.hpp"

namespace slopecam {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short form for human-facing summaries.
std::string fmt_short(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  slope::write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

// FNV-1a over a file's bytes, recorded in manifests so replay can check outputs.
std::string file_digest(const fs::path& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : slope::read_file(path)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void write_manifest(const fs::path& out, const std::string& command, const std::vector<std::string>& args,
                    json resolved, const std::vector<fs::path>& artifacts) {
  json m;
  m["tool"] = "slopecam";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["cwd"] = fs::current_path().string();
  m["args"] = args;
  m["resolved"] = std::move(resolved);
  json outputs = json::object();
  for (const auto& a : artifacts) outputs[a.string()] = file_digest(a);
  m["outputs"] = std::move(outputs);
  write_text(manifest_path(out), m.dump(2) + "\n");
}

fs::path channel_path(const fs::path& base, std::size_t c) {
  static constexpr std::array<const char*, 3> kSuffix{"_r", "_g", "_b"};
  fs::path p = base;
  p.replace_filename(base.stem().string() + kSuffix[c] + base.extension().string());
  return p;
}

void apply_thread_override(std::ostream& err) {
  const char* env = std::getenv("SLOPE_NUM_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    err << "warning: ignoring SLOPE_NUM_THREADS='" << env << "'\n";
    return;
  }
  omp_set_num_threads(static_cast<int>(n));
}

struct SenseArgs {
  std::string image;
  double csr = 0.1;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  bool physical = false;
  double g = 1.0;
  double f = 0.0;
  std::string out;
};

struct ReconstructArgs {
  std::string input;
  std::string variant = "slope_xi";
  double xi = 1.5;
  double eta = 1.0;
  double b = 0.0;
  std::size_t iters = 50;
  std::size_t patch = 8;
  std::size_t stride = 4;
  std::size_t clusters = 1;
  std::uint64_t cluster_seed = 0;
  std::string keep_mode = "csr";
  double keep_fraction = 0.5;
  std::string out;
  std::string trace;
  std::string truth;
  bool early_stop = false;
  int bit_depth = 8;
};

struct EvalArgs {
  std::string recon;
  std::string truth;
};

struct DemoArgs {
  std::string image;
  std::size_t size = 128;
  std::string csr_sweep = "0.05,0.1";
  std::size_t iters = 50;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_sense(const SenseArgs& a, const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
  if (a.noise_sigma < 0.0 || !std::isfinite(a.noise_sigma)) {
    throw slope::InvalidArgument("noise sigma must be finite and non-negative");
  }
  if (a.physical && a.noise_sigma > 0.0) {
    throw slope::InvalidArgument("noise injection applies to ideal sensing only");
  }
  const slope::Raster raster = slope::read_pnm(a.image);
  const slope::HadamardOperator op =
      slope::build_operator(raster.width(), raster.height(), a.csr, a.seed);
  const slope::CalibrationModel cal{a.g, a.f};
  if (a.physical) cal.validate();

  std::vector<slope::MeasurementVector> channels;
  if (raster.planes.size() == 3) {
    const std::array<slope::ImagePlane, 3> rgb{raster.planes[0], raster.planes[1], raster.planes[2]};
    auto y = a.physical ? slope::sense_rgb_physical(op, rgb, cal)
                        : slope::sense_rgb(op, rgb, a.noise_sigma, a.noise_seed);
    channels.assign(y.begin(), y.end());
  } else {
    channels.push_back(a.physical ? slope::sense_physical(op, raster.planes[0], cal)
                                  : slope::sense_ideal(op, raster.planes[0], a.noise_sigma, a.noise_seed));
  }
  slope::write_measurements(a.out, channels);

  json resolved;
  resolved["image"] = a.image;
  resolved["out"] = a.out;
  resolved["width"] = op.width();
  resolved["height"] = op.height();
  resolved["channels"] = channels.size();
  resolved["csr_requested"] = a.csr;
  resolved["measurements"] = op.measurements();
  resolved["csr"] = op.csr();
  resolved["seed"] = a.seed;
  resolved["permutation_seed"] = op.seeds().permutation;
  resolved["row_seed"] = op.seeds().rows;
  resolved["noise_sigma"] = a.noise_sigma;
  resolved["noise_seed"] = a.noise_seed;
  resolved["physical"] = a.physical;
  resolved["g"] = a.g;
  resolved["f"] = a.f;
  write_manifest(a.out, "sense", args, std::move(resolved), {fs::path(a.out)});

  out << "sensed " << op.width() << "x" << op.height() << " x" << channels.size() << " with "
      << op.measurements() << " measurements (csr " << fmt_short(op.csr()) << ") -> " << a.out << "\n";
  (void)err;
  return kOk;
}

slope::SolverConfig solver_config(const ReconstructArgs& a) {
  slope::SolverConfig cfg;
  cfg.variant = slope::parse_variant(a.variant);
  cfg.xi = a.xi;
  cfg.eta = a.eta;
  cfg.b = a.b;
  cfg.max_iter = a.iters;
  cfg.patch = {a.patch, a.stride};
  cfg.cluster.clusters = a.clusters;
  cfg.cluster.seed = a.cluster_seed;
  cfg.shrinkage.mode = a.keep_mode == "fixed" ? slope::KeepMode::FixedFraction : slope::KeepMode::CsrProportional;
  cfg.shrinkage.keep_fraction = a.keep_fraction;
  cfg.early_stop = a.early_stop;
  cfg.validate();
  return cfg;
}

void write_trace(const fs::path& path, const slope::IterationTrace& trace) {
  std::ostringstream csv;
  trace.write_csv(csv);
  write_text(path, csv.str());
}

int cmd_reconstruct(const ReconstructArgs& a, const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  slope::SolverConfig cfg = solver_config(a);
  std::vector<slope::MeasurementVector> channels = slope::read_measurements(a.input);
  const slope::MeasurementMeta meta = channels.front().meta;
  const slope::HadamardOperator op = slope::operator_from_meta(meta);
  if (meta.raw) {
    for (auto& ch : channels) ch = slope::calibrate(ch, meta.calibration, op);
  }

  std::optional<slope::Raster> truth;
  if (!a.truth.empty()) {
    truth = slope::read_pnm(a.truth);
    if (truth->planes.size() != channels.size() || truth->width() != op.width() ||
        truth->height() != op.height()) {
      throw slope::InvalidArgument("truth image does not match the measurement geometry");
    }
  }

  for (const auto& w : cfg.warnings()) err << "warning: " << w << "\n";

  std::vector<slope::SolveResult> results;
  if (channels.size() == 3) {
    std::optional<std::array<slope::ImagePlane, 3>> t;
    if (truth) t = std::array<slope::ImagePlane, 3>{truth->planes[0], truth->planes[1], truth->planes[2]};
    auto r = slope::solve_rgb(op, {channels[0], channels[1], channels[2]}, cfg, t);
    results.assign(std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  } else {
    if (truth) cfg.ground_truth = truth->planes[0];
    results.push_back(slope::solve(op, channels[0].values, cfg));
  }

  slope::Raster image;
  image.maxval = a.bit_depth == 16 ? 65535 : 255;
  for (const auto& r : results) image.planes.push_back(r.image);
  slope::write_pnm(a.out, image);

  std::vector<fs::path> traces;
  if (!a.trace.empty()) {
    if (results.size() == 1) {
      traces.emplace_back(a.trace);
    } else {
      for (std::size_t c = 0; c < results.size(); ++c) traces.push_back(channel_path(a.trace, c));
    }
    for (std::size_t c = 0; c < results.size(); ++c) write_trace(traces[c], results[c].trace);
  }

  json resolved;
  resolved["measurements"] = a.input;
  resolved["out"] = a.out;
  json trace_files = json::array();
  for (const auto& t : traces) trace_files.push_back(t.string());
  resolved["trace"] = trace_files;
  resolved["truth"] = a.truth;
  resolved["width"] = op.width();
  resolved["height"] = op.height();
  resolved["channels"] = channels.size();
  resolved["csr"] = op.csr();
  resolved["permutation_seed"] = meta.seeds.permutation;
  resolved["row_seed"] = meta.seeds.rows;
  resolved["calibrated"] = meta.raw;
  resolved["variant"] = slope::variant_name(cfg.variant);
  resolved["xi"] = cfg.xi;
  resolved["eta"] = cfg.eta;
  resolved["b"] = cfg.b;
  resolved["step"] = cfg.step();
  resolved["iterations"] = cfg.max_iter;
  resolved["patch"] = cfg.patch.edge;
  resolved["stride"] = cfg.patch.stride;
  resolved["clusters"] = cfg.cluster.clusters;
  resolved["cluster_seed"] = cfg.cluster.seed;
  resolved["stack_transform"] = cfg.cluster.stack();
  resolved["keep_mode"] = a.keep_mode;
  resolved["keep_fraction"] = cfg.shrinkage.keep_fraction;
  resolved["early_stop"] = cfg.early_stop;
  resolved["bit_depth"] = a.bit_depth;
  // Trace files carry wall-clock timings, so only the image is digested.
  write_manifest(a.out, "reconstruct", args, std::move(resolved), {fs::path(a.out)});

  const auto& last = results.front().trace.records;
  out << "reconstructed " << op.width() << "x" << op.height() << " x" << results.size() << " ("
      << slope::variant_name(cfg.variant) << ", " << (last.empty() ? 0 : last.back().k) << " iterations) -> "
      << a.out << "\n";
  if (truth) {
    const slope::QualityReport q = slope::psnr(std::span<const slope::ImagePlane>(truth->planes),
                                               std::span<const slope::ImagePlane>(image.planes));
    out << "psnr " << fmt_short(q.psnr_db) << " dB\n";
  }
  return kOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const slope::Raster recon = slope::read_pnm(a.recon);
  const slope::Raster truth = slope::read_pnm(a.truth);
  if (recon.planes.size() != truth.planes.size() || recon.width() != truth.width() ||
      recon.height() != truth.height()) {
    throw slope::InvalidArgument("images differ in shape or channel count");
  }
  const slope::QualityReport q = slope::psnr(std::span<const slope::ImagePlane>(recon.planes),
                                             std::span<const slope::ImagePlane>(truth.planes));
  out << "mse " << fmt(q.mse) << "\n";
  out << "psnr " << fmt(q.psnr_db) << "\n";
  if (q.channels.size() > 1) {
    static constexpr std::array<const char*, 3> kName{"r", "g", "b"};
    for (std::size_t c = 0; c < q.channels.size(); ++c) {
      out << "psnr_" << kName[c] << " " << fmt(q.channels[c].psnr_db) << "\n";
    }
  }
  return kOk;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw slope::InvalidArgument("bad number in list: '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw slope::InvalidArgument("empty list");
  return values;
}

std::string xi_label(double xi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", xi);
  return buf;
}

int cmd_demo(const DemoArgs& a, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static constexpr std::array<double, 4> kSteps{0.5, 1.0, 1.5, 2.0};
  const std::vector<double> sweep = parse_list(a.csr_sweep);

  slope::ImagePlane truth;
  if (a.image.empty()) {
    if (a.size < 8) throw slope::InvalidArgument("demo size must be at least 8");
    truth = procedural_scene(a.size, a.size, a.seed);
  } else {
    const slope::Raster r = slope::read_pnm(a.image);
    truth = r.planes[0];
    if (r.planes.size() == 3) {
      for (std::size_t i = 0; i < truth.size(); ++i) {
        truth.data()[i] = (r.planes[0].data()[i] + r.planes[1].data()[i] + r.planes[2].data()[i]) / 3.0;
      }
    }
  }

  std::ostringstream csv;
  csv << "csr,k";
  for (double xi : kSteps) {
    const std::string tag = "xi" + xi_label(xi) + (xi >= 2.0 ? "_not_guaranteed_monotone" : "");
    csv << ",error_" << tag << ",psnr_" << tag;
  }
  csv << "\n";

  json finals = json::array();
  for (double csr : sweep) {
    const slope::HadamardOperator op = slope::build_operator(truth.width(), truth.height(), csr, a.seed);
    const slope::MeasurementVector y = slope::sense_ideal(op, truth);
    const slope::ImagePlane x0 =
        slope::crop_from_order(slope::init(op, y.values), truth.width(), truth.height());
    const double e0 = slope::l2_distance(x0.values(), truth.values());
    const double p0 = slope::psnr(x0, truth).psnr_db;

    std::vector<slope::IterationTrace> traces;
    for (double xi : kSteps) {
      slope::SolverConfig cfg;
      cfg.xi = xi;
      cfg.max_iter = a.iters;
      cfg.ground_truth = truth;
      traces.push_back(slope::solve(op, y.values, cfg).trace);
    }
    csv << fmt(op.csr()) << ",0";
    for (std::size_t s = 0; s < kSteps.size(); ++s) csv << "," << fmt(e0) << "," << fmt(p0);
    csv << "\n";
    for (std::size_t k = 0; k < a.iters; ++k) {
      csv << fmt(op.csr()) << "," << k + 1;
      for (const auto& t : traces) csv << "," << fmt(t.records[k].error) << "," << fmt(t.records[k].psnr);
      csv << "\n";
    }
    json f;
    f["csr"] = op.csr();
    f["measurements"] = op.measurements();
    for (std::size_t s = 0; s < kSteps.size(); ++s) {
      const double p = a.iters == 0 ? p0 : traces[s].records.back().psnr;
      f["psnr_xi" + xi_label(kSteps[s])] = std::isfinite(p) ? json(p) : json("inf");
    }
    finals.push_back(f);
    out << "csr " << fmt_short(op.csr()) << ": final psnr";
    for (std::size_t s = 0; s < kSteps.size(); ++s) {
      out << " xi=" << xi_label(kSteps[s]) << " "
          << fmt_short(a.iters == 0 ? p0 : traces[s].records.back().psnr);
    }
    out << "\n";
  }
  write_text(a.out, csv.str());

  json resolved;
  resolved["image"] = a.image.empty() ? json("procedural") : json(a.image);
  resolved["width"] = truth.width();
  resolved["height"] = truth.height();
  resolved["csr_sweep"] = sweep;
  resolved["xi"] = kSteps;
  resolved["iterations"] = a.iters;
  resolved["seed"] = a.seed;
  resolved["patch"] = slope::PatchConfig{}.edge;
  resolved["stride"] = slope::PatchConfig{}.stride;
  resolved["final"] = finals;
  write_manifest(a.out, "demo", args, std::move(resolved), {fs::path(a.out)});
  (void)err;
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int cmd_replay(const std::string& manifest_file, std::ostream& out, std::ostream& err, int depth) {
  if (depth > 0) throw slope::InvalidArgument("a manifest cannot replay another replay");
  const std::vector<std::uint8_t> bytes = slope::read_file(manifest_file);
  json m;
  try {
    m = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw slope::IoError(std::string("unreadable manifest: ") + e.what());
  }
  if (!m.is_object() || m.value("tool", "") != "slopecam" || !m.contains("args") || !m["args"].is_array()) {
    throw slope::IoError("not a slopecam manifest: " + manifest_file);
  }
  const auto args = m["args"].get<std::vector<std::string>>();
  const json expected = m.value("outputs", json::object());

  const fs::path here = fs::current_path();
  const fs::path there = m.value("cwd", here.string());
  std::error_code ec;
  if (fs::is_directory(there, ec)) fs::current_path(there);
  int code = kOk;
  try {
    code = dispatch(args, out, err, depth + 1);
    if (code == kOk) {
      for (const auto& [path, digest] : expected.items()) {
        if (file_digest(path) != digest.get<std::string>()) {
          err << "replay mismatch: " << path << "\n";
          code = kValidation;
        }
      }
    }
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  if (code == kOk) out << "replay reproduced " << expected.size() << " artifact(s)\n";
  return code;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Lensless compressive camera simulator and reconstruction", "slopecam"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SenseArgs sa;
  auto* sense = app.add_subcommand("sense", "Simulate acquisition of a PGM/PPM image");
  sense->add_option("image", sa.image, "Input image (P5 or P6)")->required();
  sense->add_option("--csr", sa.csr, "Compressive sensing ratio M / pixels")->capture_default_str();
  sense->add_option("--seed", sa.seed, "Sensing-matrix seed")->capture_default_str();
  sense->add_option("--noise-sigma", sa.noise_sigma, "Gaussian measurement noise std")->capture_default_str();
  sense->add_option("--noise-seed", sa.noise_seed, "Noise seed")->capture_default_str();
  sense->add_flag("--physical", sa.physical, "Record raw {0,1}-aperture readings");
  sense->add_option("--g", sa.g, "Open-element transmittance")->capture_default_str();
  sense->add_option("--f", sa.f, "Closed-element leakage")->capture_default_str();
  sense->add_option("--out", sa.out, "Measurement file to write")->required();

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct an image from a measurement file");
  rec->add_option("measurements", ra.input, "Measurement file")->required();
  rec->add_option("--variant", ra.variant, "slope_xi, ist_eta, gap or admm_b")->capture_default_str();
  rec->add_option("--xi", ra.xi, "Step size for slope_xi")->capture_default_str();
  rec->add_option("--eta", ra.eta, "Majorization constant for ist_eta")->capture_default_str();
  rec->add_option("--b", ra.b, "Penalty weight for admm_b")->capture_default_str();
  rec->add_option("--iters", ra.iters, "Iterations")->capture_default_str();
  rec->add_option("--patch", ra.patch, "Patch edge length")->capture_default_str();
  rec->add_option("--stride", ra.stride, "Patch stride")->capture_default_str();
  rec->add_option("--clusters", ra.clusters, "k-means patch clusters")->capture_default_str();
  rec->add_option("--cluster-seed", ra.cluster_seed, "Clustering seed")->capture_default_str();
  rec->add_option("--keep-mode", ra.keep_mode, "Kept coefficients per cluster: csr or fixed")
      ->check(CLI::IsMember({"csr", "fixed"}))
      ->capture_default_str();
  rec->add_option("--keep-fraction", ra.keep_fraction, "Fraction kept with --keep-mode fixed")
      ->capture_default_str();
  rec->add_option("--out", ra.out, "Output image")->required();
  rec->add_option("--trace", ra.trace, "Per-iteration CSV trace");
  rec->add_option("--truth", ra.truth, "Ground-truth image for error and PSNR tracing");
  rec->add_flag("--early-stop", ra.early_stop, "Stop when the residual stalls");
  rec->add_option("--bit-depth", ra.bit_depth, "Output bit depth")
      ->check(CLI::IsMember({8, 16}))
      ->capture_default_str();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "PSNR of a reconstruction against the truth");
  eval->add_option("reconstruction", ea.recon)->required();
  eval->add_option("truth", ea.truth)->required();

  DemoArgs da;
  auto* demo = app.add_subcommand("demo", "Error and PSNR per iteration for several step sizes");
  demo->add_option("--image", da.image, "Grayscale test image (default: procedural scene)");
  demo->add_option("--size", da.size, "Procedural scene size")->capture_default_str();
  demo->add_option("--csr-sweep", da.csr_sweep, "Comma-separated CSr values")->capture_default_str();
  demo->add_option("--iters", da.iters, "Iterations")->capture_default_str();
  demo->add_option("--seed", da.seed, "Seed for scene and sensing matrix")->capture_default_str();
  demo->add_option("--out", da.out, "CSV file to write")->required();

  std::string manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest and check outputs");
  replay->add_option("manifest", manifest)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  if (*sense) return cmd_sense(sa, args, out, err);
  if (*rec) return cmd_reconstruct(ra, args, out, err);
  if (*eval) return cmd_eval(ea, out);
  if (*demo) return cmd_demo(da, args, out, err);
  return cmd_replay(manifest, out, err, depth);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_thread_override(err);
  try {
    return dispatch(args, out, err, 0);
  } catch (const slope::DivergenceError& e) {
    err << "error: diverged at iteration " << e.iteration() << ": " << e.what() << "\n";
    return kDivergence;
  } catch (const slope::InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const slope::PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const slope::DegenerateCalibration& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const slope::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const slope::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const slope::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace slopecam
