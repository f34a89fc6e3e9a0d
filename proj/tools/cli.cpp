#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "dimlift/autoencoder.hpp"
#include "dimlift/config_io.hpp"
#include "dimlift/data_model.hpp"
#include "dimlift/error.hpp"
#include "dimlift/lift.hpp"
#include "dimlift/random.hpp"
#include "dimlift/rmt_detector.hpp"
#include "dimlift/spectral.hpp"
#include "dimlift/synth.hpp"
#include "dimlift/version.hpp"
#include "json.hpp"

namespace dimlift::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::string checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<int> window;
  bool no_residual = false;
  std::vector<long> snapshot_at;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Tracks the files a command writes so the manifest can digest them.
class RunRecord {
 public:
  RunRecord(std::string command, const std::vector<std::string>& args)
      : command_(std::move(command)), args_(args), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const fs::path& path) { outputs_.push_back(path); }
  void config(json c) { config_ = std::move(c); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write_manifest(const fs::path& path) const {
    json in = json::array();
    for (const auto& p : inputs_) in.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    json outs = json::array();
    for (const auto& p : outputs_) {
      outs.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p.string())}});
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m = {{"command", command_},
              {"arguments", args_},
              {"version", kVersion},
              {"seed", seed_},
              {"config", config_},
              {"inputs", in},
              {"outputs", outs},
              {"duration_seconds", seconds}};
    std::ofstream f(path);
    f << m.dump(2) << "\n";
    if (!f) fail(ErrorKind::config, "cannot write " + path.string());
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> inputs_;
  std::vector<fs::path> outputs_;
  json config_;
  std::uint64_t seed_ = 0;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::config, "cannot write " + path.string());
  return f;
}

void make_dir(const std::string& dir) {
  if (dir.empty()) fail(ErrorKind::config, "--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::config, "cannot create " + dir + ": " + ec.message());
}

SpatioTemporalMatrix load_data(const Options& o, RunRecord& rec) {
  if (o.data.empty()) fail(ErrorKind::config, "--data is required");
  rec.input(o.data);
  return load_matrix(o.data);
}

LiftConfig apply_k(LiftConfig lift, const Options& o, int channels) {
  if (o.k) {
    lift.k = *o.k;
    lift.n = 0;
    lift.permutation.clear();
  }
  return resolve_lift(std::move(lift), channels);
}

int cmd_synth(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  if (o.config.empty()) fail(ErrorKind::config, "--config is required");
  if (o.out.empty()) fail(ErrorKind::config, "--out is required");
  RunRecord rec("synth", args);
  rec.input(o.config);
  ScenarioConfig cfg = parse_scenario_config(read_text(o.config));
  if (o.seed) cfg.seed = *o.seed;
  rec.seed(cfg.seed);
  rec.config(json::parse(dump_scenario_config(cfg)));

  const fs::path path(o.out);
  if (path.has_parent_path()) make_dir(path.parent_path().string());
  save_matrix(path, generate(cfg));
  rec.output(path);
  rec.write_manifest(path.string() + ".manifest.json");
  out << "wrote " << cfg.channels << "x" << cfg.samples << " scenario to " << path.string() << "\n";
  return kOk;
}

int cmd_detect_rmt(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  RunRecord rec("detect-rmt", args);
  RmtDetectorConfig cfg;
  cfg.lift = LiftConfig{2, 0, 4096, {}};
  if (!o.config.empty()) {
    rec.input(o.config);
    cfg = parse_rmt_config(read_text(o.config));
  }
  const SpatioTemporalMatrix d = load_data(o, rec);
  cfg.lift = apply_k(cfg.lift, o, d.channels());
  if (o.seed) cfg.seed = *o.seed;
  if (o.window) cfg.window.width = *o.window;
  if (o.no_residual) cfg.use_residual = false;
  if (!o.snapshot_at.empty()) cfg.snapshot_at = o.snapshot_at;
  rec.seed(cfg.seed);
  rec.config(json::parse(dump_rmt_config(cfg)));
  make_dir(o.out);

  const DetectionReport r = run_rmt(d, cfg);
  const fs::path dir(o.out);
  {
    auto f = open_out(dir / "curves.csv");
    f << "t,les_raw,les_norm,msr_raw,msr_norm\n";
    for (std::size_t i = 0; i < r.les_raw.size(); ++i) {
      f << r.les_raw.time_at(i) << ',' << fmt(r.les_raw.values[i]) << ','
        << fmt(r.les_curve.values[i]) << ',';
      if (cfg.compute_msr) f << fmt(r.msr_raw.values[i]) << ',' << fmt(r.msr_curve.values[i]);
      else f << ',';
      f << '\n';
    }
    rec.output(dir / "curves.csv");
  }
  {
    auto f = open_out(dir / "alarms.jsonl");
    for (const Alarm& a : r.alarms) {
      f << json{{"t", a.t}, {"indicator", to_string(a.indicator)}, {"sigmas", a.deviation_sigmas}}
               .dump()
        << '\n';
    }
    rec.output(dir / "alarms.jsonl");
  }
  for (const auto& [t, s] : r.spectral_snapshots) {
    const fs::path p = dir / ("snapshot_" + std::to_string(t) + ".json");
    auto f = open_out(p);
    f << dump_spectral_summary(s, t) << '\n';
    rec.output(p);
  }
  rec.write_manifest(dir / "manifest.json");

  long first_alarm = -1;
  if (!r.alarms.empty()) first_alarm = r.alarms.front().t;
  out << "dim " << cfg.lift.lifted_dim() << ", " << r.les_raw.size() << " windows, "
      << r.alarms.size() << " alarm points";
  if (first_alarm >= 0) out << ", first at t=" << first_alarm;
  out << "\n";
  return kOk;
}

void write_rmse(const SaeReport& r, const fs::path& dir, RunRecord& rec) {
  auto f = open_out(dir / "rmse.csv");
  f << "t,rmse_raw,rmse_norm\n";
  for (std::size_t i = 0; i < r.rmse_raw.size(); ++i) {
    f << r.rmse_raw.time_at(i) << ',' << fmt(r.rmse_raw.values[i]) << ','
      << fmt(r.rmse_curve.values[i]) << '\n';
  }
  rec.output(dir / "rmse.csv");
}

int cmd_detect_sae(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  RunRecord rec("detect-sae", args);
  const SpatioTemporalMatrix d = load_data(o, rec);
  make_dir(o.out);
  const fs::path dir(o.out);

  if (!o.checkpoint.empty()) {
    rec.input(o.checkpoint);
    const Checkpoint ckpt = parse_checkpoint(read_text(o.checkpoint));
    rec.seed(ckpt.model.seed);
    rec.config(json::parse(dump_sae_config(ckpt.config)));
    const SaeReport r = score_sae(d, ckpt.config, ckpt.model, ckpt.scaler);
    write_rmse(r, dir, rec);
    rec.write_manifest(dir / "manifest.json");
    out << "scored " << r.rmse_raw.size() << " samples with " << o.checkpoint << "\n";
    return kOk;
  }

  SaeConfig cfg;
  cfg.lift = LiftConfig{2, 0, 4096, {}};
  if (!o.config.empty()) {
    rec.input(o.config);
    cfg = parse_sae_config(read_text(o.config));
  }
  if (o.k) {
    if (*o.k == 1) cfg.lift.reset();
    else cfg.lift = LiftConfig{*o.k, 0, 4096, {}};
  }
  if (cfg.lift) cfg.lift = resolve_lift(*cfg.lift, d.channels());
  if (o.seed) cfg.train.seed = *o.seed;
  rec.seed(cfg.train.seed);
  rec.config(json::parse(dump_sae_config(cfg)));

  const SaeReport r = run_sae(d, cfg);
  write_rmse(r, dir, rec);
  {
    auto f = open_out(dir / "loss_trace.csv");
    f << "iteration,loss\n";
    for (std::size_t i = 0; i < r.trace.losses.size(); ++i) {
      f << i + 1 << ',' << fmt(r.trace.losses[i]) << '\n';
    }
    rec.output(dir / "loss_trace.csv");
  }
  {
    auto f = open_out(dir / "model.json");
    f << dump_checkpoint({r.model, r.scaler, cfg}) << '\n';
    rec.output(dir / "model.json");
  }
  {
    json s = {{"input_dim", r.model.input_dim()},
              {"iterations", r.trace.losses.size()},
              {"initial_loss", r.trace.losses.front()},
              {"final_loss", r.trace.losses.back()},
              {"constant_coordinates", r.constant_coordinates}};
    s["iterations_to_tolerance"] =
        r.trace.iterations_to_tolerance ? json(*r.trace.iterations_to_tolerance) : json(nullptr);
    auto f = open_out(dir / "sae_summary.json");
    f << s.dump(2) << '\n';
    rec.output(dir / "sae_summary.json");
  }
  rec.write_manifest(dir / "manifest.json");
  if (!r.constant_coordinates.empty()) {
    out << r.constant_coordinates.size()
        << " coordinates have zero training range and were scaled to 0.5\n";
  }
  out << "dim " << r.model.input_dim() << ", final loss " << r.trace.losses.back() << ", "
      << r.rmse_raw.size() << " samples scored\n";
  return kOk;
}

int cmd_esd_check(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
  RunRecord rec("esd-check", args);
  EsdConfig cfg;
  cfg.lift = LiftConfig{2, 0, 4096, {}};
  if (!o.config.empty()) {
    rec.input(o.config);
    cfg = parse_esd_config(read_text(o.config));
  }
  const SpatioTemporalMatrix raw = load_data(o, rec);
  cfg.lift = apply_k(cfg.lift, o, raw.channels());
  if (o.seed) cfg.seed = *o.seed;
  if (o.window) cfg.width = *o.window;
  if (o.no_residual) cfg.use_residual = false;
  rec.seed(cfg.seed);
  rec.config(json::parse(dump_esd_config(cfg)));
  make_dir(o.out);

  const SpatioTemporalMatrix d = cfg.use_residual ? residual_matrix(raw) : raw;
  const int width = cfg.width.value_or(d.samples());
  WindowSpec{width, 1}.validate(d.samples());
  const long t = cfg.t.value_or(d.t_end());
  const LiftedMatrix lifted = lift_matrix(d, cfg.lift, ScaleMode::sqrt_dim);
  const auto x = window_at(lifted, t, width);
  const CovarianceSpec weights =
      cfg.unit_weights ? CovarianceSpec::unit(width) : CovarianceSpec::uniform(width);
  const SpectralSummary s =
      summarize_window(x, weights, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)), cfg.sigma2);

  const fs::path dir(o.out);
  {
    auto f = open_out(dir / "summary.json");
    f << dump_spectral_summary(s, t) << '\n';
    rec.output(dir / "summary.json");
  }
  const double total = weights.total();
  std::vector<double> scaled(s.covariance_eigs);
  for (double& e : scaled) e /= total;
  {
    auto f = open_out(dir / "eigenvalues.csv");
    f << "index,eigenvalue\n";
    for (std::size_t i = 0; i < scaled.size(); ++i) f << i << ',' << fmt(scaled[i]) << '\n';
    rec.output(dir / "eigenvalues.csv");
  }
  {
    // Histogram of the nonzero spectrum next to the law's continuous density.
    const MarchenkoPastur law(s.c_ratio_reciprocal, cfg.sigma2);
    const double hi = 1.05 * std::max(law.upper(), scaled.back());
    const int bins = cfg.histogram_bins;
    const double w = hi / bins;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    const double tol = 1e-9 * std::max(std::abs(scaled.front()), std::abs(scaled.back()));
    for (double e : scaled) {
      if (std::abs(e) <= tol) continue;
      const int b = std::clamp(static_cast<int>(e / w), 0, bins - 1);
      ++counts[static_cast<std::size_t>(b)];
    }
    auto f = open_out(dir / "histogram.csv");
    f << "bin_lo,bin_hi,esd_density,mp_density\n";
    const double m = static_cast<double>(scaled.size());
    for (int b = 0; b < bins; ++b) {
      const double lo = b * w;
      const double mass = law.cdf(lo + w) - law.cdf_left(lo) - (b == 0 ? law.atom() : 0.0);
      f << fmt(lo) << ',' << fmt(lo + w) << ','
        << fmt(static_cast<double>(counts[static_cast<std::size_t>(b)]) / (m * w)) << ','
        << fmt(std::max(mass, 0.0) / w) << '\n';
    }
    rec.output(dir / "histogram.csv");
  }
  {
    auto f = open_out(dir / "ring.csv");
    f << "re,im,modulus\n";
    for (const auto& z : s.ring_eigs) {
      f << fmt(z.real()) << ',' << fmt(z.imag()) << ',' << fmt(std::abs(z)) << '\n';
    }
    rec.output(dir / "ring.csv");
  }
  rec.write_manifest(dir / "manifest.json");
  out << "dim " << s.dim << ", c_ratio " << s.c_ratio << ", ks_distance_mp " << s.ks_distance_mp
      << ", ring_coverage " << s.ring_coverage << "\n";
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::format:
    case ErrorKind::parse:
    case ErrorKind::config:
      return kConfig;
    case ErrorKind::parameter:
    case ErrorKind::dimension:
    case ErrorKind::window:
      return kPrecondition;
    case ErrorKind::normalization:
    case ErrorKind::domain:
    case ErrorKind::numerical:
    case ErrorKind::divergence:
      return kNumerical;
  }
  return kInternal;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot read " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kronecker-lift anomaly detection for multichannel time series", "dimlift"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Options o;
  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration");
    sub->add_option("--out", o.out, "output path")->required();
    sub->add_option("--seed", o.seed, "override the configured seed");
  };
  auto detect = [&o](CLI::App* sub) {
    sub->add_option("--data", o.data, "measurement CSV")->required();
    sub->add_option("--k", o.k, "number of lift segments (n = P / k)")->check(CLI::Range(1, 4));
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scenario CSV");
  common(synth);
  CLI::App* rmt = app.add_subcommand("detect-rmt", "windowed LES/MSR detector");
  common(rmt);
  detect(rmt);
  rmt->add_option("--window", o.window, "window width N'");
  rmt->add_flag("--no-residual", o.no_residual, "analyze raw values instead of first differences");
  rmt->add_option("--snapshot-at", o.snapshot_at, "keep spectral snapshots at these t")
      ->delimiter(',');
  CLI::App* sae = app.add_subcommand("detect-sae", "autoencoder reconstruction-error detector");
  common(sae);
  detect(sae);
  sae->add_option("--checkpoint", o.checkpoint, "score with a trained model.json");
  CLI::App* esd = app.add_subcommand("esd-check", "single-window spectrum vs. reference laws");
  common(esd);
  detect(esd);
  esd->add_option("--window", o.window, "window width (default: all samples)");
  esd->add_flag("--no-residual", o.no_residual, "analyze raw values (default)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, args, out);
    if (rmt->parsed()) return cmd_detect_rmt(o, args, out);
    if (sae->parsed()) return cmd_detect_sae(o, args, out);
    if (esd->parsed()) return cmd_esd_check(o, args, out);
  } catch (const Error& e) {
    err << "dimlift: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "dimlift: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}

}  // namespace dimlift::cli
