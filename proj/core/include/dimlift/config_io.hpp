#pragma once

// JSON documents for scenarios, detector configs and SAE checkpoints. Every
// document carries "schema_version"; unknown keys are rejected so typos fail
// loudly. Malformed JSON raises Error(parse), bad content Error(config).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dimlift/autoencoder.hpp"
#include "dimlift/rmt_detector.hpp"
#include "dimlift/synth.hpp"

namespace dimlift {

inline constexpr int kSchemaVersion = 1;

/// Settings of a single-window spectral comparison.
struct EsdConfig {
  LiftConfig lift;
  std::optional<int> width;  // unset = every available sample
  std::optional<long> t;     // window end; unset = last sample
  bool use_residual = false;
  bool unit_weights = false;  // tau = 1 instead of 1/N'
  double sigma2 = 1.0;
  int histogram_bins = 60;
  std::uint64_t seed = 0;
};

struct Checkpoint {
  AutoencoderModel model;
  MinMaxScaler scaler;
  SaeConfig config;
};

std::string read_text(const std::filesystem::path& path);

/// A lift whose "n" is 0 in a config takes n = channels / k once the data is known.
LiftConfig resolve_lift(LiftConfig lift, int channels);

ScenarioConfig parse_scenario_config(const std::string& json);
std::string dump_scenario_config(const ScenarioConfig& cfg);

RmtDetectorConfig parse_rmt_config(const std::string& json);
std::string dump_rmt_config(const RmtDetectorConfig& cfg);

SaeConfig parse_sae_config(const std::string& json);
std::string dump_sae_config(const SaeConfig& cfg);

EsdConfig parse_esd_config(const std::string& json);
std::string dump_esd_config(const EsdConfig& cfg);

std::string dump_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& json);

/// Snapshot record: dim, c_ratio, mp_support, ks_distance_mp, ring_inner,
/// ring_coverage and the supporting diagnostics (eigenvalue lists excluded).
std::string dump_spectral_summary(const SpectralSummary& s, long t);

}  // namespace dimlift
