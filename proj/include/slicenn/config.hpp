#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicenn/equalizer.hpp"
#include "slicenn/link.hpp"

namespace slicenn {

inline constexpr int kConfigSchemaVersion = 1;

enum class Profile { fast, paper };

std::string to_string(Profile p);
Profile profile_from_string(const std::string& s);

struct ReferenceOptions {
  bool unequalized = true;  // single photodiode, matched filter only
  bool back_to_back = true; // same receiver at 0 km
  bool ffe = true;
  int ffe_taps = 11;
  double ffe_step = 1e-3;
  Eigen::Index ffe_train_symbols = 50000;
};

struct ExperimentConfig {
  LinkConfig link;
  std::vector<EqualizerSpec> equalizers;
  ReferenceOptions references;

  std::vector<double> distances_km{74.0};
  std::vector<double> snr_db;          // empty: auto-bracket around the KP4 crossing
  std::vector<std::int64_t> budgets{100, 200, 500, 1000, 1500};

  Eigen::Index train_symbols = 1 << 19;
  Eigen::Index validation_symbols = 1 << 14;
  Eigen::Index test_symbols = 1 << 16;

  double snr_start_db = 0.0;  // first auto-bracket point
  double snr_step_db = 1.0;
  double snr_cap_db = 30.0;

  double scan_distance_km = 74.0;  // complexity scan operating point
  double scan_snr_db = 10.0;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 1;

  /// Defaults for a profile: reference FNN pair, split sizes, epoch cap and
  /// optimizer.
  static ExperimentConfig preset(Profile p);
  /// Applies a profile's split sizes, epoch cap and optimizer in place.
  void apply_profile(Profile p);

  /// Throws ConfigurationError.
  void validate() const;

  /// Symbols a single simulated record needs, rounded up to a power of two.
  Eigen::Index total_symbols() const;
  DataSplit split() const;
};

/// JSON document with a "schema" version; unknown keys are rejected.
std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& c);

/// FNV-1a 64 of the canonical JSON without out_dir and workers, as 16 hex
/// digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace slicenn
