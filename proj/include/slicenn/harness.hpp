#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slicenn/complexity.hpp"
#include "slicenn/config.hpp"

namespace slicenn {

/// What produced a record: a configured NN equalizer or a reference receiver
/// on the single-photodiode signal.
struct Series {
  enum class Kind { equalizer, unequalized, ffe, back_to_back };
  Kind kind = Kind::equalizer;
  int index = 0;  // into ExperimentConfig::equalizers
  std::string label;
  std::string framing = "-";
};

/// Configured equalizers first, then the enabled references.
std::vector<Series> series_of(const ExperimentConfig& config);

struct SweepRecord {
  double distance_km = 0.0;
  double snr_db = 0.0;
  std::string equalizer;
  std::string framing = "-";
  double ber = 0.0;
  std::size_t errors = 0;
  std::size_t bits = 0;
  MultCount cc_per_symbol = 0;
  std::int64_t budget = 0;  // complexity scan only
  int memory = 0;
  int n_hidden = 0;
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // or the error kind
  std::string message;
  double wall_time_s = 0.0;

  bool ok() const { return status == "ok"; }
};

struct PenaltyRecord {
  double distance_km = 0.0;
  std::string equalizer;
  RequiredSnr required;
  std::optional<double> penalty_db;
};

struct SweepResult {
  std::string kind;  // "ber_vs_snr", "penalty_vs_distance", "complexity"
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<SweepRecord> records;     // sorted by coordinates
  std::vector<PenaltyRecord> penalties; // penalty sweep only
  std::optional<RequiredSnr> reference; // required SNR of the 0 km unequalized receiver
};

/// Seeds: the link (bits and noise) depends on (master, distance, snr) so
/// every receiver at one point sees the same data; training adds the
/// equalizer label and, in the complexity scan, the budget.
std::uint64_t link_seed(std::uint64_t master, double distance_km, double snr_db);
std::uint64_t train_seed(std::uint64_t master, double distance_km, double snr_db, const std::string& label,
                         std::int64_t budget = 0);

/// One sweep point, fully determined by its arguments. Exceptions become a
/// record whose status is the error kind.
SweepRecord run_point(const ExperimentConfig& config, const Series& series, double distance_km, double snr_db);

/// Same, for an explicit equalizer (used by the complexity scan).
SweepRecord run_equalizer_point(const ExperimentConfig& config, const EqualizerSpec& spec, const std::string& label,
                                double distance_km, double snr_db, std::int64_t budget = 0);

/// Runs `n` independent jobs on up to `workers` threads.
void run_parallel(std::size_t n, int workers, const std::function<void(std::size_t)>& job);

/// BER against SNR at one distance for every series, on the configured grid
/// as given. With an empty grid each series is auto-bracketed upward from snr_start_db in snr_step_db
/// steps until it crosses KP4 or hits snr_cap_db.
SweepResult run_ber_vs_snr(const ExperimentConfig& config, double distance_km);

/// Required SNR at KP4 per (series, distance) and the penalty against the
/// 0 km unequalized receiver. Grids that do not bracket the crossing are
/// extended up to the cap (and down by the same span); no-reach otherwise.
SweepResult run_penalty_vs_distance(const ExperimentConfig& config);

/// For each budget and configured equalizer: realize_under_budget, then
/// train and evaluate at (scan_distance_km, scan_snr_db). Unachievable
/// budgets yield a record with status "unachievable".
SweepResult run_complexity_scan(const ExperimentConfig& config);

/// Curve of one series/distance from a result; zero-error points floored at
/// half a bit error.
std::vector<CurvePoint> curve_of(const SweepResult& r, const std::string& equalizer, double distance_km);

}  // namespace slicenn
