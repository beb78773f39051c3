#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slicenn/harness.hpp"

namespace slicenn {

inline const std::vector<std::string> kResultColumns = {
    "distance_km", "snr_db", "equalizer", "framing", "ber",   "errors", "bits",
    "cc_per_symbol", "budget", "memory", "n_hidden", "train_loss", "status"};

void write_results_csv(std::ostream& os, const SweepResult& r);
void write_penalty_csv(std::ostream& os, const SweepResult& r);
/// Wall-clock seconds per record; kept apart because it varies run to run.
void write_timing_csv(std::ostream& os, const SweepResult& r);

/// Log-BER waterfall, one line per (equalizer, distance).
void write_waterfall_svg(std::ostream& os, const SweepResult& r);
/// Penalty against distance; no-reach points drawn as crosses on the top edge.
void write_penalty_svg(std::ostream& os, const SweepResult& r);
/// BER against per-symbol multiplications.
void write_budget_svg(std::ostream& os, const SweepResult& r);

/// Writes results.csv, timing.csv, meta.json and the plots that apply to
/// the result kind into `dir`, creating it. Throws IoError.
std::vector<std::string> emit_outputs(const SweepResult& r, const std::string& dir);

/// Realizations of every architecture and framing for each budget, plus
/// the reference configurations and the FFE, for Sa at 8 sps ("numerical")
/// and at 2 sps ("experimental"). The last column counts the weight
/// multiplications of an actual forward pass.
void write_complexity_table(std::ostream& os, const std::vector<std::int64_t>& budgets);

}  // namespace slicenn
