#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicenn/framing.hpp"
#include "slicenn/network.hpp"

namespace slicenn {

using MultCount = std::int64_t;

/// Real multiplications of one forward pass (one equalized unit), weight
/// applications only; activations are not counted.
MultCount cc_fnn(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount n_out = 1);
MultCount cc_gru(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount n_out = 1);
/// Throws ConfigurationError when filter_width > memory.
MultCount cc_cnn(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount filter_width, MultCount n_out = 1);
MultCount cc_ffe(MultCount n_taps);

struct ComplexityReport {
  Arch arch = Arch::fnn;
  FramingMode mode = FramingMode::Sy;
  int memory = 0;
  int n_hidden = 0;
  int filter_width = 0;
  int n_out = 1;
  int n_slices = 4;
  int sps = 2;
  MultCount cc_per_unit = 0;
  MultCount cc_per_symbol = 0;  // Sa: cc_per_unit * sps; Sy: cc_per_unit
};

ComplexityReport complexity_of(Arch arch, const FramingSpec& framing, int n_hidden, int filter_width, int n_out = 1);

struct RealizationSearch {
  Arch arch = Arch::fnn;
  FramingSpec framing;          // K here is the largest context tried
  int max_hidden = 64;
  bool vary_memory = false;     // GRU: also try K = framing.K - 1, ..., 1
  int filter_width = 0;         // CNN: 0 means N_w = M
  double window = 0.2;          // relative band for "near budget" candidates
};

struct Realization {
  bool achievable = false;
  ComplexityReport chosen;
  std::vector<ComplexityReport> candidates;  // all candidates within +-window of the budget
  std::string diagnostic;
};

/// Picks the (M, N_h) realization whose per-symbol count is closest to the
/// budget, ties going to the cheaper one. With `vary_memory`, the largest
/// context whose best candidate lands within the window wins; if none does,
/// the overall closest candidate is used. Not achievable when even the
/// cheapest configuration exceeds budget * (1 + window).
Realization realize_under_budget(const RealizationSearch& search, MultCount budget);

}  // namespace slicenn
