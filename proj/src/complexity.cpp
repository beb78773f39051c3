#include "slicenn/complexity.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace slicenn {

MultCount cc_fnn(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount n_out) {
  return memory * n_slices * n_hidden + n_hidden * n_out;
}

MultCount cc_gru(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount n_out) {
  return 3 * (n_slices * n_hidden + n_hidden * n_hidden) * memory + n_hidden * n_out * memory;
}

MultCount cc_cnn(MultCount memory, MultCount n_slices, MultCount n_hidden, MultCount filter_width, MultCount n_out) {
  if (filter_width < 1 || filter_width > memory) throw ConfigurationError("cc_cnn: filter width must be in [1, M]");
  const MultCount positions = memory - filter_width + 1;
  return n_slices * n_hidden * filter_width * positions + positions * n_hidden * n_out;
}

MultCount cc_ffe(MultCount n_taps) { return n_taps + 1; }

ComplexityReport complexity_of(Arch arch, const FramingSpec& framing, int n_hidden, int filter_width, int n_out) {
  ComplexityReport r;
  r.arch = arch;
  r.mode = framing.mode;
  r.memory = framing.memory();
  r.n_hidden = n_hidden;
  r.filter_width = arch == Arch::cnn ? filter_width : 0;
  r.n_out = n_out;
  r.n_slices = framing.n_slices;
  r.sps = framing.sps;
  switch (arch) {
    case Arch::fnn: r.cc_per_unit = cc_fnn(r.memory, r.n_slices, n_hidden, n_out); break;
    case Arch::gru: r.cc_per_unit = cc_gru(r.memory, r.n_slices, n_hidden, n_out); break;
    case Arch::cnn: r.cc_per_unit = cc_cnn(r.memory, r.n_slices, n_hidden, filter_width, n_out); break;
  }
  r.cc_per_symbol = framing.mode == FramingMode::Sa ? r.cc_per_unit * framing.sps : r.cc_per_unit;
  return r;
}

namespace {

bool closer(const ComplexityReport& a, const ComplexityReport& b, MultCount budget) {
  const MultCount da = std::llabs(a.cc_per_symbol - budget);
  const MultCount db = std::llabs(b.cc_per_symbol - budget);
  if (da != db) return da < db;
  return a.cc_per_symbol < b.cc_per_symbol;
}

}  // namespace

Realization realize_under_budget(const RealizationSearch& search, MultCount budget) {
  Realization out;
  if (budget < 1) {
    out.diagnostic = "budget must be positive";
    return out;
  }
  const int k_max = search.framing.context_symbols;
  const int k_min = (search.arch == Arch::gru && search.vary_memory) ? std::min(1, k_max) : k_max;
  const double lo = budget * (1.0 - search.window);
  const double hi = budget * (1.0 + search.window);

  std::vector<ComplexityReport> per_k_best;
  MultCount cheapest = std::numeric_limits<MultCount>::max();
  for (int k = k_max; k >= k_min; --k) {
    FramingSpec f = search.framing;
    f.context_symbols = k;
    const int nw = search.arch == Arch::cnn ? (search.filter_width > 0 ? std::min(search.filter_width, f.memory()) : f.memory()) : 0;
    ComplexityReport best;
    bool have = false;
    for (int nh = 1; nh <= search.max_hidden; ++nh) {
      const ComplexityReport r = complexity_of(search.arch, f, nh, nw);
      cheapest = std::min(cheapest, r.cc_per_symbol);
      if (r.cc_per_symbol >= lo && r.cc_per_symbol <= hi) out.candidates.push_back(r);
      if (!have || closer(r, best, budget)) {
        best = r;
        have = true;
      }
    }
    if (have) per_k_best.push_back(best);
  }

  if (per_k_best.empty() || static_cast<double>(cheapest) > hi) {
    out.diagnostic = "no " + to_string(search.framing.mode) + "-" + to_string(search.arch) + " realization near budget " +
                     std::to_string(budget) + " (cheapest configuration costs " + std::to_string(cheapest) + ")";
    return out;
  }
  out.achievable = true;
  // Largest context whose best candidate is inside the window.
  for (const auto& r : per_k_best) {
    if (r.cc_per_symbol >= lo && r.cc_per_symbol <= hi) {
      out.chosen = r;
      return out;
    }
  }
  out.chosen = *std::min_element(per_k_best.begin(), per_k_best.end(),
                                 [&](const auto& a, const auto& b) { return closer(a, b, budget); });
  return out;
}

}  // namespace slicenn
