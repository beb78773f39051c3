#pragma once

#include <iosfwd>
#include <string>

#include "slicenn/equalizer.hpp"

namespace slicenn {

inline constexpr int kModelFormatVersion = 1;

// Line-oriented text format. Header "slicenn-model <version>", then
// "key value..." lines for the spec, normalization, decision rule and loss
// traces, then one "tensor <name> <rows> <cols>" line per parameter tensor
// in declared order followed by its column-major values, then "end".
// Floating-point values are C99 hex floats, so a round trip is bit-exact.
void write_model(std::ostream& os, const TrainedModel& model);
TrainedModel read_model(std::istream& is);

void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

}  // namespace slicenn
