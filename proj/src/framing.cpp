#include "slicenn/framing.hpp"

namespace slicenn {

std::string to_string(FramingMode m) { return m == FramingMode::Sa ? "Sa" : "Sy"; }

FramingMode framing_mode_from_string(const std::string& s) {
  if (s == "Sa" || s == "sa") return FramingMode::Sa;
  if (s == "Sy" || s == "sy") return FramingMode::Sy;
  throw ConfigurationError("unknown framing mode '" + s + "'");
}

FramingSpec FramingSpec::make(FramingMode mode, int context_symbols, int sps, int n_slices) {
  FramingSpec s{mode, context_symbols, sps, n_slices};
  s.validate();
  return s;
}

void FramingSpec::validate() const {
  if (context_symbols < 0) throw ConfigurationError("framing: K must be >= 0");
  if (sps < 1) throw ConfigurationError("framing: sps must be >= 1");
  if (n_slices < 1) throw ConfigurationError("framing: n_slices must be >= 1");
}

Eigen::Index frame_start(const FramingSpec& spec, Eigen::Index index, Eigen::Index symbol_alignment) {
  if (spec.mode == FramingMode::Sa) return index - spec.context_samples();
  return symbol_alignment + (index - spec.context_symbols) * spec.sps;
}

namespace {

Eigen::VectorXd frame_at(const SlicedSignal& sliced, const FramingSpec& spec, Eigen::Index start) {
  if (sliced.n_slices() != spec.n_slices) throw DimensionError("frame: slice count does not match framing spec");
  if (sliced.sps != spec.sps) throw DimensionError("frame: signal sps does not match framing spec");
  const Eigen::Index m = spec.memory();
  if (start < 0 || start + m > sliced.length()) throw BoundaryError("frame: index lacks context inside the signal");
  Eigen::VectorXd v(m * spec.n_slices);
  for (Eigen::Index p = 0; p < m; ++p)
    for (int i = 0; i < spec.n_slices; ++i) v[p * spec.n_slices + i] = sliced.slices[i].samples[start + p];
  return v;
}

}  // namespace

Eigen::VectorXd frame_sa(const SlicedSignal& sliced, const FramingSpec& spec, Eigen::Index k) {
  if (spec.mode != FramingMode::Sa) throw ConfigurationError("frame_sa: framing spec is not Sa");
  return frame_at(sliced, spec, frame_start(spec, k, sliced.symbol_alignment));
}

Eigen::VectorXd frame_sy(const SlicedSignal& sliced, const FramingSpec& spec, Eigen::Index t) {
  if (spec.mode != FramingMode::Sy) throw ConfigurationError("frame_sy: framing spec is not Sy");
  return frame_at(sliced, spec, frame_start(spec, t, sliced.symbol_alignment));
}

FrameSource::FrameSource(Eigen::MatrixXd interleaved, FramingSpec spec, Eigen::Index symbol_alignment)
    : data_(std::move(interleaved)), spec_(spec), alignment_(symbol_alignment) {
  if (data_.rows() != spec_.n_slices) throw DimensionError("FrameSource: slice count does not match framing spec");
}

bool FrameSource::in_range(Eigen::Index index) const {
  const Eigen::Index start = frame_start(spec_, index, alignment_);
  return start >= 0 && start + spec_.memory() <= data_.cols();
}

Eigen::Map<const Eigen::VectorXd> FrameSource::frame(Eigen::Index index) const {
  if (!in_range(index)) throw BoundaryError("FrameSource: index lacks context inside the signal");
  const Eigen::Index start = frame_start(spec_, index, alignment_);
  return Eigen::Map<const Eigen::VectorXd>(data_.data() + start * data_.rows(), spec_.feature_length());
}

void FrameSource::gather(const Eigen::Index* indices, Eigen::Index count, Eigen::MatrixXd& out) const {
  out.resize(spec_.feature_length(), count);
  for (Eigen::Index b = 0; b < count; ++b) out.col(b) = frame(indices[b]);
}

}  // namespace slicenn
