#pragma once

#include <string>

#include "slicenn/link.hpp"

namespace slicenn {

enum class FramingMode { Sa, Sy };

std::string to_string(FramingMode m);
FramingMode framing_mode_from_string(const std::string& s);

/// Input window geometry. One-sided context L = K * sps samples, current
/// unit q (1 sample for Sa, sps samples for Sy), memory M = 2L + q.
struct FramingSpec {
  FramingMode mode = FramingMode::Sy;
  int context_symbols = 3;  // K
  int sps = 2;
  int n_slices = 4;

  static FramingSpec make(FramingMode mode, int context_symbols, int sps, int n_slices = 4);

  int unit_width() const { return mode == FramingMode::Sa ? 1 : sps; }  // q
  int context_samples() const { return context_symbols * sps; }        // L
  int memory() const { return 2 * context_samples() + unit_width(); }  // M
  int feature_length() const { return memory() * n_slices; }

  void validate() const;
};

/// Index of the first sample of the frame for unit `index` (a sample index
/// for Sa, a symbol index for Sy). Frames are M consecutive samples.
Eigen::Index frame_start(const FramingSpec& spec, Eigen::Index index, Eigen::Index symbol_alignment);

/// Frames stored time-major: element `m * n_slices + i` is slice i at window
/// position m.
Eigen::VectorXd frame_sa(const SlicedSignal& sliced, const FramingSpec& spec, Eigen::Index k);
Eigen::VectorXd frame_sy(const SlicedSignal& sliced, const FramingSpec& spec, Eigen::Index t);

/// Frame source over an interleaved (n_slices x N) sample matrix; frames
/// are contiguous column blocks of it.
class FrameSource {
 public:
  FrameSource(Eigen::MatrixXd interleaved, FramingSpec spec, Eigen::Index symbol_alignment);

  const FramingSpec& spec() const { return spec_; }
  Eigen::Index length() const { return data_.cols(); }
  bool in_range(Eigen::Index index) const;
  Eigen::Map<const Eigen::VectorXd> frame(Eigen::Index index) const;
  /// Copies frames for `indices` into the columns of `out`.
  void gather(const Eigen::Index* indices, Eigen::Index count, Eigen::MatrixXd& out) const;

 private:
  Eigen::MatrixXd data_;
  FramingSpec spec_;
  Eigen::Index alignment_;
};

}  // namespace slicenn
