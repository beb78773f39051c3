#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicenn/dsp.hpp"

namespace slicenn {

/// Pre-FEC BER below which KP4 RS(544,514) decodes error-free.
inline constexpr double kKp4Threshold = 2.24e-4;

/// Half-open range of symbol indices.
struct SymbolRange {
  Eigen::Index first = 0;
  Eigen::Index count = 0;

  Eigen::Index end() const { return first + count; }
};

enum class ThresholdMethod {
  midpoint,   // midpoint of the class-conditional means
  min_error,  // training-error minimizing cut between sorted values
};

/// Affine normalization followed by a threshold: bit = 1 iff
/// (value - offset) * scale > threshold. Ties decide 0.
struct DecisionRule {
  double threshold = 0.5;
  double scale = 1.0;
  double offset = 0.0;
  ThresholdMethod method = ThresholdMethod::midpoint;

  double normalize(double v) const { return (v - offset) * scale; }
  std::uint8_t decide(double v) const { return normalize(v) > threshold ? 1 : 0; }
};

/// Fits a rule on labelled training values. For `midpoint` the classes are
/// mapped to 0 and 1 and the threshold is 0.5.
DecisionRule fit_decision_rule(std::span<const double> values, std::span<const std::uint8_t> labels,
                               ThresholdMethod method = ThresholdMethod::midpoint);

Bits hard_decide(std::span<const double> values, const DecisionRule& rule);

struct BerResult {
  std::size_t errors = 0;
  std::size_t bits_counted = 0;
  double ber = 0.0;
  std::string fingerprint;
};

/// Error count over `decided`/`reference` with `guard` symbols dropped at
/// both ends. Throws AlignmentError on length mismatch.
BerResult count_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference,
                    std::size_t guard);

struct SymbolSamples {
  Eigen::VectorXd values;  // values[t] belongs to symbol t
  int phase = 0;           // in [0, sps)
};

/// Symbol t is read from sample `alignment + t * sps + phase_offset(phase)`,
/// where phase p maps to a signed offset in [-sps/2, sps/2).
Eigen::Index phase_offset(int phase, int sps);

/// RRC matched filter and decimation at a fixed phase.
SymbolSamples matched_filter_downsample_at(const RealSequence& samples, int sps, double rrc_alpha, int phase,
                                           Eigen::Index alignment = 0, int rrc_span = 32);

/// RRC matched filter, then decimation at the phase with the fewest
/// training errors (ties: largest class separation).
SymbolSamples matched_filter_downsample(const RealSequence& samples, int sps, double rrc_alpha,
                                        std::span<const std::uint8_t> reference, SymbolRange train,
                                        Eigen::Index alignment = 0, int rrc_span = 32);

struct FfeState {
  Eigen::VectorXd taps;
  double step_size = 1e-3;
  int n_taps = 11;

  /// Center-spike initialization.
  static FfeState identity(int n_taps, double step_size);
};

/// Symbol-spaced LMS over `n_train` symbols starting at `first`:
/// w += mu * e_k * x_k with e_k = d_k - w . x_k. Throws StepSizeError when a
/// tap leaves [-1e6, 1e6] or becomes non-finite.
FfeState ffe_lms_train(const Eigen::VectorXd& input, const Eigen::VectorXd& reference, FfeState state,
                       Eigen::Index n_train, Eigen::Index first = 0);

Eigen::VectorXd ffe_apply(const Eigen::VectorXd& input, const FfeState& state);

struct CurvePoint {
  double snr_db = 0.0;
  double ber = 0.0;
};

struct RequiredSnr {
  enum class Status { reached, no_reach, below_grid };
  Status status = Status::no_reach;
  double snr_db = 0.0;

  bool reached() const { return status == Status::reached; }
};

/// SNR at which BER first crosses `threshold`, by linear interpolation of
/// log10(BER) against SNR. BER values below `ber_floor` (including zero
/// counts) are clamped to it.
RequiredSnr required_snr(std::vector<CurvePoint> curve, double threshold = kKp4Threshold,
                         double ber_floor = 1e-12);

/// Penalty in dB against a reference required SNR; nullopt when the
/// threshold is never reached on the curve.
std::optional<double> snr_penalty_at_kp4(const std::vector<CurvePoint>& curve, double reference_required_snr_db,
                                         double ber_floor = 1e-12);

}  // namespace slicenn
