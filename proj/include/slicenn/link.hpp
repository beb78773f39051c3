#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "slicenn/dsp.hpp"

namespace slicenn {

enum class MzmModel { quadrature_cosine, ideal_sqrt_field };

std::string to_string(MzmModel m);
MzmModel mzm_model_from_string(const std::string& s);

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct LinkConfig {
  double baud_rate = 32e9;          // Hz
  int sim_sps = 8;
  double rrc_alpha = 0.1;
  int rrc_span = 32;                // symbols
  double fiber_length_km = 0.0;
  double dispersion_ps_nm_km = 16.4;
  double wavelength_nm = 1550.0;
  int n_slices = 4;
  double slice_3db_bw_ghz = 16.0;
  double slice_spacing_ghz = 8.0;
  int slice_filter_order = 2;       // super-Gaussian order m
  double snr_db = std::numeric_limits<double>::infinity();
  MzmModel mzm_model = MzmModel::quadrature_cosine;

  double sample_rate() const { return baud_rate * sim_sps; }
  /// Slice center frequencies in Hz, symmetric about 0.
  std::vector<double> slice_centers_hz() const;

  /// Throws ConfigurationError when an invariant is violated.
  void validate() const;

  /// One wide all-but-flat slice: the unsliced single-photodiode receiver.
  static LinkConfig single_pd(const LinkConfig& base);
};

/// Post-photodetector slices on a common time base. Slice `i` sample `n` is
/// `slices[i].samples[n]`; symbol `t` is centered on sample
/// `symbol_alignment + t * sps`.
struct SlicedSignal {
  std::vector<RealSequence> slices;
  int sps = 1;
  Eigen::Index symbol_alignment = 0;

  int n_slices() const { return static_cast<int>(slices.size()); }
  Eigen::Index length() const { return slices.empty() ? 0 : slices.front().size(); }
  double sample_rate() const { return slices.empty() ? 0.0 : slices.front().sample_rate; }

  /// Column-major (n_slices x length) matrix; each column is one time instant.
  Eigen::MatrixXd interleaved() const;

  /// Integer-ratio decimation of every slice; alignment is carried over.
  SlicedSignal resampled(int target_sps, int phase = 0) const;
};

/// Pulse-shaped electrical drive: OOK symbols, zero-insert upsampled and
/// RRC filtered, scaled so a run of ones settles at 1 and zeros at 0.
RealSequence drive_waveform(const Bits& bits, const LinkConfig& config);

/// MZM field transfer of a drive waveform.
ComplexSequence modulate(const RealSequence& drive, MzmModel model);

ComplexSequence transmit(const Bits& bits, const LinkConfig& config);

/// Chromatic dispersion all-pass: H(f) = exp(j pi D lambda^2 L f^2 / c).
Complex cd_transfer(double f_hz, const LinkConfig& config);
ComplexSequence apply_cd(const ComplexSequence& field, const LinkConfig& config);

/// Circular complex AWGN at mean-signal-power / total-noise-variance = snr.
/// An infinite SNR returns the input untouched.
ComplexSequence add_awgn(const ComplexSequence& field, double snr_db, Prng& prng);

/// Field magnitude response of slice `index`.
double slice_response(double f_hz, int index, const LinkConfig& config);

SlicedSignal slice_and_detect(const ComplexSequence& field, const LinkConfig& config);

/// Single wideband square-law photodiode, the reference receiver.
RealSequence detect_single_pd(const ComplexSequence& field);

SlicedSignal simulate_link(const Bits& bits, const LinkConfig& config, Prng& prng);

/// Both receivers driven by the same noisy field.
struct LinkOutput {
  SlicedSignal sliced;
  RealSequence single_pd;
};
LinkOutput simulate_link_with_reference(const Bits& bits, const LinkConfig& config, Prng& prng);

// SlicedSignal file: comment-free CSV with a four-line key,value header
// (n_slices, sps, sample_rate, alignment), a column header line
// slice0..sliceN-1, then one row per sample. Values are hex floats, so a
// round trip is bit-exact.
void write_sliced_signal(std::ostream& os, const SlicedSignal& s);
SlicedSignal read_sliced_signal(std::istream& is);
void save_sliced_signal(const std::string& path, const SlicedSignal& s);
SlicedSignal load_sliced_signal(const std::string& path);

void save_bits(const std::string& path, const Bits& bits);
Bits load_bits(const std::string& path);

}  // namespace slicenn
