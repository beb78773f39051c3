#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicenn/errors.hpp"

namespace slicenn {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using Bits = std::vector<std::uint8_t>;

/// Uniformly sampled sequence. `sample_rate` is in Hz.
template <typename Scalar>
struct Sequence {
  Vec<Scalar> samples;
  double sample_rate = 1.0;

  Eigen::Index size() const { return samples.size(); }
};

using RealSequence = Sequence<double>;
using ComplexSequence = Sequence<Complex>;

template <typename Scalar>
double energy(const Sequence<Scalar>& s) {
  return s.samples.squaredNorm();
}

template <typename Scalar>
double mean_power(const Sequence<Scalar>& s) {
  return s.size() == 0 ? 0.0 : s.samples.squaredNorm() / static_cast<double>(s.size());
}

template <typename Scalar>
bool all_finite(const Sequence<Scalar>& s) {
  return s.samples.allFinite();
}

struct FirFilter {
  Eigen::VectorXd taps;
  std::string description;

  double energy() const { return taps.squaredNorm(); }
};

/// MT19937 (32-bit) with platform-independent derived draws.
///
/// Uniform and Gaussian draws are computed from raw engine words, not from
/// the <random> distributions, whose output is implementation-defined.
class Prng {
 public:
  explicit Prng(std::uint64_t seed);

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(engine_()); }
  /// 53-bit uniform in [0, 1).
  double uniform();
  /// Standard normal (Box-Muller, cached pair).
  double gaussian();
  std::uint64_t seed() const { return seed_; }

  static constexpr const char* kAlgorithm = "mt19937";

 private:
  std::mt19937 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

Prng make_prng(std::uint64_t seed);

/// Derives an independent 64-bit seed from a master seed and a list of
/// coordinates (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords);
std::uint64_t derive_seed(std::uint64_t master, const std::vector<std::uint64_t>& coords);

Bits generate_bits(Prng& prng, std::size_t n);

/// Root-raised-cosine taps, `span_symbols * sps + 1` long, unit energy.
FirFilter design_rrc(double alpha, int span_symbols, int sps);

/// Gaussian low-pass with the given 3-dB cutoff, unit DC gain.
FirFilter design_gaussian_lowpass(double cutoff_3db_hz, double sample_rate, int n_taps);

/// Linear convolution in "same" mode: output length equals input length and
/// the filter is referenced to its center tap.
template <typename Scalar>
Sequence<Scalar> fir_apply(const Sequence<Scalar>& signal, const FirFilter& filter);

/// Frequency of DFT bin `k` for an `n`-point transform, in [-fs/2, fs/2).
double dft_bin_frequency(Eigen::Index k, Eigen::Index n, double sample_rate);

using TransferFunction = std::function<Complex(double)>;

/// Whole-signal DFT filtering: ifft(transfer(f) * fft(x)).
ComplexSequence dft_filter(const ComplexSequence& signal, const TransferFunction& transfer);

RealSequence upsample_zero_insert(const RealSequence& symbols, int sps);

/// Integer-ratio decimation behind an ideal (DFT brick-wall) anti-alias
/// filter at the output Nyquist frequency. `phase` selects which of the
/// `sps_from / sps_to` input samples starts each output sample.
template <typename Scalar>
Sequence<Scalar> resample(const Sequence<Scalar>& signal, int sps_from, int sps_to, int phase = 0);

}  // namespace slicenn
