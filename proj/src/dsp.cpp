#include "slicenn/dsp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace slicenn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937 seeded_engine(std::uint64_t seed) {
  if (seed <= 0xffffffffULL) return std::mt19937(static_cast<std::uint32_t>(seed));
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                    static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937(seq);
}

}  // namespace

Prng::Prng(std::uint64_t seed) : engine_(seeded_engine(seed)), seed_(seed) {}

double Prng::uniform() {
  const std::uint64_t a = next_u32() >> 5;
  const std::uint64_t b = next_u32() >> 6;
  return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * (1.0 / 9007199254740992.0);
}

double Prng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Prng make_prng(std::uint64_t seed) { return Prng(seed); }

std::uint64_t derive_seed(std::uint64_t master, const std::vector<std::uint64_t>& coords) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t c : coords) h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  return derive_seed(master, std::vector<std::uint64_t>(coords));
}

Bits generate_bits(Prng& prng, std::size_t n) {
  if (n == 0) throw EmptyRequestError("generate_bits: requested zero bits");
  Bits bits(n);
  for (auto& b : bits) b = static_cast<std::uint8_t>(prng.next_u32() >> 31);
  return bits;
}

FirFilter design_rrc(double alpha, int span_symbols, int sps) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("design_rrc: alpha must be in (0, 1]");
  if (span_symbols <= 0 || span_symbols % 2 != 0)
    throw ParameterError("design_rrc: span_symbols must be a positive even count");
  if (sps < 1) throw ParameterError("design_rrc: sps must be >= 1");

  using std::numbers::pi;
  const int n = span_symbols * sps + 1;
  const int center = n / 2;
  Eigen::VectorXd taps(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i - center) / sps;
    double h = 0.0;
    if (i == center) {
      h = 1.0 - alpha + 4.0 * alpha / pi;
    } else if (std::abs(std::abs(t) - 1.0 / (4.0 * alpha)) < 1e-12) {
      h = alpha / std::sqrt(2.0) *
          ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * alpha)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * alpha)));
    } else {
      const double x = 4.0 * alpha * t;
      h = (std::sin(pi * t * (1.0 - alpha)) + 4.0 * alpha * t * std::cos(pi * t * (1.0 + alpha))) /
          (pi * t * (1.0 - x * x));
    }
    taps[i] = h;
  }
  // Exact symmetry regardless of rounding in the two halves.
  for (int i = 0; i < center; ++i) taps[n - 1 - i] = taps[i];
  taps /= taps.norm();

  std::ostringstream desc;
  desc << "rrc alpha=" << alpha << " span=" << span_symbols << " sps=" << sps;
  return FirFilter{std::move(taps), desc.str()};
}

FirFilter design_gaussian_lowpass(double cutoff_3db_hz, double sample_rate, int n_taps) {
  if (!(cutoff_3db_hz > 0.0) || !(sample_rate > 0.0) || n_taps < 1)
    throw ParameterError("design_gaussian_lowpass: invalid parameters");
  using std::numbers::pi;
  // |H(f)|^2 = 1/2 at the cutoff: H(f) = exp(-f^2 / (2 sigma^2)), sigma^2 = fc^2 / ln 2.
  const double sigma2 = cutoff_3db_hz * cutoff_3db_hz / std::numbers::ln2;
  const int center = (n_taps - 1) / 2;
  Eigen::VectorXd taps(n_taps);
  for (int i = 0; i < n_taps; ++i) {
    const double t = (i - center) / sample_rate;
    taps[i] = std::exp(-2.0 * pi * pi * sigma2 * t * t);
  }
  taps /= taps.sum();
  std::ostringstream desc;
  desc << "gaussian fc=" << cutoff_3db_hz << " fs=" << sample_rate << " taps=" << n_taps;
  return FirFilter{std::move(taps), desc.str()};
}

template <typename Scalar>
Sequence<Scalar> fir_apply(const Sequence<Scalar>& signal, const FirFilter& filter) {
  const Eigen::Index k = filter.taps.size();
  if (k == 0) throw ParameterError("fir_apply: empty filter");
  if (signal.size() == 0) throw ParameterError("fir_apply: empty signal");
  const Eigen::Index n = signal.size();
  const Eigen::Index center = (k - 1) / 2;
  Sequence<Scalar> out{Vec<Scalar>::Zero(n), signal.sample_rate};
  const Scalar* x = signal.samples.data();
  const double* h = filter.taps.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    // y[i] = sum_j h[j] x[i + center - j], restricted to valid x indices.
    const Eigen::Index j_lo = std::max<Eigen::Index>(0, i + center - (n - 1));
    const Eigen::Index j_hi = std::min<Eigen::Index>(k - 1, i + center);
    Scalar acc{};
    for (Eigen::Index j = j_lo; j <= j_hi; ++j) acc += h[j] * x[i + center - j];
    out.samples[i] = acc;
  }
  return out;
}

template RealSequence fir_apply(const RealSequence&, const FirFilter&);
template ComplexSequence fir_apply(const ComplexSequence&, const FirFilter&);

double dft_bin_frequency(Eigen::Index k, Eigen::Index n, double sample_rate) {
  const Eigen::Index half = n / 2;
  const Eigen::Index signed_k = (k < n - half) ? k : k - n;
  return static_cast<double>(signed_k) * sample_rate / static_cast<double>(n);
}

ComplexSequence dft_filter(const ComplexSequence& signal, const TransferFunction& transfer) {
  const Eigen::Index n = signal.size();
  if (n < 2) throw ParameterError("dft_filter: signal needs at least two samples");
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum;
  fft.fwd(spectrum, signal.samples);
  for (Eigen::Index k = 0; k < n; ++k) spectrum[k] *= transfer(dft_bin_frequency(k, n, signal.sample_rate));
  ComplexSequence out{Eigen::VectorXcd(n), signal.sample_rate};
  fft.inv(out.samples, spectrum);
  return out;
}

RealSequence upsample_zero_insert(const RealSequence& symbols, int sps) {
  if (sps < 1) throw ParameterError("upsample_zero_insert: sps must be >= 1");
  RealSequence out{Eigen::VectorXd::Zero(symbols.size() * sps), symbols.sample_rate * sps};
  for (Eigen::Index i = 0; i < symbols.size(); ++i) out.samples[i * sps] = symbols.samples[i];
  return out;
}

namespace {

Eigen::VectorXcd brickwall_lowpass(const Eigen::VectorXcd& x, double sample_rate, double cutoff) {
  const Eigen::Index n = x.size();
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum;
  fft.fwd(spectrum, x);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = std::abs(dft_bin_frequency(k, n, sample_rate));
    if (f > cutoff * (1.0 + 1e-12)) {
      spectrum[k] = 0.0;
    } else if (f >= cutoff * (1.0 - 1e-12)) {
      spectrum[k] *= 0.5;
    }
  }
  Eigen::VectorXcd y(n);
  fft.inv(y, spectrum);
  return y;
}

}  // namespace

template <typename Scalar>
Sequence<Scalar> resample(const Sequence<Scalar>& signal, int sps_from, int sps_to, int phase) {
  if (sps_from < 1 || sps_to < 1) throw ParameterError("resample: sps must be >= 1");
  if (sps_from % sps_to != 0) throw UnsupportedRatioError("resample: only integer decimation ratios are supported");
  const int ratio = sps_from / sps_to;
  if (phase < 0 || phase >= ratio) throw ParameterError("resample: phase must be in [0, ratio)");
  if (ratio == 1) return signal;

  const double fs_out = signal.sample_rate / ratio;
  Eigen::VectorXcd filtered = brickwall_lowpass(signal.samples.template cast<Complex>(), signal.sample_rate, fs_out / 2.0);
  const Eigen::Index n_out = (signal.size() - phase + ratio - 1) / ratio;
  Sequence<Scalar> out{Vec<Scalar>(n_out), fs_out};
  for (Eigen::Index i = 0; i < n_out; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      out.samples[i] = filtered[phase + i * ratio];
    } else {
      out.samples[i] = filtered[phase + i * ratio].real();
    }
  }
  return out;
}

template RealSequence resample(const RealSequence&, int, int, int);
template ComplexSequence resample(const ComplexSequence&, int, int, int);

}  // namespace slicenn
