#include "slicenn/link.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace slicenn {

std::string to_string(MzmModel m) {
  switch (m) {
    case MzmModel::quadrature_cosine: return "quadrature_cosine";
    case MzmModel::ideal_sqrt_field: return "ideal_sqrt_field";
  }
  return "?";
}

MzmModel mzm_model_from_string(const std::string& s) {
  if (s == "quadrature_cosine") return MzmModel::quadrature_cosine;
  if (s == "ideal_sqrt_field") return MzmModel::ideal_sqrt_field;
  throw ConfigurationError("unknown mzm_model '" + s + "'");
}

std::vector<double> LinkConfig::slice_centers_hz() const {
  std::vector<double> centers(static_cast<std::size_t>(std::max(n_slices, 0)));
  for (int i = 0; i < n_slices; ++i)
    centers[i] = (static_cast<double>(i) - 0.5 * (n_slices - 1)) * slice_spacing_ghz * 1e9;
  return centers;
}

void LinkConfig::validate() const {
  if (!(baud_rate > 0.0)) throw ConfigurationError("baud_rate must be > 0");
  if (sim_sps < 1) throw ConfigurationError("sim_sps must be >= 1");
  if (n_slices < 1) throw ConfigurationError("n_slices must be >= 1");
  if (fiber_length_km < 0.0) throw ConfigurationError("fiber_length must be >= 0");
  if (slice_filter_order < 1) throw ConfigurationError("slice_filter_order must be >= 1");
  if (!(slice_3db_bw_ghz > 0.0)) throw ConfigurationError("slice_3db_bw must be > 0");
  const double total_band = n_slices * slice_spacing_ghz * 1e9;
  if (!(sample_rate() > total_band)) throw ConfigurationError("simulation bandwidth must exceed the total sliced band");
  const double nyquist = sample_rate() / 2.0;
  for (double c : slice_centers_hz()) {
    if (std::abs(c) + slice_3db_bw_ghz * 0.5e9 > nyquist)
      throw ConfigurationError("slice band exceeds the simulation Nyquist frequency");
  }
}

LinkConfig LinkConfig::single_pd(const LinkConfig& base) {
  LinkConfig c = base;
  c.n_slices = 1;
  c.slice_spacing_ghz = 0.0;
  // Flat to < 1e-3 across the signal band at the default rates.
  c.slice_3db_bw_ghz = 0.75 * base.sample_rate() * 1e-9;
  return c;
}

Eigen::MatrixXd SlicedSignal::interleaved() const {
  Eigen::MatrixXd m(n_slices(), length());
  for (int i = 0; i < n_slices(); ++i) m.row(i) = slices[i].samples.transpose();
  return m;
}

SlicedSignal SlicedSignal::resampled(int target_sps, int phase) const {
  if (target_sps == sps) return *this;
  if (target_sps > sps || sps % target_sps != 0)
    throw UnsupportedRatioError("SlicedSignal::resampled: need integer decimation");
  SlicedSignal out;
  out.sps = target_sps;
  const int ratio = sps / target_sps;
  for (const auto& s : slices) out.slices.push_back(resample(s, sps, target_sps, phase));
  // Sample n of the output is input sample phase + n * ratio.
  // Off-grid phases round the symbol center down to the preceding sample.
  const Eigen::Index shifted = symbol_alignment - phase;
  out.symbol_alignment = shifted >= 0 ? shifted / ratio : -((-shifted + ratio - 1) / ratio);
  return out;
}

RealSequence drive_waveform(const Bits& bits, const LinkConfig& config) {
  if (bits.empty()) throw EmptyRequestError("transmit: no bits");
  RealSequence symbols{Eigen::VectorXd(static_cast<Eigen::Index>(bits.size())), config.baud_rate};
  for (std::size_t i = 0; i < bits.size(); ++i) symbols.samples[static_cast<Eigen::Index>(i)] = bits[i];
  const FirFilter rrc = design_rrc(config.rrc_alpha, config.rrc_span, config.sim_sps);
  RealSequence shaped = fir_apply(upsample_zero_insert(symbols, config.sim_sps), rrc);
  shaped.samples *= config.sim_sps / rrc.taps.sum();
  return shaped;
}

ComplexSequence modulate(const RealSequence& drive, MzmModel model) {
  ComplexSequence field{Eigen::VectorXcd(drive.size()), drive.sample_rate};
  for (Eigen::Index i = 0; i < drive.size(); ++i) {
    const double v = drive.samples[i];
    double e = 0.0;
    switch (model) {
      case MzmModel::quadrature_cosine:
        // Biased at the power quadrature point v = 1/2; v = 0 -> 0, v = 1 -> 1.
        e = std::cos(0.5 * std::numbers::pi * (v - 1.0));
        break;
      case MzmModel::ideal_sqrt_field:
        e = std::sqrt(std::max(v, 0.0));
        break;
    }
    field.samples[i] = e;
  }
  return field;
}

ComplexSequence transmit(const Bits& bits, const LinkConfig& config) {
  return modulate(drive_waveform(bits, config), config.mzm_model);
}

Complex cd_transfer(double f_hz, const LinkConfig& config) {
  const double d = config.dispersion_ps_nm_km * 1e-6;  // s/m^2
  const double lambda = config.wavelength_nm * 1e-9;
  const double length = config.fiber_length_km * 1e3;
  const double phase = std::numbers::pi * d * lambda * lambda * length * f_hz * f_hz / kSpeedOfLight;
  return std::polar(1.0, phase);
}

ComplexSequence apply_cd(const ComplexSequence& field, const LinkConfig& config) {
  if (config.fiber_length_km < 0.0) throw ConfigurationError("apply_cd: negative fiber length");
  if (config.fiber_length_km == 0.0) return field;
  return dft_filter(field, [&](double f) { return cd_transfer(f, config); });
}

ComplexSequence add_awgn(const ComplexSequence& field, double snr_db, Prng& prng) {
  if (field.size() == 0) throw ParameterError("add_awgn: empty signal");
  if (std::isinf(snr_db) && snr_db > 0) return field;
  const double noise_var = mean_power(field) / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_var / 2.0);
  ComplexSequence out = field;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = prng.gaussian();
    const double im = prng.gaussian();
    out.samples[i] += Complex(sigma * re, sigma * im);
  }
  return out;
}

namespace {

double super_gaussian(double f_hz, double center, const LinkConfig& config) {
  const double x = (f_hz - center) / (config.slice_3db_bw_ghz * 0.5e9);
  return std::exp(-0.5 * std::numbers::ln2 * std::pow(x * x, config.slice_filter_order));
}

}  // namespace

double slice_response(double f_hz, int index, const LinkConfig& config) {
  return super_gaussian(f_hz, config.slice_centers_hz().at(static_cast<std::size_t>(index)), config);
}

SlicedSignal slice_and_detect(const ComplexSequence& field, const LinkConfig& config) {
  config.validate();
  const Eigen::Index n = field.size();
  if (n < 2) throw ParameterError("slice_and_detect: signal too short");
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spectrum;
  fft.fwd(spectrum, field.samples);

  SlicedSignal out;
  out.sps = config.sim_sps;
  out.symbol_alignment = 0;
  Eigen::VectorXcd filtered(n);
  Eigen::VectorXcd slice_field(n);
  const std::vector<double> centers = config.slice_centers_hz();
  for (int i = 0; i < config.n_slices; ++i) {
    for (Eigen::Index k = 0; k < n; ++k)
      filtered[k] = spectrum[k] * super_gaussian(dft_bin_frequency(k, n, field.sample_rate), centers[i], config);
    fft.inv(slice_field, filtered);
    out.slices.push_back(RealSequence{slice_field.cwiseAbs2(), field.sample_rate});
  }
  return out;
}

RealSequence detect_single_pd(const ComplexSequence& field) {
  return RealSequence{field.samples.cwiseAbs2(), field.sample_rate};
}

SlicedSignal simulate_link(const Bits& bits, const LinkConfig& config, Prng& prng) {
  return simulate_link_with_reference(bits, config, prng).sliced;
}

LinkOutput simulate_link_with_reference(const Bits& bits, const LinkConfig& config, Prng& prng) {
  config.validate();
  const ComplexSequence received = add_awgn(apply_cd(transmit(bits, config), config), config.snr_db, prng);
  return LinkOutput{slice_and_detect(received, config), detect_single_pd(received)};
}

namespace {

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw FormatError("not a number: '" + s + "'");
  return v;
}

std::pair<std::string, std::string> read_key_value(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("sliced signal: truncated header");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw FormatError("sliced signal: bad header line '" + line + "'");
  return {line.substr(0, comma), line.substr(comma + 1)};
}

}  // namespace

void write_sliced_signal(std::ostream& os, const SlicedSignal& s) {
  os << "n_slices," << s.n_slices() << '\n';
  os << "sps," << s.sps << '\n';
  os << "sample_rate," << hexfloat(s.sample_rate()) << '\n';
  os << "alignment," << s.symbol_alignment << '\n';
  for (int i = 0; i < s.n_slices(); ++i) os << (i ? "," : "") << "slice" << i;
  os << '\n';
  for (Eigen::Index n = 0; n < s.length(); ++n) {
    for (int i = 0; i < s.n_slices(); ++i) os << (i ? "," : "") << hexfloat(s.slices[i].samples[n]);
    os << '\n';
  }
}

SlicedSignal read_sliced_signal(std::istream& is) {
  auto expect = [&](const char* key) {
    auto [k, v] = read_key_value(is);
    if (k != key) throw FormatError(std::string("sliced signal: expected header key '") + key + "'");
    return v;
  };
  auto integer = [](const std::string& v) {
    try {
      std::size_t used = 0;
      const long long x = std::stoll(v, &used);
      if (used == v.size()) return x;
    } catch (const std::logic_error&) {
    }
    throw FormatError("sliced signal: bad integer '" + v + "'");
  };
  const int n_slices = static_cast<int>(integer(expect("n_slices")));
  const int sps = static_cast<int>(integer(expect("sps")));
  const double fs = parse_double(expect("sample_rate"));
  const Eigen::Index alignment = integer(expect("alignment"));
  if (n_slices < 1 || sps < 1 || !(fs > 0.0)) throw FormatError("sliced signal: invalid header values");
  std::string line;
  std::getline(is, line);  // column names

  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n_slices));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int i = 0;
    while (std::getline(row, cell, ',')) {
      if (i >= n_slices) throw FormatError("sliced signal: too many columns");
      cols[static_cast<std::size_t>(i++)].push_back(parse_double(cell));
    }
    if (i != n_slices) throw FormatError("sliced signal: too few columns");
  }
  SlicedSignal s;
  s.sps = sps;
  s.symbol_alignment = alignment;
  for (auto& c : cols)
    s.slices.push_back(RealSequence{Eigen::Map<Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())), fs});
  return s;
}

void save_sliced_signal(const std::string& path, const SlicedSignal& s) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_sliced_signal(os, s);
  if (!os) throw IoError("write failed: '" + path + "'");
}

SlicedSignal load_sliced_signal(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_sliced_signal(is);
}

void save_bits(const std::string& path, const Bits& bits) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < bits.size(); ++i) {
    os << static_cast<char>('0' + bits[i]);
    if (i % 64 == 63) os << '\n';
  }
  os << '\n';
}

Bits load_bits(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  Bits bits;
  char c = 0;
  while (is.get(c)) {
    if (c == '0' || c == '1') {
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (c != '\n' && c != '\r' && c != ' ') {
      throw FormatError("bits file: unexpected character");
    }
  }
  return bits;
}

}  // namespace slicenn
