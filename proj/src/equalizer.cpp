#include "slicenn/equalizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace slicenn {

std::string to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "sgd") return Optimizer::sgd;
  if (s == "adam") return Optimizer::adam;
  throw ConfigurationError("unknown optimizer '" + s + "'");
}

EqualizerSpec EqualizerSpec::table1(Arch arch, FramingMode mode, int sps) {
  EqualizerSpec s;
  s.arch = arch;
  const bool sa = mode == FramingMode::Sa;
  s.framing = FramingSpec::make(mode, 3, sps > 0 ? sps : (sa ? 8 : 2), 4);
  s.n_hidden = arch == Arch::cnn ? 15 : 10;
  s.filter_width = arch == Arch::cnn ? s.framing.memory() : 0;
  switch (arch) {
    case Arch::fnn: s.f_hidden = sa ? Activation::sigmoid : Activation::relu; break;
    case Arch::gru: s.f_hidden = Activation::tanh; break;
    case Arch::cnn: s.f_hidden = Activation::sigmoid; break;
  }
  s.f_out = sa ? Activation::linear : Activation::sigmoid;
  s.mini_batch = sa ? 1800 : 1000;
  s.var_target = sa ? 0.17 : 0.69;
  s.learn_rate = sa ? 0.5e-2 : 1e-2;
  return s;
}

EqualizerSpec EqualizerSpec::from_name(const std::string& name, int sps) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw ConfigurationError("equalizer name must look like 'Sy-FNN', got '" + name + "'");
  return table1(arch_from_string(name.substr(dash + 1)), framing_mode_from_string(name.substr(0, dash)), sps);
}

NetworkShape EqualizerSpec::shape() const {
  NetworkShape sh;
  sh.arch = arch;
  sh.memory = framing.memory();
  sh.n_slices = framing.n_slices;
  sh.n_hidden = n_hidden;
  sh.filter_width = filter_width;
  sh.f_hidden = f_hidden;
  sh.f_out = f_out;
  sh.gru_update = gru_update;
  sh.gru_readout = gru_readout;
  return sh;
}

void EqualizerSpec::validate() const {
  framing.validate();
  shape().validate();
  if (!(var_target > 0.0)) throw ConfigurationError("equalizer: var must be > 0");
  if (!(learn_rate >= 0.0)) throw ConfigurationError("equalizer: learn rate must be >= 0");
  if (mini_batch < 1) throw ConfigurationError("equalizer: mini-batch must be >= 1");
  if (epochs < 0 || patience < 1) throw ConfigurationError("equalizer: bad epoch/patience settings");
}

Eigen::Index required_margin_symbols(const EqualizerSpec& spec) {
  const Eigen::Index context = spec.framing.context_symbols + 1;
  return spec.framing.mode == FramingMode::Sa ? context + spec.rrc_span / 2 + 1 : context;
}

namespace {

SlicedSignal at_framing_rate(const SlicedSignal& s, const FramingSpec& f) {
  if (s.n_slices() != f.n_slices) throw DimensionError("equalizer: slice count does not match the framing spec");
  return s.sps == f.sps ? s : s.resampled(f.sps);
}

FrameSource make_source(const TrainedModel& model, const SlicedSignal& sliced) {
  Eigen::MatrixXd m = sliced.interleaved();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    m.row(i) = (m.row(i).array() - model.norm_mean[i]) * model.norm_scale[i];
  return FrameSource(std::move(m), model.spec.framing, sliced.symbol_alignment);
}

Eigen::VectorXd outputs_from_source(const Network<double>& net, const FrameSource& src,
                                    const std::vector<Eigen::Index>& units) {
  constexpr Eigen::Index kChunk = 4096;
  const auto n = static_cast<Eigen::Index>(units.size());
  Eigen::VectorXd out(n);
  Eigen::MatrixXd x;
  for (Eigen::Index b = 0; b < n; b += kChunk) {
    const Eigen::Index count = std::min(kChunk, n - b);
    src.gather(units.data() + b, count, x);
    out.segment(b, count) = forward_batch(net, x).row(0).transpose();
  }
  return out;
}

std::vector<Eigen::Index> units_for(const FramingSpec& f, SymbolRange range, Eigen::Index alignment) {
  std::vector<Eigen::Index> units;
  if (f.mode == FramingMode::Sy) {
    units.resize(static_cast<std::size_t>(range.count));
    std::iota(units.begin(), units.end(), range.first);
  } else {
    units.resize(static_cast<std::size_t>(range.count * f.sps));
    std::iota(units.begin(), units.end(), alignment + range.first * f.sps);
  }
  return units;
}

// Sa: network output over the samples of `range` widened by half the RRC
// span, returned with the sample index of its first element.
std::pair<RealSequence, Eigen::Index> sa_waveform(const TrainedModel& model, const FrameSource& src,
                                                  SymbolRange range, Eigen::Index alignment, double fs,
                                                  int rrc_span) {
  const int sps = model.spec.framing.sps;
  const Eigen::Index margin = (rrc_span / 2 + 1) * sps;
  const Eigen::Index s0 = alignment + range.first * sps - margin;
  const Eigen::Index s1 = alignment + range.end() * sps + margin;
  std::vector<Eigen::Index> units(static_cast<std::size_t>(s1 - s0));
  std::iota(units.begin(), units.end(), s0);
  for (Eigen::Index u : {units.front(), units.back()})
    if (!src.in_range(u)) throw BoundaryError("equalize: range too close to the signal edge for Sa framing");
  return {RealSequence{outputs_from_source(model.net, src, units), fs}, s0};
}

Eigen::VectorXd sa_symbol_values(const TrainedModel& model, const FrameSource& src, SymbolRange range,
                                 Eigen::Index alignment, double fs) {
  const EqualizerSpec& spec = model.spec;
  auto [wave, s0] = sa_waveform(model, src, range, alignment, fs, spec.rrc_span);
  const int sps = spec.framing.sps;
  SymbolSamples sym = matched_filter_downsample_at(wave, sps, spec.rrc_alpha, model.sa_phase,
                                                   alignment + range.first * sps - s0, spec.rrc_span);
  return sym.values.head(range.count);
}

void check_range(const FramingSpec& f, SymbolRange range, Eigen::Index n_symbols) {
  if (range.first < 0 || range.count <= 0 || range.end() > n_symbols)
    throw BoundaryError("equalizer: symbol range outside the signal");
  (void)f;
}

}  // namespace

TrainedModel train(const EqualizerSpec& spec, const TrainingData& data, const DataSplit& split) {
  spec.validate();
  const FramingSpec& f = spec.framing;
  const SlicedSignal sliced = at_framing_rate(data.sliced, f);
  const Eigen::Index n_symbols = static_cast<Eigen::Index>(data.bits.size());
  check_range(f, split.train, n_symbols);
  if (split.validation < 0 || split.validation >= split.train.count)
    throw ConfigurationError("train: validation must be a strict part of the training range");

  RealSequence drive;
  if (f.mode == FramingMode::Sa) {
    if (data.drive.size() != data.sliced.length()) throw DimensionError("train: drive and signal lengths differ");
    drive = data.sliced.sps == f.sps ? data.drive : resample(data.drive, data.sliced.sps, f.sps);
  }

  TrainedModel model;
  model.spec = spec;

  // Per-slice affine rescaling to zero mean and the target variance,
  // fitted on the training samples only.
  const Eigen::Index a = sliced.symbol_alignment;
  const Eigen::Index s_begin = std::max<Eigen::Index>(0, a + split.train.first * f.sps);
  const Eigen::Index s_end = std::min<Eigen::Index>(sliced.length(), a + split.train.end() * f.sps);
  model.norm_mean.resize(f.n_slices);
  model.norm_scale.resize(f.n_slices);
  for (int i = 0; i < f.n_slices; ++i) {
    const auto seg = sliced.slices[i].samples.segment(s_begin, s_end - s_begin);
    const double mean = seg.mean();
    const double var = (seg.array() - mean).square().mean();
    model.norm_mean[i] = mean;
    model.norm_scale[i] = var > 0.0 ? std::sqrt(spec.var_target / var) : 1.0;
  }
  const FrameSource src = make_source(model, sliced);

  const SymbolRange fit_range{split.train.first, split.train.count - split.validation};
  const SymbolRange val_range{fit_range.end(), split.validation};
  const std::vector<Eigen::Index> fit_units = units_for(f, fit_range, a);
  const std::vector<Eigen::Index> val_units = units_for(f, val_range, a);
  for (Eigen::Index u : {fit_units.front(), fit_units.back()})
    if (!src.in_range(u)) throw BoundaryError("train: training range lacks framing context");

  auto target_of = [&](Eigen::Index unit) {
    return f.mode == FramingMode::Sy ? static_cast<double>(data.bits[static_cast<std::size_t>(unit)])
                                     : drive.samples[unit];
  };
  Eigen::VectorXd val_targets(static_cast<Eigen::Index>(val_units.size()));
  for (std::size_t i = 0; i < val_units.size(); ++i) val_targets[static_cast<Eigen::Index>(i)] = target_of(val_units[i]);

  Prng prng(spec.seed);
  Network<double> net = Network<double>::initialized(spec.shape(), prng);
  Network<double> best = net;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  // Adam moments (unused for plain SGD).
  Network<double> m1 = net.zeros_like(), m2 = net.zeros_like();
  long long step = 0;

  auto validation_mse = [&](const Network<double>& n) {
    if (val_units.empty()) return 0.0;
    const Eigen::VectorXd y = outputs_from_source(n, src, val_units);
    return (y - val_targets).squaredNorm() / static_cast<double>(y.size());
  };

  std::vector<Eigen::Index> order = fit_units;
  Eigen::MatrixXd x;
  Eigen::MatrixXd target;
  ForwardCache<double> cache;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(prng.uniform() * static_cast<double>(i));
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    double loss_sum = 0.0;
    Eigen::Index seen = 0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(spec.mini_batch)) {
      const auto count = static_cast<Eigen::Index>(std::min<std::size_t>(spec.mini_batch, order.size() - b));
      src.gather(order.data() + b, count, x);
      target.resize(1, count);
      for (Eigen::Index k = 0; k < count; ++k) target(0, k) = target_of(order[b + static_cast<std::size_t>(k)]);
      const Eigen::MatrixXd y = forward_batch(net, x, &cache);
      Eigen::MatrixXd dy;
      const double loss = mse_loss<double>(y, target, &dy);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss at epoch " << epoch << " with learn rate " << spec.learn_rate;
        throw DivergenceError(msg.str());
      }
      loss_sum += loss * static_cast<double>(count);
      seen += count;
      const Network<double> grad = backward_batch(net, x, cache, dy);
      ++step;
      for (std::size_t p = 0; p < net.params.size(); ++p) {
        if (spec.optimizer == Optimizer::sgd) {
          net.params[p] -= spec.learn_rate * grad.params[p];
        } else {
          constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
          m1.params[p] = beta1 * m1.params[p] + (1.0 - beta1) * grad.params[p];
          m2.params[p] = beta2 * m2.params[p] + (1.0 - beta2) * grad.params[p].cwiseAbs2();
          const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
          const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
          net.params[p].array() -=
              spec.learn_rate * (m1.params[p].array() / c1) / ((m2.params[p].array() / c2).sqrt() + eps);
        }
      }
    }
    const double val = validation_mse(net);
    if (!std::isfinite(val) || !net.all_finite()) {
      std::ostringstream msg;
      msg << "train: diverged at epoch " << epoch << " with learn rate " << spec.learn_rate;
      throw DivergenceError(msg.str());
    }
    model.train_loss.push_back(loss_sum / static_cast<double>(std::max<Eigen::Index>(seen, 1)));
    model.validation_loss.push_back(val);
    if (val < best_val) {
      best_val = val;
      best = net;
      since_best = 0;
    } else if (++since_best >= spec.patience) {
      break;
    }
  }
  model.net = std::move(best);

  // Decision threshold (and Sa sampling phase) from the full training range.
  const std::span<const std::uint8_t> bits(data.bits);
  if (f.mode == FramingMode::Sy) {
    const std::vector<Eigen::Index> units = units_for(f, split.train, a);
    const Eigen::VectorXd y = outputs_from_source(model.net, src, units);
    model.rule = fit_decision_rule(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                                   bits.subspan(static_cast<std::size_t>(split.train.first),
                                                static_cast<std::size_t>(split.train.count)));
  } else {
    auto [wave, s0] = sa_waveform(model, src, split.train, a, sliced.sample_rate(), spec.rrc_span);
    const Bits local(bits.begin() + split.train.first, bits.begin() + split.train.end());
    const SymbolSamples sym = matched_filter_downsample(wave, f.sps, spec.rrc_alpha, local, SymbolRange{0, split.train.count},
                                                        a + split.train.first * f.sps - s0, spec.rrc_span);
    model.sa_phase = sym.phase;
    model.rule = fit_decision_rule(std::span<const double>(sym.values.data(), static_cast<std::size_t>(split.train.count)),
                                   std::span<const std::uint8_t>(local));
  }
  return model;
}

Eigen::VectorXd network_outputs(const TrainedModel& model, const SlicedSignal& sliced,
                                const std::vector<Eigen::Index>& units) {
  const FrameSource src = make_source(model, sliced);
  return outputs_from_source(model.net, src, units);
}

Eigen::VectorXd symbol_values(const TrainedModel& model, const SlicedSignal& input, SymbolRange range) {
  const FramingSpec& f = model.spec.framing;
  const SlicedSignal sliced = at_framing_rate(input, f);
  const Eigen::Index n_symbols = (sliced.length() - sliced.symbol_alignment) / f.sps;
  check_range(f, range, n_symbols);
  const FrameSource src = make_source(model, sliced);
  if (f.mode == FramingMode::Sy) {
    const std::vector<Eigen::Index> units = units_for(f, range, sliced.symbol_alignment);
    for (Eigen::Index u : {units.front(), units.back()})
      if (!src.in_range(u)) throw BoundaryError("equalize: range too close to the signal edge for Sy framing");
    return outputs_from_source(model.net, src, units);
  }
  return sa_symbol_values(model, src, range, sliced.symbol_alignment, sliced.sample_rate());
}

Bits equalize(const TrainedModel& model, const SlicedSignal& sliced, SymbolRange range) {
  const Eigen::VectorXd v = symbol_values(model, sliced, range);
  return hard_decide(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), model.rule);
}

BerResult evaluate(const TrainedModel& model, const TrainingData& data, SymbolRange test) {
  const Bits decided = equalize(model, data.sliced, test);
  const std::span<const std::uint8_t> ref(data.bits);
  return count_ber(decided, ref.subspan(static_cast<std::size_t>(test.first), static_cast<std::size_t>(test.count)), 0);
}

BerResult evaluate_unequalized(const RealSequence& single_pd, const Bits& bits, int sps, double rrc_alpha,
                               SymbolRange train, SymbolRange test, int rrc_span) {
  const SymbolSamples sym = matched_filter_downsample(single_pd, sps, rrc_alpha, bits, train, 0, rrc_span);
  if (test.end() > sym.values.size()) throw BoundaryError("evaluate_unequalized: test range outside the signal");
  const std::span<const double> all(sym.values.data(), static_cast<std::size_t>(sym.values.size()));
  const std::span<const std::uint8_t> ref(bits);
  auto sub = [](auto s, SymbolRange r) { return s.subspan(static_cast<std::size_t>(r.first), static_cast<std::size_t>(r.count)); };
  const DecisionRule rule = fit_decision_rule(sub(all, train), sub(ref, train));
  return count_ber(hard_decide(sub(all, test), rule), sub(ref, test), 0);
}

FfeReceiver train_ffe(const RealSequence& single_pd, const Bits& bits, int sps, double rrc_alpha, SymbolRange train,
                      Eigen::Index n_train, int n_taps, double step_size, int rrc_span) {
  FfeReceiver rx;
  const SymbolSamples sym = matched_filter_downsample(single_pd, sps, rrc_alpha, bits, train, 0, rrc_span);
  rx.phase = sym.phase;
  const Eigen::VectorXd seg = sym.values.segment(train.first, train.count);
  rx.input_mean = seg.mean();
  const double sd = std::sqrt((seg.array() - rx.input_mean).square().mean());
  rx.input_scale = sd > 0.0 ? 1.0 / sd : 1.0;
  const Eigen::VectorXd x = (sym.values.array() - rx.input_mean) * rx.input_scale;
  Eigen::VectorXd d(x.size());
  for (Eigen::Index t = 0; t < d.size(); ++t)
    d[t] = t < static_cast<Eigen::Index>(bits.size()) ? 2.0 * bits[static_cast<std::size_t>(t)] - 1.0 : 0.0;
  rx.state = ffe_lms_train(x, d, FfeState::identity(n_taps, step_size), std::min(n_train, train.count), train.first);
  const Eigen::VectorXd y = ffe_apply(x, rx.state);
  const std::span<const std::uint8_t> ref(bits);
  rx.rule = fit_decision_rule(std::span<const double>(y.data() + train.first, static_cast<std::size_t>(train.count)),
                              ref.subspan(static_cast<std::size_t>(train.first), static_cast<std::size_t>(train.count)));
  return rx;
}

BerResult evaluate_ffe(const FfeReceiver& ffe, const RealSequence& single_pd, const Bits& bits, int sps,
                       double rrc_alpha, SymbolRange test, int rrc_span) {
  const SymbolSamples sym = matched_filter_downsample_at(single_pd, sps, rrc_alpha, ffe.phase, 0, rrc_span);
  if (test.end() > sym.values.size()) throw BoundaryError("evaluate_ffe: test range outside the signal");
  const Eigen::VectorXd x = (sym.values.array() - ffe.input_mean) * ffe.input_scale;
  const Eigen::VectorXd y = ffe_apply(x, ffe.state);
  const std::span<const std::uint8_t> ref(bits);
  return count_ber(hard_decide(std::span<const double>(y.data() + test.first, static_cast<std::size_t>(test.count)), ffe.rule),
                   ref.subspan(static_cast<std::size_t>(test.first), static_cast<std::size_t>(test.count)), 0);
}

}  // namespace slicenn
