#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicenn/framing.hpp"
#include "slicenn/network.hpp"
#include "slicenn/rx.hpp"

namespace slicenn {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string& s);

/// Architecture, framing and training hyperparameters of one NN equalizer.
struct EqualizerSpec {
  Arch arch = Arch::fnn;
  FramingSpec framing;
  int n_hidden = 10;
  int filter_width = 0;  // CNN only
  Activation f_hidden = Activation::relu;
  Activation f_out = Activation::sigmoid;
  double var_target = 0.69;  // variance of the rescaled input
  double learn_rate = 1e-2;
  int mini_batch = 1000;
  int epochs = 200;
  int patience = 20;  // early stop after this many epochs without validation gain
  std::uint64_t seed = 1;
  GruUpdate gru_update = GruUpdate::verbatim;
  GruReadout gru_readout = GruReadout::final_state;
  Optimizer optimizer = Optimizer::sgd;
  // Receiver matched filter for Sa outputs; must mirror the transmit pulse.
  double rrc_alpha = 0.1;
  int rrc_span = 32;

  /// Tuned defaults: Sa at 8 sps (M = 49), Sy at 2 sps (M = 14).
  /// `sps` overrides the framing rate when nonzero.
  static EqualizerSpec table1(Arch arch, FramingMode mode, int sps = 0);
  /// Parses names such as "Sy-FNN" or "Sa-GRU" into table1().
  static EqualizerSpec from_name(const std::string& name, int sps = 0);

  std::string name() const { return to_string(framing.mode) + "-" + to_string(arch); }
  NetworkShape shape() const;
  void validate() const;
};

/// Everything the receiver may learn from: the sliced signal, the
/// transmitted bits and the pulse-shaped drive (the Sa regression target),
/// both at `sliced.sps`.
struct TrainingData {
  SlicedSignal sliced;
  Bits bits;
  RealSequence drive;
};

/// Training symbols, of which the last `validation` are held out for early
/// stopping, and a disjoint test range.
struct DataSplit {
  SymbolRange train;
  Eigen::Index validation = 16384;
  SymbolRange test;
};

struct TrainedModel {
  EqualizerSpec spec;
  Network<double> net;
  Eigen::VectorXd norm_mean;   // per slice
  Eigen::VectorXd norm_scale;  // per slice
  DecisionRule rule;
  int sa_phase = 0;            // matched-filter sampling phase (Sa only)
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
};

/// Mini-batch training on the MSE loss. Throws DivergenceError on a
/// non-finite loss.
TrainedModel train(const EqualizerSpec& spec, const TrainingData& data, const DataSplit& split);

/// Raw network outputs for a list of units (samples for Sa, symbols for Sy)
/// of a signal already at the framing rate.
Eigen::VectorXd network_outputs(const TrainedModel& model, const SlicedSignal& sliced,
                                const std::vector<Eigen::Index>& units);

/// Symbol-rate soft values for `range`: the network output for Sy; the
/// matched-filtered and decimated network output for Sa.
Eigen::VectorXd symbol_values(const TrainedModel& model, const SlicedSignal& sliced, SymbolRange range);

/// Recovered bits for `range` (resamples the input to the framing rate).
Bits equalize(const TrainedModel& model, const SlicedSignal& sliced, SymbolRange range);

BerResult evaluate(const TrainedModel& model, const TrainingData& data, SymbolRange test);

/// Smallest margin, in symbols, a range must keep from the signal edges.
Eigen::Index required_margin_symbols(const EqualizerSpec& spec);

// Reference receivers on the single-photodiode signal.

/// Matched filter, decimation at the best training phase, midpoint
/// threshold. No equalization.
BerResult evaluate_unequalized(const RealSequence& single_pd, const Bits& bits, int sps, double rrc_alpha,
                               SymbolRange train, SymbolRange test, int rrc_span = 32);

struct FfeReceiver {
  FfeState state;
  DecisionRule rule;
  int phase = 0;
  double input_mean = 0.0;
  double input_scale = 1.0;
};

/// Symbol-spaced FFE after the matched filter, LMS-adapted on `n_train`
/// training symbols toward +-1 targets.
FfeReceiver train_ffe(const RealSequence& single_pd, const Bits& bits, int sps, double rrc_alpha, SymbolRange train,
                      Eigen::Index n_train = 50000, int n_taps = 11, double step_size = 1e-3, int rrc_span = 32);

BerResult evaluate_ffe(const FfeReceiver& ffe, const RealSequence& single_pd, const Bits& bits, int sps,
                       double rrc_alpha, SymbolRange test, int rrc_span = 32);

}  // namespace slicenn
