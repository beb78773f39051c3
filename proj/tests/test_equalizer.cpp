#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "slicenn/equalizer.hpp"
#include "slicenn/model_io.hpp"

using namespace slicenn;

namespace {

TrainingData make_data(double km, double snr_db, std::size_t n, std::uint64_t seed) {
  LinkConfig link;
  link.fiber_length_km = km;
  link.snr_db = snr_db;
  Prng p(seed);
  Bits bits = generate_bits(p, n);
  SlicedSignal s = simulate_link(bits, link, p);
  RealSequence drive = drive_waveform(bits, link);
  return {std::move(s), std::move(bits), std::move(drive)};
}

const DataSplit kSplit{{64, 12288}, 2048, {12288 + 192, 3840}};

EqualizerSpec quick(const std::string& name, int epochs = 30) {
  EqualizerSpec e = EqualizerSpec::from_name(name);
  e.epochs = epochs;
  e.optimizer = Optimizer::adam;
  e.learn_rate = 3e-3;
  e.seed = 11;
  return e;
}

}  // namespace

TEST_CASE("table-1 presets") {
  const auto sy = EqualizerSpec::from_name("Sy-FNN");
  CHECK(sy.framing.memory() == 14);
  CHECK(sy.n_hidden == 10);
  CHECK(sy.var_target == 0.69);
  const auto sa = EqualizerSpec::from_name("Sa-FNN");
  CHECK(sa.framing.memory() == 49);
  CHECK(sa.var_target == 0.17);
  const auto cnn = EqualizerSpec::from_name("Sy-CNN");
  CHECK(cnn.filter_width == 14);
  CHECK(cnn.n_hidden == 15);
  CHECK(sy.name() == "Sy-FNN");
  CHECK_THROWS_AS(EqualizerSpec::from_name("FNN"), ConfigurationError);
  CHECK_THROWS_AS(EqualizerSpec::from_name("Sy-LSTM"), ConfigurationError);
}

TEST_CASE("symbol-based fnn equalizes a short noiseless link") {
  const TrainingData d = make_data(0.0, INFINITY, 16384, 1);
  const TrainedModel m = train(quick("Sy-FNN", 60), d, kSplit);
  CHECK(m.net.all_finite());
  const BerResult r = evaluate(m, d, kSplit.test);
  CHECK(r.bits_counted == 3840);
  CHECK(r.ber < 1e-4);

  const Bits out = equalize(m, d.sliced, kSplit.test);
  const Bits again = equalize(m, d.sliced, kSplit.test);
  CHECK(out == again);
  CHECK(std::equal(out.begin(), out.end(), d.bits.begin() + kSplit.test.first));
}

TEST_CASE("training loss decreases on a moving average") {
  const TrainingData d = make_data(20.0, 14.0, 16384, 2);
  EqualizerSpec s = EqualizerSpec::from_name("Sy-FNN");
  s.epochs = 60;
  s.patience = 1000;
  const TrainedModel m = train(s, d, kSplit);
  REQUIRE(m.train_loss.size() == 60);
  std::vector<double> avg;
  for (std::size_t i = 10; i <= m.train_loss.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i - 10; j < i; ++j) sum += m.train_loss[j];
    avg.push_back(sum / 10.0);
  }
  for (std::size_t i = 1; i < avg.size(); ++i) CHECK(avg[i] <= avg[i - 1]);
  CHECK(m.validation_loss.size() == m.train_loss.size());
}

TEST_CASE("zero learn rate leaves the initial parameters") {
  const TrainingData d = make_data(0.0, INFINITY, 16384, 3);
  for (const std::string name : {"Sy-FNN", "Sy-GRU", "Sa-CNN"}) {
    EqualizerSpec s = EqualizerSpec::from_name(name);
    s.learn_rate = 0.0;
    s.epochs = 2;
    s.seed = 5;
    const TrainedModel m = train(s, d, kSplit);
    Prng p(5);
    const auto init = Network<double>::initialized(s.shape(), p);
    for (std::size_t i = 0; i < init.params.size(); ++i) CHECK(m.net.params[i] == init.params[i]);
  }
}

TEST_CASE("sample-based equalizer trains on the drive waveform") {
  const TrainingData d = make_data(0.0, INFINITY, 16384, 4);
  const TrainedModel m = train(quick("Sa-FNN", 10), d, kSplit);
  CHECK(m.sa_phase >= 0);
  CHECK(m.sa_phase < 8);
  CHECK(evaluate(m, d, kSplit.test).ber < 1e-3);
}

TEST_CASE("recurrent and convolutional equalizers run end to end") {
  const TrainingData d = make_data(20.0, 20.0, 16384, 5);
  for (const std::string name : {"Sy-GRU", "Sy-CNN"}) {
    const TrainedModel m = train(quick(name, 20), d, kSplit);
    const double ber = evaluate(m, d, kSplit.test).ber;
    CHECK(ber < 0.05);
  }
}

TEST_CASE("shuffled labels give chance-level ber") {
  TrainingData d = make_data(20.0, 20.0, 16384, 6);
  Prng p(99);
  Bits noise = generate_bits(p, d.bits.size());
  TrainingData fake{d.sliced, noise, d.drive};
  const TrainedModel m = train(quick("Sy-FNN", 5), fake, kSplit);
  const BerResult r = evaluate(m, d, kSplit.test);
  CHECK(r.ber > 0.4);
}

TEST_CASE("divergence is reported") {
  const TrainingData d = make_data(0.0, INFINITY, 16384, 7);
  EqualizerSpec s = EqualizerSpec::from_name("Sa-FNN");
  s.learn_rate = 1e6;
  s.epochs = 3;
  CHECK_THROWS_AS(train(s, d, kSplit), DivergenceError);
}

TEST_CASE("ranges without context are rejected") {
  const TrainingData d = make_data(0.0, INFINITY, 16384, 8);
  DataSplit bad = kSplit;
  bad.train.first = 0;
  CHECK_THROWS_AS(train(quick("Sy-FNN", 1), d, bad), BoundaryError);
  bad = kSplit;
  bad.validation = bad.train.count;
  CHECK_THROWS_AS(train(quick("Sy-FNN", 1), d, bad), ConfigurationError);
}

TEST_CASE("model file round trip is bit exact") {
  const TrainingData d = make_data(10.0, 18.0, 16384, 9);
  for (const std::string name : {"Sy-FNN", "Sa-CNN", "Sy-GRU"}) {
    const TrainedModel m = train(quick(name, 2), d, kSplit);
    std::stringstream ss;
    write_model(ss, m);
    const TrainedModel back = read_model(ss);
    CHECK(back.spec.name() == m.spec.name());
    for (std::size_t i = 0; i < m.net.params.size(); ++i) CHECK(back.net.params[i] == m.net.params[i]);
    CHECK(back.norm_mean == m.norm_mean);
    CHECK(back.norm_scale == m.norm_scale);
    CHECK(back.rule.threshold == m.rule.threshold);
    CHECK(back.sa_phase == m.sa_phase);
    CHECK(back.train_loss == m.train_loss);
    CHECK(symbol_values(back, d.sliced, kSplit.test) == symbol_values(m, d.sliced, kSplit.test));
  }
  std::stringstream junk("slicenn-model 99\n");
  CHECK_THROWS_AS(read_model(junk), FormatError);
  std::stringstream truncated("slicenn-model 1\narch fnn\n");
  CHECK_THROWS_AS(read_model(truncated), FormatError);
  CHECK_THROWS_AS(load_model("/nonexistent/dir/model.txt"), IoError);
}

TEST_CASE("reference receivers") {
  LinkConfig link;
  link.fiber_length_km = 60.0;
  Prng p(3);
  const Bits bits = generate_bits(p, 32768);
  const auto out = simulate_link_with_reference(bits, link, p);
  const SymbolRange tr{100, 20000}, te{20300, 12000};
  const FfeReceiver ffe = train_ffe(out.single_pd, bits, 8, 0.1, tr, 20000);
  CHECK(ffe.state.taps.allFinite());
  const auto rf = evaluate_ffe(ffe, out.single_pd, bits, 8, 0.1, te);
  CHECK(rf.ber > 1e-2);
  CHECK(rf.bits_counted == 12000);
}
