#include <doctest.h>

#include <cmath>

#include "slicenn/rx.hpp"

using namespace slicenn;

namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("hard decisions") {
  DecisionRule rule;
  const std::vector<double> v{0.1, 0.9};
  CHECK(hard_decide(v, rule) == Bits{0, 1});
  const std::vector<double> ties(5, 0.5);
  CHECK(hard_decide(ties, rule) == Bits(5, 0));
}

TEST_CASE("midpoint threshold on two gaussian clusters") {
  Prng p(3);
  std::vector<double> v;
  Bits labels;
  for (int i = 0; i < 20000; ++i) {
    const std::uint8_t b = p.uniform() < 0.5;
    labels.push_back(b);
    v.push_back((b ? 3.0 : -1.0) + 0.4 * p.gaussian());
  }
  const DecisionRule r = fit_decision_rule(v, labels);
  // Threshold expressed back on the input axis.
  const double cut = r.threshold / r.scale + r.offset;
  CHECK(std::abs(cut - 1.0) < 0.05);
  std::size_t wrong = 0;
  const Bits d = hard_decide(v, r);
  for (std::size_t i = 0; i < d.size(); ++i) wrong += d[i] != labels[i];
  CHECK(wrong < 5);
}

TEST_CASE("ber counting") {
  Prng p(1);
  const Bits ref = generate_bits(p, 10000);
  CHECK(count_ber(ref, ref, 100).ber == 0.0);
  Bits inv = ref;
  for (auto& b : inv) b ^= 1;
  CHECK(count_ber(inv, ref, 0).ber == 1.0);
  Bits five = ref;
  for (std::size_t i : {500u, 1000u, 2000u, 5000u, 9000u}) five[i] ^= 1;
  const BerResult r = count_ber(five, ref, 100);
  CHECK(r.errors == 5);
  CHECK(r.bits_counted == 9800);
  CHECK(r.ber == 5.0 / 9800.0);
  Bits edge = ref;
  edge[10] ^= 1;
  CHECK(count_ber(edge, ref, 100).errors == 0);
  CHECK_THROWS_AS(count_ber(Bits(10), Bits(11), 0), AlignmentError);
}

TEST_CASE("strictly monotone rescaling with a refitted threshold keeps the ber") {
  Prng p(5);
  std::vector<double> v;
  Bits labels;
  for (int i = 0; i < 4000; ++i) {
    const std::uint8_t b = p.uniform() < 0.5;
    labels.push_back(b);
    v.push_back((b ? 1.0 : 0.0) + 0.5 * p.gaussian());
  }
  auto ber_of = [&](const std::vector<double>& x) {
    const DecisionRule r = fit_decision_rule(x, labels, ThresholdMethod::min_error);
    return count_ber(hard_decide(x, r), labels, 0).errors;
  };
  const auto base = ber_of(v);
  CHECK(base > 0);
  for (auto f : {+[](double x) { return std::exp(3.0 * x); }, +[](double x) { return x * x * x + 2.0 * x; },
                 +[](double x) { return std::atan(x) * 7.0 - 1.0; }}) {
    std::vector<double> w;
    for (double x : v) w.push_back(f(x));
    CHECK(ber_of(w) == base);
  }
}

TEST_CASE("lms converges on an identity channel") {
  Prng p(2);
  const Eigen::Index n = 60000;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = p.uniform() < 0.5 ? -1.0 : 1.0;
  FfeState s0;
  s0.n_taps = 11;
  s0.step_size = 0.01;
  s0.taps = Eigen::VectorXd::Zero(11);
  const FfeState s = ffe_lms_train(x, x, s0, 50000);
  CHECK(s.taps[5] == doctest::Approx(1.0).epsilon(0.01));
  for (int j = 0; j < 11; ++j)
    if (j != 5) CHECK(std::abs(s.taps[j]) < 0.05);

  FfeState frozen = s0;
  frozen.step_size = 0.0;
  frozen.taps.setConstant(0.3);
  CHECK(ffe_lms_train(x, x, frozen, 50000).taps == frozen.taps);
}

TEST_CASE("lms tap error shrinks on average") {
  const int seeds = 10;
  std::vector<double> err(4, 0.0);
  for (int seed = 0; seed < seeds; ++seed) {
    Prng p(100 + seed);
    Eigen::VectorXd x(8000), d(8000);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = p.gaussian();
    d = x;
    FfeState s;
    s.n_taps = 5;
    s.step_size = 1e-3;
    s.taps = Eigen::VectorXd::Zero(5);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(5);
    target[2] = 1.0;
    for (int stage = 0; stage < 4; ++stage) {
      s = ffe_lms_train(x, d, s, 2000, stage * 2000);
      err[stage] += (s.taps - target).norm() / seeds;
    }
  }
  for (int i = 1; i < 4; ++i) CHECK(err[i] < err[i - 1]);
}

TEST_CASE("ffe beats the slicer on a three-tap isi channel") {
  Prng p(7);
  const Eigen::Index n = 60000;
  Eigen::VectorXd sym(n), rx(n);
  Bits bits(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bits[i] = p.uniform() < 0.5;
    sym[i] = bits[i] ? 1.0 : -1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    rx[i] = 0.45 * (i > 0 ? sym[i - 1] : 0.0) + 1.0 * sym[i] + 0.35 * (i + 1 < n ? sym[i + 1] : 0.0) + 0.15 * p.gaussian();

  const Bits raw = hard_decide(view(rx), DecisionRule{0.0});
  const auto before = count_ber(raw, bits, 20);
  const FfeState s = ffe_lms_train(rx, sym, FfeState::identity(11, 2e-3), 50000);
  const Eigen::VectorXd y = ffe_apply(rx, s);
  const auto after = count_ber(hard_decide(view(y), DecisionRule{0.0}), bits, 20);
  CHECK(before.ber > 1e-2);
  CHECK(after.ber < before.ber / 10.0);
}

TEST_CASE("lms divergence is reported") {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1000, 10.0);
  CHECK_THROWS_AS(ffe_lms_train(x, 2.0 * x, FfeState::identity(11, 1.0), 1000), StepSizeError);
}

TEST_CASE("required snr interpolation") {
  const auto exact = required_snr({{8, 1e-2}, {10, 2.24e-4}, {12, 1e-6}});
  CHECK(exact.reached());
  CHECK(exact.snr_db == doctest::Approx(10.0).epsilon(1e-12));

  const auto r = required_snr({{9, 1e-3}, {11, 5e-5}});
  const double hand = 9.0 + 2.0 * (std::log10(1e-3) - std::log10(2.24e-4)) / (std::log10(1e-3) - std::log10(5e-5));
  CHECK(r.snr_db == doctest::Approx(hand).epsilon(1e-12));
  CHECK(std::abs(r.snr_db - 10.0) < 0.01);

  CHECK(required_snr({{5, 1e-1}, {6, 1e-2}}).status == RequiredSnr::Status::no_reach);
  CHECK(!snr_penalty_at_kp4({{5, 1e-1}, {6, 1e-2}}, 3.0).has_value());
  CHECK(required_snr({{5, 1e-5}, {6, 1e-6}}).status == RequiredSnr::Status::below_grid);
  CHECK(*snr_penalty_at_kp4({{9, 1e-3}, {11, 5e-5}}, 7.5) == doctest::Approx(hand - 7.5).epsilon(1e-12));
}

TEST_CASE("penalty is exact on synthetic log-linear curves") {
  Prng p(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double cross = 5.0 + 20.0 * p.uniform();
    const double slope = 0.3 + p.uniform();  // decades per dB
    std::vector<CurvePoint> curve;
    for (double s = 0.0; s <= 30.0; s += 1.0)
      curve.push_back({s, kKp4Threshold * std::pow(10.0, -slope * (s - cross))});
    const auto pen = snr_penalty_at_kp4(curve, 4.0);
    REQUIRE(pen.has_value());
    CHECK(std::abs(*pen - (cross - 4.0)) < 0.01);
  }
}
