#include "slicenn/rx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slicenn {

DecisionRule fit_decision_rule(std::span<const double> values, std::span<const std::uint8_t> labels,
                               ThresholdMethod method) {
  if (values.size() != labels.size()) throw AlignmentError("fit_decision_rule: values/labels length mismatch");
  if (values.empty()) throw EmptyRequestError("fit_decision_rule: no training values");

  double sum[2] = {0.0, 0.0};
  std::size_t n[2] = {0, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum[labels[i] ? 1 : 0] += values[i];
    ++n[labels[i] ? 1 : 0];
  }
  DecisionRule rule;
  rule.method = method;
  if (n[0] == 0 || n[1] == 0) {
    // One class only: a pass-through rule at the observed mean.
    rule.threshold = (sum[0] + sum[1]) / static_cast<double>(values.size());
    return rule;
  }
  const double mean0 = sum[0] / static_cast<double>(n[0]);
  const double mean1 = sum[1] / static_cast<double>(n[1]);
  if (mean1 != mean0) {
    rule.offset = mean0;
    rule.scale = 1.0 / (mean1 - mean0);
  } else {
    rule.threshold = mean0;
    return rule;
  }
  if (method == ThresholdMethod::midpoint) {
    rule.threshold = 0.5;
    return rule;
  }

  // min_error: scan cut points between sorted normalized values; a cut at
  // value v means everything <= v decides 0.
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> z(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) z[i] = rule.normalize(values[i]);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });

  // Cut below everything: all decide 1, errors = number of zeros.
  std::size_t errors = n[0];
  std::size_t best_errors = errors;
  double best_threshold = z[order.front()] - 1.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    errors += labels[order[r]] ? 1 : 0;
    errors -= labels[order[r]] ? 0 : 1;
    if (r + 1 < order.size() && z[order[r + 1]] == z[order[r]]) continue;
    if (errors < best_errors) {
      best_errors = errors;
      best_threshold = z[order[r]];
    }
  }
  rule.threshold = best_threshold;
  return rule;
}

Bits hard_decide(std::span<const double> values, const DecisionRule& rule) {
  Bits out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = rule.decide(values[i]);
  return out;
}

BerResult count_ber(std::span<const std::uint8_t> decided, std::span<const std::uint8_t> reference,
                    std::size_t guard) {
  if (decided.size() != reference.size())
    throw AlignmentError("count_ber: decided and reference lengths differ");
  if (2 * guard >= decided.size()) throw AlignmentError("count_ber: guard leaves no symbols to count");
  BerResult r;
  for (std::size_t i = guard; i < decided.size() - guard; ++i) r.errors += decided[i] != reference[i];
  r.bits_counted = decided.size() - 2 * guard;
  r.ber = static_cast<double>(r.errors) / static_cast<double>(r.bits_counted);
  return r;
}

Eigen::Index phase_offset(int phase, int sps) {
  return phase < (sps + 1) / 2 ? phase : phase - sps;
}

SymbolSamples matched_filter_downsample_at(const RealSequence& samples, int sps, double rrc_alpha, int phase,
                                           Eigen::Index alignment, int rrc_span) {
  if (sps < 1) throw ParameterError("matched_filter_downsample: sps must be >= 1");
  if (phase < 0 || phase >= sps) throw ParameterError("matched_filter_downsample: phase out of range");
  const RealSequence filtered = fir_apply(samples, design_rrc(rrc_alpha, rrc_span, sps));
  const Eigen::Index n_sym = (samples.size() - alignment) / sps;
  const Eigen::Index off = phase_offset(phase, sps);
  SymbolSamples out{Eigen::VectorXd::Zero(std::max<Eigen::Index>(n_sym, 0)), phase};
  for (Eigen::Index t = 0; t < n_sym; ++t) {
    const Eigen::Index idx = alignment + t * sps + off;
    if (idx >= 0 && idx < filtered.size()) out.values[t] = filtered.samples[idx];
  }
  return out;
}

SymbolSamples matched_filter_downsample(const RealSequence& samples, int sps, double rrc_alpha,
                                        std::span<const std::uint8_t> reference, SymbolRange train,
                                        Eigen::Index alignment, int rrc_span) {
  if (sps < 2) throw ParameterError("matched_filter_downsample: sps must be >= 2");
  const RealSequence filtered = fir_apply(samples, design_rrc(rrc_alpha, rrc_span, sps));
  const Eigen::Index n_sym = (samples.size() - alignment) / sps;
  if (train.first < 0 || train.end() > n_sym || train.end() > static_cast<Eigen::Index>(reference.size()))
    throw BoundaryError("matched_filter_downsample: training range outside the signal");

  auto read = [&](int phase) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_sym);
    const Eigen::Index off = phase_offset(phase, sps);
    for (Eigen::Index t = 0; t < n_sym; ++t) {
      const Eigen::Index idx = alignment + t * sps + off;
      if (idx >= 0 && idx < filtered.size()) v[t] = filtered.samples[idx];
    }
    return v;
  };

  const auto labels = reference.subspan(static_cast<std::size_t>(train.first), static_cast<std::size_t>(train.count));
  SymbolSamples best;
  std::size_t best_errors = std::numeric_limits<std::size_t>::max();
  double best_separation = -1.0;
  for (int phase = 0; phase < sps; ++phase) {
    Eigen::VectorXd v = read(phase);
    std::span<const double> tv(v.data() + train.first, static_cast<std::size_t>(train.count));
    const DecisionRule rule = fit_decision_rule(tv, labels);
    std::size_t errors = 0;
    double s[2] = {0, 0}, ss[2] = {0, 0};
    double n[2] = {0, 0};
    for (std::size_t i = 0; i < tv.size(); ++i) {
      errors += rule.decide(tv[i]) != labels[i];
      const int c = labels[i] ? 1 : 0;
      s[c] += tv[i];
      ss[c] += tv[i] * tv[i];
      n[c] += 1;
    }
    double separation = 0.0;
    if (n[0] > 0 && n[1] > 0) {
      const double m0 = s[0] / n[0], m1 = s[1] / n[1];
      const double sd0 = std::sqrt(std::max(ss[0] / n[0] - m0 * m0, 0.0));
      const double sd1 = std::sqrt(std::max(ss[1] / n[1] - m1 * m1, 0.0));
      separation = std::abs(m1 - m0) / (sd0 + sd1 + 1e-300);
    }
    if (errors < best_errors || (errors == best_errors && separation > best_separation)) {
      best_errors = errors;
      best_separation = separation;
      best = SymbolSamples{std::move(v), phase};
    }
  }
  return best;
}

FfeState FfeState::identity(int n_taps, double step_size) {
  if (n_taps < 1 || n_taps % 2 == 0) throw ParameterError("FfeState: n_taps must be odd");
  FfeState s;
  s.n_taps = n_taps;
  s.step_size = step_size;
  s.taps = Eigen::VectorXd::Zero(n_taps);
  s.taps[n_taps / 2] = 1.0;
  return s;
}

namespace {

double ffe_output(const Eigen::VectorXd& x, const Eigen::VectorXd& taps, Eigen::Index k) {
  const Eigen::Index c = taps.size() / 2;
  double y = 0.0;
  for (Eigen::Index j = 0; j < taps.size(); ++j) {
    const Eigen::Index idx = k - c + j;
    if (idx >= 0 && idx < x.size()) y += taps[j] * x[idx];
  }
  return y;
}

}  // namespace

FfeState ffe_lms_train(const Eigen::VectorXd& input, const Eigen::VectorXd& reference, FfeState state,
                       Eigen::Index n_train, Eigen::Index first) {
  if (state.taps.size() != state.n_taps || state.n_taps % 2 == 0)
    throw ParameterError("ffe_lms_train: inconsistent tap state");
  if (first < 0 || first + n_train > std::min(input.size(), reference.size()))
    throw BoundaryError("ffe_lms_train: training range outside the signal");
  const Eigen::Index c = state.n_taps / 2;
  for (Eigen::Index k = first; k < first + n_train; ++k) {
    const double e = reference[k] - ffe_output(input, state.taps, k);
    for (Eigen::Index j = 0; j < state.n_taps; ++j) {
      const Eigen::Index idx = k - c + j;
      if (idx >= 0 && idx < input.size()) state.taps[j] += state.step_size * e * input[idx];
    }
    if (!state.taps.allFinite() || state.taps.cwiseAbs().maxCoeff() > 1e6)
      throw StepSizeError("ffe_lms_train: taps diverged (reduce the step size)");
  }
  return state;
}

Eigen::VectorXd ffe_apply(const Eigen::VectorXd& input, const FfeState& state) {
  Eigen::VectorXd y(input.size());
  for (Eigen::Index k = 0; k < input.size(); ++k) y[k] = ffe_output(input, state.taps, k);
  return y;
}

RequiredSnr required_snr(std::vector<CurvePoint> curve, double threshold, double ber_floor) {
  std::sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.snr_db < b.snr_db; });
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].ber > threshold) continue;
    if (i == 0) return RequiredSnr{RequiredSnr::Status::below_grid, curve[0].snr_db};
    const double y0 = std::log10(std::max(curve[i - 1].ber, ber_floor));
    const double y1 = std::log10(std::max(curve[i].ber, ber_floor));
    const double yt = std::log10(threshold);
    const double x0 = curve[i - 1].snr_db, x1 = curve[i].snr_db;
    const double snr = (y1 == y0) ? x1 : x0 + (x1 - x0) * (y0 - yt) / (y0 - y1);
    return RequiredSnr{RequiredSnr::Status::reached, snr};
  }
  return RequiredSnr{RequiredSnr::Status::no_reach, 0.0};
}

std::optional<double> snr_penalty_at_kp4(const std::vector<CurvePoint>& curve, double reference_required_snr_db,
                                         double ber_floor) {
  const RequiredSnr r = required_snr(curve, kKp4Threshold, ber_floor);
  if (r.status == RequiredSnr::Status::no_reach) return std::nullopt;
  return r.snr_db - reference_required_snr_db;
}

}  // namespace slicenn
