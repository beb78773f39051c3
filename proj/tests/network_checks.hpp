#pragma once

// Random small networks, the nested-loop forward oracle and a central
// difference gradient check, shared by the unit and acceptance suites.

#include <cmath>

#include "oracles.hpp"
#include "slicenn/network.hpp"

namespace checks {

using namespace slicenn;


inline oracle::M to_m(const Eigen::MatrixXd& a) {
  oracle::M m{static_cast<int>(a.rows()), static_cast<int>(a.cols()), {}};
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) m.v.push_back(a(i, j));
  return m;
}

inline int act_id(Activation f) { return static_cast<int>(f); }

inline Activation pick(Prng& p, std::initializer_list<Activation> from) {
  const auto i = static_cast<std::size_t>(p.uniform() * static_cast<double>(from.size()));
  return *(from.begin() + i);
}

inline int draw(Prng& p, int lo, int hi) { return lo + static_cast<int>(p.uniform() * (hi - lo + 1)); }

inline NetworkShape random_shape(Prng& p, Arch arch, GruUpdate upd = GruUpdate::verbatim) {
  NetworkShape s;
  s.arch = arch;
  s.memory = draw(p, 1, 6);
  s.n_slices = draw(p, 1, 4);
  s.n_hidden = draw(p, 1, 3);
  s.filter_width = arch == Arch::cnn ? draw(p, 1, s.memory) : 0;
  s.f_hidden = pick(p, {Activation::sigmoid, Activation::tanh, Activation::linear});
  s.f_out = pick(p, {Activation::sigmoid, Activation::linear});
  s.gru_update = upd;
  s.gru_readout = p.uniform() < 0.5 ? GruReadout::final_state : GruReadout::per_step_mean;
  return s;
}

inline Network<double> random_network(const NetworkShape& s, Prng& p) {
  Network<double> n = Network<double>::zeros(s);
  for (auto& t : n.params)
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = p.gaussian() * 0.8;
  return n;
}

inline std::vector<double> frame_vec(const Eigen::MatrixXd& x, Eigen::Index col) {
  return {x.col(col).data(), x.col(col).data() + x.rows()};
}

inline double oracle_forward(const Network<double>& n, const std::vector<double>& x) {
  const NetworkShape& s = n.shape;
  const int fh = act_id(s.f_hidden), fo = act_id(s.f_out);
  switch (s.arch) {
    case Arch::fnn:
      return oracle::fnn(x, to_m(n[fnn_param::w_hidden]), to_m(n[fnn_param::b_hidden]), to_m(n[fnn_param::w_out]),
                         n[fnn_param::b_out](0, 0), fh, fo);
    case Arch::gru: {
      using namespace gru_param;
      oracle::GruParams g{to_m(n[w_r]), to_m(n[u_r]), to_m(n[b_r]), to_m(n[w_s]), to_m(n[u_s]), to_m(n[b_s]),
                          to_m(n[w_h]), to_m(n[u_h]), to_m(n[b_h]), to_m(n[w_out]), n[b_out](0, 0)};
      return oracle::gru(x, s.memory, s.n_slices, g, fh, fo, s.gru_update == GruUpdate::verbatim,
                         s.gru_readout == GruReadout::per_step_mean);
    }
    case Arch::cnn:
      return oracle::cnn(x, s.memory, s.n_slices, s.filter_width, to_m(n[cnn_param::filters]),
                         to_m(n[cnn_param::b_filters]), to_m(n[cnn_param::w_out]), n[cnn_param::b_out](0, 0), fh, fo);
  }
  return NAN;
}

inline double loss_of(const Network<double>& n, const Eigen::MatrixXd& x, const Eigen::MatrixXd& target) {
  return mse_loss<double>(forward_batch(n, x), target);
}

// Max over instances of ||analytic - numeric|| / max(||analytic||, ||numeric||).
inline double gradient_check(Prng& p, Arch arch, GruUpdate upd, int instances) {
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const NetworkShape s = random_shape(p, arch, upd);
    Network<double> n = random_network(s, p);
    const int batch = 3;
    Eigen::MatrixXd x(s.input_size(), batch), target(1, batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = p.gaussian();
    for (Eigen::Index i = 0; i < batch; ++i) target(0, i) = p.uniform();

    ForwardCache<double> fc;
    Eigen::MatrixXd dy;
    mse_loss<double>(forward_batch(n, x, &fc), target, &dy);
    const Network<double> g = backward_batch(n, x, fc, dy);

    double num2 = 0.0, ana2 = 0.0, diff2 = 0.0;
    const double eps = 1e-5;
    for (std::size_t t = 0; t < n.params.size(); ++t)
      for (Eigen::Index i = 0; i < n.params[t].size(); ++i) {
        double& w = n.params[t].data()[i];
        const double w0 = w;
        w = w0 + eps;
        const double lp = loss_of(n, x, target);
        w = w0 - eps;
        const double lm = loss_of(n, x, target);
        w = w0;
        const double numeric = (lp - lm) / (2.0 * eps);
        const double analytic = g.params[t].data()[i];
        num2 += numeric * numeric;
        ana2 += analytic * analytic;
        diff2 += (numeric - analytic) * (numeric - analytic);
      }
    const double scale = std::sqrt(std::max(num2, ana2));
    if (scale > 1e-12) worst = std::max(worst, std::sqrt(diff2) / scale);
  }
  return worst;
}

}  // namespace checks
