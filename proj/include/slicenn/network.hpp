#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicenn/dsp.hpp"

namespace slicenn {

enum class Arch { fnn, gru, cnn };
enum class Activation { linear, sigmoid, tanh, relu };

/// Sign of the candidate term in the GRU state update:
/// verbatim  h_t = (1 - s) * h_{t-1} - s * c
/// standard  h_t = (1 - s) * h_{t-1} + s * c
enum class GruUpdate { verbatim, standard };
enum class GruReadout { final_state, per_step_mean };

std::string to_string(Arch a);
std::string to_string(Activation a);
std::string to_string(GruUpdate u);
std::string to_string(GruReadout r);
Arch arch_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
GruUpdate gru_update_from_string(const std::string& s);
GruReadout gru_readout_from_string(const std::string& s);

struct NetworkShape {
  Arch arch = Arch::fnn;
  int memory = 1;        // M, time positions per frame
  int n_slices = 4;      // features per time position
  int n_hidden = 1;      // N_h (filters for CNN)
  int filter_width = 0;  // N_w, CNN only
  Activation f_hidden = Activation::sigmoid;
  Activation f_out = Activation::linear;
  GruUpdate gru_update = GruUpdate::verbatim;
  GruReadout gru_readout = GruReadout::final_state;

  int input_size() const { return memory * n_slices; }
  int feature_map_length() const { return memory - filter_width + 1; }
  void validate() const;
};

// Tensor order per architecture. Biases are column vectors; b_out is 1x1.
namespace fnn_param {
enum : int { w_hidden, b_hidden, w_out, b_out, count };  // w_hidden: (M n) x N_h
}
namespace gru_param {
// w_*: N_h x n, u_*: N_h x N_h, b_*: N_h x 1
enum : int { w_r, u_r, b_r, w_s, u_s, b_s, w_h, u_h, b_h, w_out, b_out, count };
}
namespace cnn_param {
// filters: (N_w n) x N_h, column g is filter g flattened as j * n + slice;
// w_out: (P N_h) x 1 indexed i * N_h + g with P = M - N_w + 1
enum : int { filters, b_filters, w_out, b_out, count };
}

std::vector<std::string> parameter_names(Arch arch);

template <typename Scalar>
inline Scalar activate(Activation f, Scalar a) {
  switch (f) {
    case Activation::linear: return a;
    case Activation::sigmoid: return Scalar(1) / (Scalar(1) + std::exp(-a));
    case Activation::tanh: return std::tanh(a);
    case Activation::relu: return a > Scalar(0) ? a : Scalar(0);
  }
  return a;
}

/// Derivative expressed through the pre-activation `a` and output `y`.
template <typename Scalar>
inline Scalar activate_grad(Activation f, Scalar a, Scalar y) {
  switch (f) {
    case Activation::linear: return Scalar(1);
    case Activation::sigmoid: return y * (Scalar(1) - y);
    case Activation::tanh: return Scalar(1) - y * y;
    case Activation::relu: return a > Scalar(0) ? Scalar(1) : Scalar(0);
  }
  return Scalar(1);
}

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Derived>
auto apply_activation(Activation f, const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return a.unaryExpr([f](Scalar v) { return activate(f, v); }).eval();
}

template <typename Scalar>
Mat<Scalar> activation_grad(Activation f, const Mat<Scalar>& a, const Mat<Scalar>& y) {
  return a.binaryExpr(y, [f](Scalar av, Scalar yv) { return activate_grad(f, av, yv); });
}

/// Multiplication tally of a single-frame forward pass. `weight` counts
/// multiplications by trained weights; `elementwise` counts gate products.
struct MultiplyCount {
  long long weight = 0;
  long long elementwise = 0;
};

/// Parameter set of one equalizer network, tensors in declared order.
template <typename Scalar>
struct Network {
  NetworkShape shape;
  std::vector<Mat<Scalar>> params;

  Mat<Scalar>& operator[](int i) { return params[static_cast<std::size_t>(i)]; }
  const Mat<Scalar>& operator[](int i) const { return params[static_cast<std::size_t>(i)]; }

  static Network zeros(const NetworkShape& shape);
  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) for weights, zero biases.
  static Network initialized(const NetworkShape& shape, Prng& prng);

  long long parameter_count() const {
    long long n = 0;
    for (const auto& p : params) n += p.size();
    return n;
  }
  bool all_finite() const {
    for (const auto& p : params)
      if (!p.allFinite()) return false;
    return true;
  }
  Network zeros_like() const {
    Network n{shape, params};
    for (auto& p : n.params) p.setZero();
    return n;
  }
};

template <typename Scalar>
Network<Scalar> Network<Scalar>::zeros(const NetworkShape& shape) {
  shape.validate();
  const int in = shape.input_size(), nh = shape.n_hidden, ns = shape.n_slices;
  Network net{shape, {}};
  auto z = [](int r, int c) { return Mat<Scalar>::Zero(r, c); };
  switch (shape.arch) {
    case Arch::fnn:
      net.params = {z(in, nh), z(nh, 1), z(nh, 1), z(1, 1)};
      break;
    case Arch::gru:
      net.params = {z(nh, ns), z(nh, nh), z(nh, 1), z(nh, ns), z(nh, nh), z(nh, 1),
                    z(nh, ns), z(nh, nh), z(nh, 1), z(nh, 1),  z(1, 1)};
      break;
    case Arch::cnn:
      net.params = {z(shape.filter_width * ns, nh), z(nh, 1), z(shape.feature_map_length() * nh, 1), z(1, 1)};
      break;
  }
  return net;
}

template <typename Scalar>
Network<Scalar> Network<Scalar>::initialized(const NetworkShape& shape, Prng& prng) {
  Network net = zeros(shape);
  auto fill = [&](Mat<Scalar>& m, double fan_in, double fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = Scalar(bound * (2.0 * prng.uniform() - 1.0));
  };
  const double in = shape.input_size(), nh = shape.n_hidden, ns = shape.n_slices;
  switch (shape.arch) {
    case Arch::fnn:
      fill(net[fnn_param::w_hidden], in, nh);
      fill(net[fnn_param::w_out], nh, 1);
      break;
    case Arch::gru:
      for (int w : {gru_param::w_r, gru_param::w_s, gru_param::w_h}) fill(net[w], ns, nh);
      for (int u : {gru_param::u_r, gru_param::u_s, gru_param::u_h}) fill(net[u], nh, nh);
      fill(net[gru_param::w_out], nh, 1);
      break;
    case Arch::cnn:
      fill(net[cnn_param::filters], shape.filter_width * ns, nh);
      fill(net[cnn_param::w_out], shape.feature_map_length() * nh, 1);
      break;
  }
  return net;
}

/// Intermediate values of a batched forward pass, kept for backprop.
template <typename Scalar>
struct ForwardCache {
  Mat<Scalar> z, y;                       // 1 x B output pre-activation / output
  std::vector<Mat<Scalar>> a, h;          // FNN: hidden; CNN: per position; GRU: states h_0..h_M
  std::vector<Mat<Scalar>> r, s, c, g;    // GRU gates, candidate, U_h h + b_h
};

/// Batched forward pass; frames are the columns of `x` (input_size x B).
template <typename Scalar>
Mat<Scalar> forward_batch(const Network<Scalar>& net, const Mat<Scalar>& x, ForwardCache<Scalar>* cache = nullptr) {
  const NetworkShape& sh = net.shape;
  const Eigen::Index batch = x.cols();
  if (x.rows() != sh.input_size()) throw DimensionError("forward: frame length does not match the network input");
  ForwardCache<Scalar> local;
  ForwardCache<Scalar>& fc = cache ? *cache : local;
  fc = ForwardCache<Scalar>{};

  switch (sh.arch) {
    case Arch::fnn: {
      using namespace fnn_param;
      Mat<Scalar> a = (net[w_hidden].transpose() * x).colwise() + net[b_hidden].col(0);
      Mat<Scalar> h = apply_activation(sh.f_hidden, a);
      fc.z = (net[w_out].transpose() * h).array() + net[b_out](0, 0);
      fc.a.push_back(std::move(a));
      fc.h.push_back(std::move(h));
      break;
    }
    case Arch::gru: {
      using namespace gru_param;
      const int ns = sh.n_slices;
      const Scalar sign = sh.gru_update == GruUpdate::verbatim ? Scalar(-1) : Scalar(1);
      Mat<Scalar> h = Mat<Scalar>::Zero(sh.n_hidden, batch);
      fc.h.push_back(h);
      Mat<Scalar> readout = Mat<Scalar>::Zero(1, batch);
      for (int t = 0; t < sh.memory; ++t) {
        const auto u = x.middleRows(t * ns, ns);
        Mat<Scalar> r = apply_activation(Activation::sigmoid,
                                         ((net[w_r] * u + net[u_r] * h).colwise() + net[b_r].col(0)).eval());
        Mat<Scalar> s = apply_activation(Activation::sigmoid,
                                         ((net[w_s] * u + net[u_s] * h).colwise() + net[b_s].col(0)).eval());
        Mat<Scalar> g = (net[u_h] * h).colwise() + net[b_h].col(0);
        Mat<Scalar> ac = net[w_h] * u + r.cwiseProduct(g);
        Mat<Scalar> c = apply_activation(sh.f_hidden, ac);
        h = (Scalar(1) - s.array()).matrix().cwiseProduct(h) + sign * s.cwiseProduct(c);
        if (sh.gru_readout == GruReadout::per_step_mean) readout += net[w_out].transpose() * h;
        fc.r.push_back(std::move(r));
        fc.s.push_back(std::move(s));
        fc.g.push_back(std::move(g));
        fc.a.push_back(std::move(ac));
        fc.c.push_back(std::move(c));
        fc.h.push_back(h);
      }
      if (sh.gru_readout == GruReadout::final_state) {
        fc.z = (net[w_out].transpose() * h).array() + net[b_out](0, 0);
      } else {
        fc.z = (readout / Scalar(sh.memory)).array() + net[b_out](0, 0);
      }
      break;
    }
    case Arch::cnn: {
      using namespace cnn_param;
      const int ns = sh.n_slices, nh = sh.n_hidden;
      fc.z = Mat<Scalar>::Constant(1, batch, net[b_out](0, 0));
      for (int i = 0; i < sh.feature_map_length(); ++i) {
        Mat<Scalar> a = (net[filters].transpose() * x.middleRows(i * ns, sh.filter_width * ns)).colwise() +
                        net[b_filters].col(0);
        Mat<Scalar> h = apply_activation(sh.f_hidden, a);
        fc.z += net[w_out].middleRows(i * nh, nh).transpose() * h;
        fc.a.push_back(std::move(a));
        fc.h.push_back(std::move(h));
      }
      break;
    }
  }
  fc.y = apply_activation(sh.f_out, fc.z);
  return fc.y;
}

/// Gradients of a scalar loss given dL/dy (1 x B) and the forward cache.
template <typename Scalar>
Network<Scalar> backward_batch(const Network<Scalar>& net, const Mat<Scalar>& x, const ForwardCache<Scalar>& fc,
                               const Mat<Scalar>& dy) {
  const NetworkShape& sh = net.shape;
  Network<Scalar> grad = net.zeros_like();
  const Mat<Scalar> dz = dy.cwiseProduct(activation_grad(sh.f_out, fc.z, fc.y));

  switch (sh.arch) {
    case Arch::fnn: {
      using namespace fnn_param;
      grad[b_out](0, 0) = dz.sum();
      grad[w_out] = fc.h[0] * dz.transpose();
      const Mat<Scalar> da = (net[w_out] * dz).cwiseProduct(activation_grad(sh.f_hidden, fc.a[0], fc.h[0]));
      grad[w_hidden] = x * da.transpose();
      grad[b_hidden] = da.rowwise().sum();
      break;
    }
    case Arch::gru: {
      using namespace gru_param;
      const int ns = sh.n_slices, m = sh.memory;
      const Scalar sign = sh.gru_update == GruUpdate::verbatim ? Scalar(-1) : Scalar(1);
      grad[b_out](0, 0) = dz.sum();
      Mat<Scalar> dh;
      if (sh.gru_readout == GruReadout::final_state) {
        grad[w_out] = fc.h[static_cast<std::size_t>(m)] * dz.transpose();
        dh = net[w_out] * dz;
      } else {
        const Mat<Scalar> dzm = dz / Scalar(m);
        grad[w_out].setZero();
        for (int t = 1; t <= m; ++t) grad[w_out] += fc.h[static_cast<std::size_t>(t)] * dzm.transpose();
        dh = Mat<Scalar>::Zero(sh.n_hidden, x.cols());
      }
      const Mat<Scalar> dh_readout =
          sh.gru_readout == GruReadout::per_step_mean ? Mat<Scalar>(net[w_out] * (dz / Scalar(m))) : Mat<Scalar>();
      for (int t = m - 1; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        if (sh.gru_readout == GruReadout::per_step_mean) dh += dh_readout;
        const Mat<Scalar>& hp = fc.h[ti];
        const Mat<Scalar>& r = fc.r[ti];
        const Mat<Scalar>& s = fc.s[ti];
        const Mat<Scalar>& c = fc.c[ti];
        const auto u = x.middleRows(t * ns, ns);

        const Mat<Scalar> ds = dh.cwiseProduct(sign * c - hp);
        const Mat<Scalar> dac = (sign * dh.cwiseProduct(s)).cwiseProduct(activation_grad(sh.f_hidden, fc.a[ti], c));
        const Mat<Scalar> dr = dac.cwiseProduct(fc.g[ti]);
        const Mat<Scalar> dg = dac.cwiseProduct(r);
        const Mat<Scalar> ds_pre = ds.cwiseProduct(s.cwiseProduct((Scalar(1) - s.array()).matrix()));
        const Mat<Scalar> dr_pre = dr.cwiseProduct(r.cwiseProduct((Scalar(1) - r.array()).matrix()));

        grad[w_h] += dac * u.transpose();
        grad[u_h] += dg * hp.transpose();
        grad[b_h] += dg.rowwise().sum();
        grad[w_s] += ds_pre * u.transpose();
        grad[u_s] += ds_pre * hp.transpose();
        grad[b_s] += ds_pre.rowwise().sum();
        grad[w_r] += dr_pre * u.transpose();
        grad[u_r] += dr_pre * hp.transpose();
        grad[b_r] += dr_pre.rowwise().sum();

        Mat<Scalar> dh_prev = dh.cwiseProduct((Scalar(1) - s.array()).matrix());
        dh_prev.noalias() += net[u_h].transpose() * dg;
        dh_prev.noalias() += net[u_s].transpose() * ds_pre;
        dh_prev.noalias() += net[u_r].transpose() * dr_pre;
        dh = std::move(dh_prev);
      }
      break;
    }
    case Arch::cnn: {
      using namespace cnn_param;
      const int ns = sh.n_slices, nh = sh.n_hidden;
      grad[b_out](0, 0) = dz.sum();
      for (int i = 0; i < sh.feature_map_length(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        grad[w_out].middleRows(i * nh, nh) = fc.h[ii] * dz.transpose();
        const Mat<Scalar> da = (net[w_out].middleRows(i * nh, nh) * dz)
                                   .cwiseProduct(activation_grad(sh.f_hidden, fc.a[ii], fc.h[ii]));
        grad[filters].noalias() += x.middleRows(i * ns, sh.filter_width * ns) * da.transpose();
        grad[b_filters] += da.rowwise().sum();
      }
      break;
    }
  }
  return grad;
}

/// Mean squared error over the batch; fills dL/dy when `dy` is given.
template <typename Scalar>
Scalar mse_loss(const Mat<Scalar>& y, const Mat<Scalar>& target, Mat<Scalar>* dy = nullptr) {
  const Mat<Scalar> e = y - target;
  const Scalar n = Scalar(e.size());
  if (dy) *dy = (Scalar(2) / n) * e;
  return e.squaredNorm() / n;
}

/// Single-frame forward pass written out multiplication by multiplication;
/// `count`, when given, tallies the multiplications performed.
template <typename Scalar>
Scalar forward_frame(const Network<Scalar>& net, const Eigen::Ref<const Vec<Scalar>>& frame,
                     MultiplyCount* count = nullptr) {
  const NetworkShape& sh = net.shape;
  if (frame.size() != sh.input_size()) throw DimensionError("forward: frame length does not match the network input");
  MultiplyCount local;
  MultiplyCount& mc = count ? *count : local;
  auto wmul = [&](Scalar a, Scalar b) {
    ++mc.weight;
    return a * b;
  };
  auto emul = [&](Scalar a, Scalar b) {
    ++mc.elementwise;
    return a * b;
  };
  const int nh = sh.n_hidden, ns = sh.n_slices;
  Scalar z{};
  switch (sh.arch) {
    case Arch::fnn: {
      using namespace fnn_param;
      z = net[b_out](0, 0);
      for (int j = 0; j < nh; ++j) {
        Scalar a = net[b_hidden](j, 0);
        for (int i = 0; i < sh.input_size(); ++i) a += wmul(frame[i], net[w_hidden](i, j));
        z += wmul(activate(sh.f_hidden, a), net[w_out](j, 0));
      }
      break;
    }
    case Arch::gru: {
      using namespace gru_param;
      std::vector<Scalar> h(static_cast<std::size_t>(nh), Scalar(0)), hn(h.size());
      Scalar readout{};
      for (int t = 0; t < sh.memory; ++t) {
        for (int j = 0; j < nh; ++j) {
          Scalar pr = net[b_r](j, 0), ps = net[b_s](j, 0), pg = net[b_h](j, 0), pc{};
          for (int i = 0; i < ns; ++i) {
            const Scalar u = frame[t * ns + i];
            pr += wmul(net[w_r](j, i), u);
            ps += wmul(net[w_s](j, i), u);
            pc += wmul(net[w_h](j, i), u);
          }
          for (int k = 0; k < nh; ++k) {
            pr += wmul(net[u_r](j, k), h[k]);
            ps += wmul(net[u_s](j, k), h[k]);
            pg += wmul(net[u_h](j, k), h[k]);
          }
          const Scalar r = activate(Activation::sigmoid, pr);
          const Scalar s = activate(Activation::sigmoid, ps);
          const Scalar c = activate(sh.f_hidden, pc + emul(r, pg));
          const Scalar update = emul(s, c);
          hn[j] = emul(Scalar(1) - s, h[j]) + (sh.gru_update == GruUpdate::verbatim ? -update : update);
        }
        h.swap(hn);
        if (sh.gru_readout == GruReadout::per_step_mean)
          for (int j = 0; j < nh; ++j) readout += wmul(h[j], net[w_out](j, 0));
      }
      if (sh.gru_readout == GruReadout::final_state) {
        for (int j = 0; j < nh; ++j) readout += wmul(h[j], net[w_out](j, 0));
        z = readout + net[b_out](0, 0);
      } else {
        z = readout / Scalar(sh.memory) + net[b_out](0, 0);
      }
      break;
    }
    case Arch::cnn: {
      using namespace cnn_param;
      z = net[b_out](0, 0);
      for (int p = 0; p < sh.feature_map_length(); ++p) {
        for (int g = 0; g < nh; ++g) {
          Scalar a = net[b_filters](g, 0);
          for (int j = 0; j < sh.filter_width; ++j)
            for (int i = 0; i < ns; ++i) a += wmul(frame[(p + j) * ns + i], net[filters](j * ns + i, g));
          z += wmul(activate(sh.f_hidden, a), net[w_out](p * nh + g, 0));
        }
      }
      break;
    }
  }
  return activate(sh.f_out, z);
}

}  // namespace slicenn
