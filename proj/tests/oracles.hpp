#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library's numeric code.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

// MT19937 written out from the published algorithm.
class Mt19937 {
 public:
  explicit Mt19937(std::uint32_t seed) {
    mt_[0] = seed;
    for (int i = 1; i < 624; ++i) mt_[i] = 1812433253u * (mt_[i - 1] ^ (mt_[i - 1] >> 30)) + static_cast<std::uint32_t>(i);
  }
  std::uint32_t next() {
    if (idx_ >= 624) twist();
    std::uint32_t y = mt_[idx_++];
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    return y;
  }

 private:
  void twist() {
    for (int i = 0; i < 624; ++i) {
      const std::uint32_t y = (mt_[i] & 0x80000000u) | (mt_[(i + 1) % 624] & 0x7fffffffu);
      mt_[i] = mt_[(i + 397) % 624] ^ (y >> 1) ^ ((y & 1u) ? 0x9908b0dfu : 0u);
    }
    idx_ = 0;
  }
  std::uint32_t mt_[624];
  int idx_ = 624;
};

// "Same" convolution referenced to the center tap, O(N K).
template <typename T>
std::vector<T> convolve_same(const std::vector<T>& x, const std::vector<double>& h) {
  const long n = static_cast<long>(x.size()), k = static_cast<long>(h.size());
  const long c = (k - 1) / 2;
  std::vector<T> y(x.size(), T(0));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < k; ++j) {
      const long src = i + c - j;
      if (src >= 0 && src < n) y[i] += h[j] * x[src];
    }
  return y;
}

// Naive DFT, for small spectral checks.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> X(n);
  const double pi = std::acos(-1.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t t = 0; t < n; ++t) X[k] += x[t] * std::polar(1.0, -2.0 * pi * double(k * t % n) / double(n));
  return X;
}

inline double act(int kind, double a) {
  switch (kind) {
    case 0: return a;
    case 1: return 1.0 / (1.0 + std::exp(-a));
    case 2: return std::tanh(a);
    default: return a > 0 ? a : 0.0;
  }
}

// Row-major plain matrices.
struct M {
  int r = 0, c = 0;
  std::vector<double> v;
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i * c + j)]; }
};

// y = f_out(sum_j w_out[j] f_h(b_h[j] + sum_i x[i] W[i][j]) + b_out)
inline double fnn(const std::vector<double>& x, const M& w, const M& b, const M& wo, double bo, int fh, int fo) {
  double z = bo;
  for (int j = 0; j < w.c; ++j) {
    double a = b(j, 0);
    for (int i = 0; i < w.r; ++i) a += x[i] * w(i, j);
    z += act(fh, a) * wo(j, 0);
  }
  return act(fo, z);
}

struct GruParams {
  M wr, ur, br, ws, us, bs, wh, uh, bh, wo;
  double bo = 0.0;
};

// Gates per step: r = sig(Wr u + Ur h + br), s = sig(Ws u + Us h + bs),
// c = f(Wh u + r * (Uh h + bh)), h' = (1 - s) h -/+ s c.
inline double gru(const std::vector<double>& x, int steps, int n_in, const GruParams& p, int fh, int fo, bool minus,
                  bool mean_readout) {
  const int nh = p.wr.r;
  std::vector<double> h(nh, 0.0);
  double acc = 0.0;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> hn(nh);
    for (int j = 0; j < nh; ++j) {
      double r = p.br(j, 0), s = p.bs(j, 0), g = p.bh(j, 0), c = 0.0;
      for (int i = 0; i < n_in; ++i) {
        const double u = x[t * n_in + i];
        r += p.wr(j, i) * u;
        s += p.ws(j, i) * u;
        c += p.wh(j, i) * u;
      }
      for (int k = 0; k < nh; ++k) {
        r += p.ur(j, k) * h[k];
        s += p.us(j, k) * h[k];
        g += p.uh(j, k) * h[k];
      }
      r = act(1, r);
      s = act(1, s);
      c = act(fh, c + r * g);
      hn[j] = (1.0 - s) * h[j] + (minus ? -s * c : s * c);
    }
    h = hn;
    if (mean_readout)
      for (int j = 0; j < nh; ++j) acc += p.wo(j, 0) * h[j] / steps;
  }
  if (!mean_readout)
    for (int j = 0; j < nh; ++j) acc += p.wo(j, 0) * h[j];
  return act(fo, acc + p.bo);
}

// filt(j * n_in + i, g); w_out(p * nh + g)
inline double cnn(const std::vector<double>& x, int steps, int n_in, int nw, const M& filt, const M& bf, const M& wo,
                  double bo, int fh, int fo) {
  const int nh = filt.c;
  double z = bo;
  for (int p = 0; p + nw <= steps; ++p)
    for (int g = 0; g < nh; ++g) {
      double a = bf(g, 0);
      for (int j = 0; j < nw; ++j)
        for (int i = 0; i < n_in; ++i) a += x[(p + j) * n_in + i] * filt(j * n_in + i, g);
      z += act(fh, a) * wo(p * nh + g, 0);
    }
  return act(fo, z);
}

}  // namespace oracle
