// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Independent reference implementations used as test oracles. These are
// deliberately naive (direct sums, explicit loops) and share no code with
// the library beyond plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "vovit/grid.hpp"
#include "vovit/spectral.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

// Portable uniform draw in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> x(n);
  for (double& v : x) v = scale * uniform(rng);
  return x;
}

inline vovit::ComplexGrid random_grid(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  vovit::ComplexGrid g(rows, cols);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.re[i] = scale * uniform(rng);
    g.im[i] = scale * uniform(rng);
  }
  return g;
}

// numpy.pad(mode="reflect") applied repeatedly until the target is reached.
inline std::vector<double> reflect_pad(const std::vector<double>& x, std::size_t pad) {
  std::vector<double> cur = x;
  std::size_t left = pad, right = pad;
  while (left > 0 || right > 0) {
    const std::size_t n = cur.size();
    const std::size_t l = std::min(left, n - 1), r = std::min(right, n - 1);
    std::vector<double> next;
    for (std::size_t i = l; i >= 1; --i) next.push_back(cur[i]);
    next.insert(next.end(), cur.begin(), cur.end());
    for (std::size_t i = 1; i <= r; ++i) next.push_back(cur[n - 1 - i]);
    cur = std::move(next);
    left -= l;
    right -= r;
    if (n == 1) break;
  }
  return cur;
}

// Direct-sum DFT of centered, periodic-Hann-windowed frames.
inline vovit::ComplexGrid brute_stft(const std::vector<double>& x, int n_fft, int hop) {
  const std::vector<double> padded = reflect_pad(x, static_cast<std::size_t>(n_fft / 2));
  const std::size_t frames = (x.size() + hop - 1) / hop;
  const std::size_t bins = n_fft / 2 + 1;
  vovit::ComplexGrid out(bins, frames);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < bins; ++f) {
      std::complex<double> acc = 0.0;
      for (int k = 0; k < n_fft; ++k) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * k / n_fft);
        const std::size_t idx = t * hop + k;
        const double v = idx < padded.size() ? padded[idx] : 0.0;
        acc += w * v * std::polar(1.0, -2.0 * kPi * double(f) * k / n_fft);
      }
      out.set(f, t, acc);
    }
  }
  return out;
}

inline double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

}  // namespace oracle
