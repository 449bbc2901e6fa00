// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include "vovit/error.hpp"

namespace vovit::spectral {

namespace {

// FFTW plans are created once per size under a lock; executing a plan on
// caller-owned buffers via the new-array interface is thread-safe.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

const FftPlans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<std::complex<double>> spec(n / 2 + 1);
  auto* cspec = reinterpret_cast<fftw_complex*>(spec.data());
  FftPlans p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_1d(n, real.data(), cspec, flags);
  p.inverse = fftw_plan_dft_c2r_1d(n, cspec, real.data(), flags | FFTW_DESTROY_INPUT);
  return cache.emplace(n, p).first->second;
}

// numpy-style "reflect" padding index, folded repeatedly for short inputs.
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<std::size_t>(i < n ? i : period - i);
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(errc::kInvalidArgument, std::string(what) + " contains non-finite values");
  }
}

}  // namespace

std::size_t StftConfig::frames_for(std::size_t length_samples) const {
  const auto hop = static_cast<std::size_t>(hop_length);
  if (centered) return (length_samples + hop - 1) / hop;
  const auto win = static_cast<std::size_t>(win_length);
  if (length_samples <= win) return 1;
  return 1 + (length_samples - win + hop - 1) / hop;
}

void StftConfig::validate() const {
  if (sample_rate_hz <= 0) throw Error(errc::kInvalidArgument, "sample rate must be positive");
  if (hop_length <= 0 || win_length <= hop_length)
    throw Error(errc::kInvalidArgument, "stft config requires win_length > hop_length > 0");
  if (win_length % 2 != 0) throw Error(errc::kInvalidArgument, "win_length must be even");
}

std::vector<double> make_window(const StftConfig& cfg) {
  const int n = cfg.win_length;
  std::vector<double> w(n);
  // Periodic Hann.
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  if (w.samples.empty()) throw Error(errc::kEmptyInput, "stft: empty waveform");
  if (w.sample_rate_hz != cfg.sample_rate_hz)
    throw Error(errc::kSampleRateMismatch, "stft: waveform at " + std::to_string(w.sample_rate_hz) +
                                               " Hz, config expects " + std::to_string(cfg.sample_rate_hz));
  check_finite(w.samples, "stft input");

  const int n = cfg.win_length;
  const std::size_t bins = cfg.bins();
  const long len = static_cast<long>(w.samples.size());
  const long half = cfg.centered ? n / 2 : 0;
  const std::size_t frames = cfg.frames_for(w.samples.size());
  const auto window = make_window(cfg);
  const auto& plans = plans_for(n);

  ComplexSpectrogram out;
  out.config = cfg;
  out.resolution = FreqResolution::kFull;
  out.data = ComplexGrid(bins, frames);

  std::vector<double> frame(n);
  std::vector<std::complex<double>> spec(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * cfg.hop_length - half;
    for (int k = 0; k < n; ++k) {
      const long idx = start + k;
      double v = 0.0;
      if (idx >= 0 && idx < len)
        v = w.samples[idx];
      else if (cfg.centered)
        v = w.samples[reflect_index(idx, len)];
      frame[k] = v * window[k];
    }
    fftw_execute_dft_r2c(plans.forward, frame.data(), reinterpret_cast<fftw_complex*>(spec.data()));
    for (std::size_t f = 0; f < bins; ++f) {
      out.data.re[f * frames + t] = spec[f].real();
      out.data.im[f * frames + t] = spec[f].imag();
    }
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& s, const StftConfig& cfg, std::size_t length_samples) {
  cfg.validate();
  const std::size_t bins = cfg.bins();
  if (s.resolution != FreqResolution::kFull || s.bins() != bins)
    throw Error(errc::kShapeMismatch, "istft: spectrogram has " + std::to_string(s.bins()) +
                                          " bins, config expects " + std::to_string(bins));
  const std::size_t frames = s.frames();
  if (frames == 0 || cfg.frames_for(length_samples) != frames)
    throw Error(errc::kShapeMismatch, "istft: " + std::to_string(frames) + " frames inconsistent with length " +
                                          std::to_string(length_samples));

  const int n = cfg.win_length;
  const long half = cfg.centered ? n / 2 : 0;
  const auto window = make_window(cfg);
  const auto& plans = plans_for(n);
  const std::size_t padded = (frames - 1) * cfg.hop_length + n;

  std::vector<double> acc(padded, 0.0), norm(padded, 0.0);
  std::vector<std::complex<double>> spec(bins);
  std::vector<double> frame(n);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < bins; ++f) spec[f] = s.data.at(f, t);
    fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(spec.data()), frame.data());
    const std::size_t start = t * cfg.hop_length;
    for (int k = 0; k < n; ++k) {
      acc[start + k] += frame[k] / n * window[k];
      norm[start + k] += window[k] * window[k];
    }
  }

  Waveform out;
  out.sample_rate_hz = cfg.sample_rate_hz;
  out.samples.assign(length_samples, 0.0);
  for (std::size_t i = 0; i < length_samples; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(half);
    if (j < padded && norm[j] > 1e-11) out.samples[i] = acc[j] / norm[j];
  }
  return out;
}

ComplexSpectrogram apply_complex_mask(const ComplexSpectrogram& x, const ComplexMask& m) {
  if (!x.data.same_shape(m.data)) throw Error(errc::kShapeMismatch, "apply_complex_mask: shape mismatch");
  ComplexSpectrogram out = x;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const double a = x.data.re[i], b = x.data.im[i];
    const double c = m.data.re[i], d = m.data.im[i];
    out.data.re[i] = a * c - b * d;
    out.data.im[i] = a * d + b * c;
  }
  return out;
}

ComplexMask ideal_complex_mask(const ComplexSpectrogram& s, const ComplexSpectrogram& x, double eps) {
  if (!s.data.same_shape(x.data)) throw Error(errc::kShapeMismatch, "ideal_complex_mask: shape mismatch");
  if (!(eps > 0.0)) throw Error(errc::kInvalidArgument, "ideal_complex_mask: eps must be positive");
  double peak = 0.0;
  for (std::size_t i = 0; i < x.data.size(); ++i)
    peak = std::max(peak, std::hypot(x.data.re[i], x.data.im[i]));
  const double guard = eps * peak;

  ComplexMask m;
  m.bounded = false;
  m.data = ComplexGrid(x.data.rows, x.data.cols);
  if (peak == 0.0) return m;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    const std::complex<double> xv(x.data.re[i], x.data.im[i]);
    if (std::abs(xv) < guard) continue;
    const std::complex<double> q = std::complex<double>(s.data.re[i], s.data.im[i]) / xv;
    m.data.re[i] = q.real();
    m.data.im[i] = q.imag();
  }
  return m;
}

ComplexMask bound_mask(const ComplexMask& m) {
  ComplexMask out = m;
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    out.data.re[i] = std::tanh(m.data.re[i]);
    out.data.im[i] = std::tanh(m.data.im[i]);
  }
  out.bounded = true;
  return out;
}

ComplexSpectrogram downsample_freq(const ComplexSpectrogram& x, int factor) {
  if (factor != 2) throw Error(errc::kInvalidArgument, "downsample_freq: only factor 2 is supported");
  if (x.data.rows % 2 != 0)
    throw Error(errc::kShapeMismatch, "downsample_freq: odd bin count " + std::to_string(x.data.rows));
  const std::size_t rows = x.data.rows / 2, cols = x.data.cols;
  ComplexSpectrogram out;
  out.config = x.config;
  out.resolution = FreqResolution::kHalf;
  out.data = ComplexGrid(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t a = (2 * r) * cols + c, b = (2 * r + 1) * cols + c;
      out.data.re[r * cols + c] = 0.5 * (x.data.re[a] + x.data.re[b]);
      out.data.im[r * cols + c] = 0.5 * (x.data.im[a] + x.data.im[b]);
    }
  }
  return out;
}

ComplexMask upsample_mask_freq(const ComplexMask& m, int factor) {
  if (factor != 2) throw Error(errc::kInvalidArgument, "upsample_mask_freq: only factor 2 is supported");
  ComplexMask out;
  out.bounded = m.bounded;
  const std::size_t cols = m.data.cols;
  out.data = ComplexGrid(m.data.rows * 2, cols);
  for (std::size_t r = 0; r < out.data.rows; ++r) {
    std::copy_n(m.data.re.begin() + (r / 2) * cols, cols, out.data.re.begin() + r * cols);
    std::copy_n(m.data.im.begin() + (r / 2) * cols, cols, out.data.im.begin() + r * cols);
  }
  return out;
}

RealGrid magnitude(const ComplexSpectrogram& x) {
  RealGrid out(x.data.rows, x.data.cols);
  for (std::size_t i = 0; i < x.data.size(); ++i) out.values[i] = std::hypot(x.data.re[i], x.data.im[i]);
  return out;
}

namespace {

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

constexpr int kTapsPerSide = 8;  // 16 taps per branch at the lower rate
constexpr double kKaiserBeta = 8.0;

}  // namespace

Waveform resample(const Waveform& w, int target_hz) {
  if (w.sample_rate_hz <= 0 || target_hz <= 0)
    throw Error(errc::kInvalidArgument, "resample: sample rates must be positive");
  if (w.sample_rate_hz == target_hz || w.samples.empty()) {
    Waveform out = w;
    out.sample_rate_hz = target_hz;
    return out;
  }
  const long g = std::gcd(w.sample_rate_hz, target_hz);
  const long up = target_hz / g;
  const long down = w.sample_rate_hz / g;
  const double cutoff = std::min(1.0, static_cast<double>(up) / down);
  const int half_width = static_cast<int>(std::ceil(kTapsPerSide / cutoff));
  const int taps = 2 * half_width;

  // Branch p holds the kernel for fractional input position p / up; each
  // branch is normalized to unit DC gain.
  std::vector<double> table(static_cast<std::size_t>(up) * taps);
  const double i0_beta = bessel_i0(kKaiserBeta);
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    for (int j = 0; j < taps; ++j) {
      const double d = (j - half_width + 1) - frac;
      const double x = cutoff * d;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double r = d / (half_width + 1);
      const double win = std::abs(r) >= 1.0 ? 0.0 : bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      const double h = cutoff * sinc * win;
      table[p * taps + j] = h;
      sum += h;
    }
    for (int j = 0; j < taps; ++j) table[p * taps + j] /= sum;
  }

  const long len = static_cast<long>(w.samples.size());
  const long n_out = std::max<long>(1, (len * up + down / 2) / down);
  Waveform out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(n_out);
  for (long n = 0; n < n_out; ++n) {
    const long pos = n * down;
    const long i0 = pos / up;
    const long phase = pos % up;
    const double* h = &table[phase * taps];
    double acc = 0.0;
    for (int j = 0; j < taps; ++j) {
      const long idx = std::clamp<long>(i0 + j - half_width + 1, 0, len - 1);
      acc += h[j] * w.samples[idx];
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace vovit::spectral
