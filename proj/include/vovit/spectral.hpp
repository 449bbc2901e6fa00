// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vovit/grid.hpp"

namespace vovit::spectral {

inline constexpr int kSampleRate = 16384;

struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

enum class WindowKind { kHann };

struct StftConfig {
  int sample_rate_hz = kSampleRate;
  int win_length = 1022;
  int hop_length = 256;
  WindowKind window = WindowKind::kHann;
  bool centered = true;

  int bins() const { return win_length / 2 + 1; }
  // Frames produced for a signal of the given length.
  std::size_t frames_for(std::size_t length_samples) const;
  void validate() const;
};

enum class FreqResolution { kFull, kHalf };

struct ComplexSpectrogram {
  ComplexGrid data;  // F x T
  StftConfig config;
  FreqResolution resolution = FreqResolution::kFull;

  std::size_t bins() const { return data.rows; }
  std::size_t frames() const { return data.cols; }
};

struct ComplexMask {
  ComplexGrid data;
  bool bounded = false;
};

std::vector<double> make_window(const StftConfig& cfg);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg = {});
Waveform istft(const ComplexSpectrogram& s, const StftConfig& cfg, std::size_t length_samples);

ComplexSpectrogram apply_complex_mask(const ComplexSpectrogram& x, const ComplexMask& m);
// M = S / X where |X| >= eps * max|X|, 0 elsewhere.
ComplexMask ideal_complex_mask(const ComplexSpectrogram& s, const ComplexSpectrogram& x,
                               double eps = 1e-8);
ComplexMask bound_mask(const ComplexMask& m);

ComplexSpectrogram downsample_freq(const ComplexSpectrogram& x, int factor = 2);
ComplexMask upsample_mask_freq(const ComplexMask& m, int factor = 2);

RealGrid magnitude(const ComplexSpectrogram& x);

// Kaiser-windowed sinc polyphase resampler.
Waveform resample(const Waveform& w, int target_hz = kSampleRate);

}  // namespace vovit::spectral
