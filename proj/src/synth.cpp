// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vovit/error.hpp"
#include "vovit/weights.hpp"

namespace vovit::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t sample_count(double seconds, int rate) {
  if (!(seconds > 0.0) || rate <= 0) throw Error(errc::kInvalidArgument, "synth: duration and rate must be positive");
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

void unit_peak(spectral::Waveform& w) {
  double p = 0.0;
  for (double v : w.samples) p = std::max(p, std::abs(v));
  if (p > 0.0)
    for (double& v : w.samples) v /= p;
}

}  // namespace

spectral::Waveform chirp(double seconds, double f0, double f1, int rate, double phase) {
  spectral::Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(sample_count(seconds, rate));
  const double k = (f1 - f0) / seconds;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    w.samples[i] = std::sin(phase + kTwoPi * (f0 * t + 0.5 * k * t * t));
  }
  return w;
}

spectral::Waveform harmonic_tone(double seconds, double f0, int harmonics, int rate, double vibrato_hz) {
  spectral::Waveform w;
  w.sample_rate_hz = rate;
  w.samples.assign(sample_count(seconds, rate), 0.0);
  constexpr double kDepth = 0.01;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    // Integrated phase of f0 * (1 + depth * sin(2 pi v t)).
    const double base = kTwoPi * f0 * t - f0 * kDepth / vibrato_hz * (std::cos(kTwoPi * vibrato_hz * t) - 1.0);
    double v = 0.0;
    for (int h = 1; h <= harmonics; ++h) v += std::sin(h * base) / h;
    w.samples[i] = v;
  }
  unit_peak(w);
  return w;
}

landmarks::LandmarkSequence talking_face(std::size_t frames, double fps, std::uint64_t seed) {
  if (frames == 0) throw Error(errc::kEmptyInput, "synth: no frames");
  const auto& tmpl = landmarks::canonical_template();
  landmarks::LandmarkSequence seq(frames, 3, fps);
  auto u = [&](const char* name, std::size_t i) { return weights::counter_uniform(seed, name, i); };
  for (std::size_t t = 0; t < frames; ++t) {
    const double time = static_cast<double>(t) / fps;
    const double open = 0.5 + 0.5 * std::sin(kTwoPi * 3.0 * time + 2.0 * u("synth.phase", t / 8));
    const Eigen::Matrix3d r = (Eigen::AngleAxisd(0.2 * std::sin(0.7 * time), Eigen::Vector3d::UnitY()) *
                               Eigen::AngleAxisd(0.1 * std::sin(1.3 * time), Eigen::Vector3d::UnitX()) *
                               Eigen::AngleAxisd(0.05 * u("synth.roll", t), Eigen::Vector3d::UnitZ()))
                                  .toRotationMatrix();
    const Eigen::Vector3d shift(100.0 + 5.0 * u("synth.x", t), 120.0 + 5.0 * u("synth.y", t), 0.0);
    const double scale = 80.0 * (1.0 + 0.02 * u("synth.scale", t));
    for (int n = 0; n < landmarks::kNodes; ++n) {
      Eigen::Vector3d p = tmpl.row(n).transpose();
      // Lower lip (outer 55..59, inner 65..67) drops with the opening.
      if ((n >= 55 && n <= 59) || n >= 65) p.y() -= 0.15 * open;
      const Eigen::Vector3d q = scale * r * p + shift;
      for (int d = 0; d < 3; ++d) seq.at(t, n, d) = q(d);
    }
  }
  return seq;
}

}  // namespace vovit::synth
