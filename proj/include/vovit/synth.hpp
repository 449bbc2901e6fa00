// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>

#include "vovit/landmarks.hpp"
#include "vovit/spectral.hpp"

// Deterministic synthetic material for demos and tests.
namespace vovit::synth {

// Linear chirp from f0 to f1 Hz with unit peak.
spectral::Waveform chirp(double seconds, double f0, double f1, int sample_rate_hz = spectral::kSampleRate,
                         double phase = 0.0);

// Sum of `harmonics` partials of f0 with 1/k amplitudes and a slow vibrato,
// scaled to unit peak.
spectral::Waveform harmonic_tone(double seconds, double f0, int harmonics = 6,
                                 int sample_rate_hz = spectral::kSampleRate, double vibrato_hz = 5.0);

// Head-pose-perturbed copies of the canonical face, with the mouth opening
// driven by a pseudo-random articulation track.
landmarks::LandmarkSequence talking_face(std::size_t frames, double fps, std::uint64_t seed);

}  // namespace vovit::synth
