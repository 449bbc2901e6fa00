// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vovit/config.hpp"
#include "vovit/landmarks.hpp"
#include "vovit/spectral.hpp"
#include "vovit/weights.hpp"

namespace vovit {

// Peak-normalizes each voice, averages them, optionally adds a background
// and renormalizes to peak <= 1. The shorter voice is zero-padded.
spectral::Waveform make_mixture(const spectral::Waveform& s1, const spectral::Waveform& s2,
                                const spectral::Waveform* background = nullptr);

struct Diagnostics {
  std::vector<std::pair<std::string, double>> stage_ms;
  std::size_t frames = 0;
  std::size_t trimmed_samples = 0;  // samples dropped to match the landmark duration
  double mask_saturation = 0.0;     // fraction of stage-1 mask components with |m| > 0.99
  int decoder_passes = 0;
  int enhancer_passes = 0;
  bool oracle_bypass = false;
  std::uint64_t output_checksum = 0;
  std::uint64_t stage1_checksum = 0;
  std::vector<std::string> warnings;

  // Timings excluded when `with_timings` is false, leaving only
  // deterministic fields.
  std::string to_json(bool with_timings = true) const;
};

struct SeparationResult {
  spectral::Waveform estimate;        // same length and rate as the mixture
  spectral::Waveform stage1_estimate; // stage-1 reconstruction, same length and rate
  spectral::ComplexSpectrogram stage1;
  Diagnostics report;
};

struct SeparationRequest {
  spectral::Waveform mixture;
  landmarks::LandmarkSequence landmarks;
  const weights::WeightArchive* weights = nullptr;
  PipelineConfig config;
};

// Binds the weights once; run() may be called concurrently.
class Separator {
 public:
  Separator(PipelineConfig cfg, const weights::WeightArchive& archive);

  SeparationResult run(const spectral::Waveform& mixture, const landmarks::LandmarkSequence& lm) const;
  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
  ModelWeights weights_;
  landmarks::FaceGraph graph_;
};

SeparationResult separate(const SeparationRequest& req);

// Ground-truth masks replace both networks: the exact complex ratio for
// stage 1 and the binary dominance mask for each stage-2 pass.
SeparationResult oracle_separate(const spectral::Waveform& mixture, const spectral::Waveform& target,
                                 const PipelineConfig& cfg);

std::uint64_t checksum(const std::vector<double>& values);
std::uint64_t checksum(const ComplexGrid& grid);

}  // namespace vovit
