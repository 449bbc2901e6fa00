// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vovit::training {

// Step size for micro_overfit, tuned once against the fixed toy example.
inline constexpr double kMicroOverfitLr = 0.7;
inline constexpr double kFiniteDiffStep = 1e-5;

struct MicroOverfitConfig {
  int freq_bins = 8;
  int frames = 16;
};

// Central-difference gradient descent on the separator's mask head and the
// compression bias against the stage-1 loss of one synthetic example.
// Returns steps + 1 losses: before the first update and after each update.
std::vector<double> micro_overfit(std::uint64_t seed, int steps, double lr = kMicroOverfitLr,
                                  const MicroOverfitConfig& toy = {});

}  // namespace vovit::training
