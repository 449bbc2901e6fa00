// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vovit/avt.hpp"
#include "vovit/enhancer.hpp"
#include "vovit/motion_net.hpp"
#include "vovit/spectral.hpp"
#include "vovit/weights.hpp"

namespace vovit {

struct PipelineConfig {
  std::string preset = "desk";
  spectral::StftConfig stft;
  avt::AvtConfig avt = avt::AvtConfig::desk();
  avt::FusionVariant variant = avt::FusionVariant::kAV;
  motion::StGcnConfig motion = motion::StGcnConfig::desk();
  enhancer::UNetConfig enhancer = enhancer::UNetConfig::desk();
  int r = 1;

  // "desk", "acappella-4", "speech-10" or "speech-18".
  static PipelineConfig from_preset(std::string_view name);
  static const std::vector<std::string>& preset_names();

  // Fields present in the JSON override the named (or desk) preset.
  static PipelineConfig from_json(std::string_view text);
  std::string to_json() const;

  void validate() const;
};

struct ModelWeights {
  motion::MotionWeights motion;
  avt::AvtWeights avt;
  enhancer::UNetWeights enhancer;
};

std::vector<weights::ParamSpec> parameter_specs(const PipelineConfig& cfg);
weights::WeightArchive init_weights(const PipelineConfig& cfg, std::uint64_t seed);
ModelWeights bind_weights(const weights::WeightArchive& archive, const PipelineConfig& cfg);

}  // namespace vovit
