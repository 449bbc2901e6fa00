// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vovit/criteria.hpp"
#include "vovit/nn.hpp"
#include "vovit/spectral.hpp"
#include "vovit/weights.hpp"

// Stage-2 lead voice enhancer: a U-Net over the full-resolution magnitude
// predicting a per-bin keep probability, binarized and applied r times.
namespace vovit::enhancer {

inline constexpr double kLeakySlope = 0.2;

struct UNetConfig {
  int depth = 4;
  int base_channels = 16;
  int growth = 2;
  double threshold = 0.5;

  static UNetConfig desk() { return {}; }
  int channels(int level) const;  // channels produced by down{level}
  int multiple() const { return 1 << depth; }
  void validate() const;
};

// down{i}: 4x4 stride-2 conv + leaky ReLU.
// up{i}:   4x4 stride-2 transposed conv + leaky ReLU; its output is
//          concatenated with the skip from down{i-1} (none for i = 0).
// head:    1x1 conv to one channel + sigmoid.
struct UNetWeights {
  std::vector<nn::Conv2d> down;
  std::vector<nn::ConvTranspose2d> up;
  nn::Conv2d head;
};

struct EnhancerOutput {
  std::optional<criteria::BinaryMask> soft_mask;  // last pass; empty when r = 0
  spectral::ComplexSpectrogram enhanced;
  int passes = 0;
};

// mag: F x T nonnegative. Returns soft probabilities of the same shape.
criteria::BinaryMask unet_forward(const RealGrid& mag, const UNetWeights& w, const UNetConfig& cfg);

// Supplies the per-pass mask from the current estimate. Values are
// binarized at the configured threshold before use.
using MaskFn = std::function<criteria::BinaryMask(const spectral::ComplexSpectrogram& current)>;

EnhancerOutput enhance_with(const spectral::ComplexSpectrogram& s_hat, int r, const MaskFn& mask_fn,
                            double threshold = 0.5);
EnhancerOutput enhance(const spectral::ComplexSpectrogram& s_hat, const UNetWeights& w, const UNetConfig& cfg,
                       int r);

// Multiplies every bin by the {0,1} decision mask >= threshold.
spectral::ComplexSpectrogram apply_binary(const spectral::ComplexSpectrogram& x, const criteria::BinaryMask& m,
                                          double threshold = 0.5);

std::vector<weights::ParamSpec> param_specs(const UNetConfig& cfg);
UNetWeights bind(const weights::WeightArchive& archive, const UNetConfig& cfg);

}  // namespace vovit::enhancer
