// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include "vovit/grid.hpp"
#include "vovit/spectral.hpp"

namespace vovit::criteria {

inline constexpr double kPenaltyMin = 1e-3;
inline constexpr double kPenaltyMax = 10.0;
inline constexpr double kProbClamp = 1e-7;

// Per-bin loss weight, log(1 + |X|) clamped to [1e-3, 10].
struct PenaltyGrid {
  RealGrid weights;
};

// Ground-truth masks hold exact 0/1 values; predictions hold soft values in [0, 1].
struct BinaryMask {
  RealGrid data;
};

PenaltyGrid penalty_weights(const spectral::ComplexSpectrogram& x);
PenaltyGrid penalty_weights(const ComplexGrid& x);

// Mean over the 2*F*T real/imaginary components of (G * (gt - pred))^2.
double stage1_loss(const spectral::ComplexMask& gt, const spectral::ComplexMask& pred, const PenaltyGrid& g);
ComplexGrid stage1_loss_grad(const spectral::ComplexMask& gt, const spectral::ComplexMask& pred,
                             const PenaltyGrid& g);

// 1 where |S| >= |S_hat - S|, else 0.
BinaryMask ideal_binary_mask(const spectral::ComplexSpectrogram& s, const spectral::ComplexSpectrogram& s_hat);
BinaryMask ideal_binary_mask(const ComplexGrid& s, const ComplexGrid& s_hat);

// Weighted binary cross entropy averaged over F*T bins.
double stage2_loss(const BinaryMask& gt, const BinaryMask& pred, const PenaltyGrid& g);
RealGrid stage2_loss_grad(const BinaryMask& gt, const BinaryMask& pred, const PenaltyGrid& g);

}  // namespace vovit::criteria
