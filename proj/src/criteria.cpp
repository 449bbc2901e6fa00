// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/criteria.hpp"

#include <algorithm>
#include <cmath>

#include "vovit/error.hpp"

namespace vovit::criteria {

namespace {

void check_stage1(const spectral::ComplexMask& gt, const spectral::ComplexMask& pred, const PenaltyGrid& g) {
  if (!gt.bounded || !pred.bounded) throw Error(errc::kUnboundedMask, "stage1 loss expects bounded masks");
  if (!gt.data.same_shape(pred.data) || gt.data.rows != g.weights.rows || gt.data.cols != g.weights.cols)
    throw Error(errc::kShapeMismatch, "stage1 loss: shape mismatch");
}

void check_stage2(const BinaryMask& gt, const BinaryMask& pred, const PenaltyGrid& g) {
  if (!gt.data.same_shape(pred.data) || !gt.data.same_shape(g.weights))
    throw Error(errc::kShapeMismatch, "stage2 loss: shape mismatch");
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

PenaltyGrid penalty_weights(const ComplexGrid& x) {
  PenaltyGrid g{RealGrid(x.rows, x.cols)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::log1p(std::hypot(x.re[i], x.im[i]));
    g.weights.values[i] = std::max(std::min(v, kPenaltyMax), kPenaltyMin);
  }
  return g;
}

PenaltyGrid penalty_weights(const spectral::ComplexSpectrogram& x) { return penalty_weights(x.data); }

double stage1_loss(const spectral::ComplexMask& gt, const spectral::ComplexMask& pred, const PenaltyGrid& g) {
  check_stage1(gt, pred, g);
  const std::size_t n = gt.data.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = g.weights.values[i];
    const double dr = w * (gt.data.re[i] - pred.data.re[i]);
    const double di = w * (gt.data.im[i] - pred.data.im[i]);
    acc += dr * dr + di * di;
  }
  return acc / (2.0 * static_cast<double>(n));
}

ComplexGrid stage1_loss_grad(const spectral::ComplexMask& gt, const spectral::ComplexMask& pred,
                             const PenaltyGrid& g) {
  check_stage1(gt, pred, g);
  const std::size_t n = gt.data.size();
  ComplexGrid grad(gt.data.rows, gt.data.cols);
  const double scale = n == 0 ? 0.0 : -2.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = g.weights.values[i] * g.weights.values[i];
    grad.re[i] = scale * w2 * (gt.data.re[i] - pred.data.re[i]);
    grad.im[i] = scale * w2 * (gt.data.im[i] - pred.data.im[i]);
  }
  return grad;
}

BinaryMask ideal_binary_mask(const ComplexGrid& s, const ComplexGrid& s_hat) {
  if (!s.same_shape(s_hat)) throw Error(errc::kShapeMismatch, "ideal_binary_mask: shape mismatch");
  BinaryMask m{RealGrid(s.rows, s.cols)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double target = std::hypot(s.re[i], s.im[i]);
    const double residual = std::hypot(s_hat.re[i] - s.re[i], s_hat.im[i] - s.im[i]);
    m.data.values[i] = target >= residual ? 1.0 : 0.0;
  }
  return m;
}

BinaryMask ideal_binary_mask(const spectral::ComplexSpectrogram& s, const spectral::ComplexSpectrogram& s_hat) {
  return ideal_binary_mask(s.data, s_hat.data);
}

double stage2_loss(const BinaryMask& gt, const BinaryMask& pred, const PenaltyGrid& g) {
  check_stage2(gt, pred, g);
  const std::size_t n = gt.data.size();
  if (n == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = clamp_prob(pred.data.values[i]);
    const double m = gt.data.values[i];
    acc += g.weights.values[i] * (-m * std::log(p) - (1.0 - m) * std::log(1.0 - p));
  }
  return acc / static_cast<double>(n);
}

RealGrid stage2_loss_grad(const BinaryMask& gt, const BinaryMask& pred, const PenaltyGrid& g) {
  check_stage2(gt, pred, g);
  const std::size_t n = gt.data.size();
  RealGrid grad(gt.data.rows, gt.data.cols);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = clamp_prob(pred.data.values[i]);
    const double m = gt.data.values[i];
    grad.values[i] = g.weights.values[i] / static_cast<double>(n) * (p - m) / (p * (1.0 - p));
  }
  return grad;
}

}  // namespace vovit::criteria
