// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "vovit/landmarks.hpp"
#include "vovit/nn.hpp"
#include "vovit/weights.hpp"

// Spatio-temporal graph convolution over registered face landmarks. Every
// block keeps the frame count, so the output has one feature row per video
// frame.
namespace vovit::motion {

struct StGcnConfig {
  std::vector<std::pair<int, int>> blocks;  // (in_channels, out_channels)
  int temporal_kernel = 3;
  int node_count = landmarks::kNodes;

  static StGcnConfig desk();
  int input_channels() const { return blocks.empty() ? 0 : blocks.front().first; }
  int output_channels() const { return blocks.empty() ? 0 : blocks.back().second; }
  void validate() const;
};

// frames x nodes x channels, stored as (frames * nodes) x channels rows.
struct NodeSequence {
  std::size_t frames = 0;
  int nodes = 0;
  nn::Mat data;
};

struct BlockWeights {
  nn::Mat spatial;                // C_in x C_out
  std::vector<nn::Mat> temporal;  // kernel taps, each C_out(out) x C_out(in)
  nn::Vec bias;                   // C_out
  bool residual = false;
};

struct MotionWeights {
  std::vector<BlockWeights> blocks;
};

struct MotionFeatures {
  nn::Mat data;  // T_v x C_v
  std::size_t frames() const { return static_cast<std::size_t>(data.rows()); }
};

// ReLU(temporal(A_hat X W_spatial) + bias + residual).
NodeSequence st_gcn_block(const NodeSequence& x, const Eigen::MatrixXd& a_hat, const BlockWeights& w);

NodeSequence to_node_sequence(const landmarks::LandmarkSequence& seq);

MotionFeatures motion_forward(const landmarks::LandmarkSequence& seq, const landmarks::FaceGraph& graph,
                              const MotionWeights& weights, const StGcnConfig& cfg);

// Linear interpolation along time onto target_t rows (time-aligned, not
// corner-aligned: row j samples source position j * T_v / target_t).
MotionFeatures upsample_motion(const MotionFeatures& m, std::size_t target_t);

std::vector<weights::ParamSpec> param_specs(const StGcnConfig& cfg);
MotionWeights bind(const weights::WeightArchive& archive, const StGcnConfig& cfg);

}  // namespace vovit::motion
