// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/motion_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vovit/error.hpp"

namespace vovit::motion {

StGcnConfig StGcnConfig::desk() {
  StGcnConfig cfg;
  cfg.blocks = {{2, 16}, {16, 32}, {32, 64}, {64, 64}};
  cfg.temporal_kernel = 3;
  return cfg;
}

void StGcnConfig::validate() const {
  if (blocks.empty()) throw Error(errc::kInvalidArgument, "st-gcn: no blocks");
  if (temporal_kernel < 1 || temporal_kernel % 2 == 0)
    throw Error(errc::kInvalidArgument, "st-gcn: temporal kernel must be odd and positive");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].first <= 0 || blocks[i].second <= 0) throw Error(errc::kInvalidArgument, "st-gcn: empty channels");
    if (i > 0 && blocks[i].first != blocks[i - 1].second)
      throw Error(errc::kInvalidArgument, "st-gcn: channel chain broken at block " + std::to_string(i));
  }
}

NodeSequence st_gcn_block(const NodeSequence& x, const Eigen::MatrixXd& a_hat, const BlockWeights& w) {
  const Eigen::Index nodes = x.nodes;
  const Eigen::Index c_in = w.spatial.rows(), c_out = w.spatial.cols();
  if (x.data.cols() != c_in || a_hat.rows() != nodes || a_hat.cols() != nodes ||
      x.data.rows() != Eigen::Index(x.frames) * nodes)
    throw Error(errc::kShapeMismatch, "st_gcn_block: input does not match weights or graph");
  if (w.residual && c_in != c_out) throw Error(errc::kShapeMismatch, "st_gcn_block: residual needs C_in == C_out");

  // Spatial step, frame by frame.
  const nn::Mat projected = x.data * w.spatial;
  nn::Mat spatial(projected.rows(), c_out);
  for (std::size_t t = 0; t < x.frames; ++t)
    spatial.middleRows(Eigen::Index(t) * nodes, nodes).noalias() =
        a_hat * projected.middleRows(Eigen::Index(t) * nodes, nodes);

  // Temporal step: same-padded 1-D convolution along frames, shared across nodes.
  const long frames = static_cast<long>(x.frames);
  const long half = static_cast<long>(w.temporal.size()) / 2;
  nn::Mat y = nn::Mat::Zero(spatial.rows(), c_out);
  for (long j = 0; j < static_cast<long>(w.temporal.size()); ++j) {
    const long shift = j - half;
    const long lo = std::max(0L, -shift), hi = std::min(frames, frames - shift);
    if (hi <= lo) continue;
    y.middleRows(lo * nodes, (hi - lo) * nodes).noalias() +=
        spatial.middleRows((lo + shift) * nodes, (hi - lo) * nodes) * w.temporal[j].transpose();
  }
  y.rowwise() += w.bias.transpose();
  if (w.residual) y += x.data;

  NodeSequence out{x.frames, x.nodes, nn::relu(y)};
  return out;
}

NodeSequence to_node_sequence(const landmarks::LandmarkSequence& seq) {
  NodeSequence x{seq.frames, landmarks::kNodes, nn::Mat(Eigen::Index(seq.frames) * landmarks::kNodes, seq.dims)};
  for (std::size_t t = 0; t < seq.frames; ++t)
    for (int i = 0; i < landmarks::kNodes; ++i)
      for (int d = 0; d < seq.dims; ++d) x.data(Eigen::Index(t) * landmarks::kNodes + i, d) = seq.at(t, i, d);
  return x;
}

MotionFeatures motion_forward(const landmarks::LandmarkSequence& seq, const landmarks::FaceGraph& graph,
                              const MotionWeights& weights, const StGcnConfig& cfg) {
  cfg.validate();
  if (seq.dims != cfg.input_channels())
    throw Error(errc::kShapeMismatch, "motion_forward: landmarks have " + std::to_string(seq.dims) +
                                          " coordinates, network expects " + std::to_string(cfg.input_channels()));
  if (weights.blocks.size() != cfg.blocks.size())
    throw Error(errc::kShapeMismatch, "motion_forward: weights hold " + std::to_string(weights.blocks.size()) +
                                          " blocks, config has " + std::to_string(cfg.blocks.size()));
  NodeSequence x = to_node_sequence(seq);
  for (const auto& block : weights.blocks) x = st_gcn_block(x, graph.normalized, block);

  MotionFeatures out{nn::Mat(Eigen::Index(x.frames), x.data.cols())};
  for (std::size_t t = 0; t < x.frames; ++t)
    out.data.row(Eigen::Index(t)) = x.data.middleRows(Eigen::Index(t) * x.nodes, x.nodes).colwise().mean();
  return out;
}

MotionFeatures upsample_motion(const MotionFeatures& m, std::size_t target_t) {
  if (target_t < 1) throw Error(errc::kInvalidArgument, "upsample_motion: target length must be >= 1");
  const Eigen::Index src = m.data.rows();
  if (src == 0) throw Error(errc::kEmptyInput, "upsample_motion: no feature rows");
  if (static_cast<std::size_t>(src) == target_t) return m;
  MotionFeatures out{nn::Mat(Eigen::Index(target_t), m.data.cols())};
  const double ratio = static_cast<double>(src) / static_cast<double>(target_t);
  for (std::size_t j = 0; j < target_t; ++j) {
    const double pos = std::min(static_cast<double>(j) * ratio, static_cast<double>(src - 1));
    const auto i0 = static_cast<Eigen::Index>(std::floor(pos));
    const Eigen::Index i1 = std::min(i0 + 1, src - 1);
    const double frac = pos - static_cast<double>(i0);
    out.data.row(Eigen::Index(j)) = (1.0 - frac) * m.data.row(i0) + frac * m.data.row(i1);
  }
  return out;
}

std::vector<weights::ParamSpec> param_specs(const StGcnConfig& cfg) {
  cfg.validate();
  std::vector<weights::ParamSpec> specs;
  const std::size_t k = static_cast<std::size_t>(cfg.temporal_kernel);
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto [c_in, c_out] = cfg.blocks[i];
    const std::string prefix = "motion.block" + std::to_string(i);
    const auto ci = static_cast<std::size_t>(c_in), co = static_cast<std::size_t>(c_out);
    specs.push_back({prefix + ".spatial", {ci, co}, ci});
    specs.push_back({prefix + ".temporal", {co, co, k}, co * k});
    specs.push_back({prefix + ".bias", {co}, co * k});
  }
  return specs;
}

MotionWeights bind(const weights::WeightArchive& archive, const StGcnConfig& cfg) {
  cfg.validate();
  MotionWeights w;
  const std::size_t k = static_cast<std::size_t>(cfg.temporal_kernel);
  for (std::size_t i = 0; i < cfg.blocks.size(); ++i) {
    const auto ci = static_cast<std::size_t>(cfg.blocks[i].first);
    const auto co = static_cast<std::size_t>(cfg.blocks[i].second);
    const std::string prefix = "motion.block" + std::to_string(i);
    BlockWeights b;
    b.spatial = nn::to_mat(archive.require(prefix + ".spatial", {ci, co}), Eigen::Index(ci), Eigen::Index(co));
    const auto& temporal = archive.require(prefix + ".temporal", {co, co, k});
    for (std::size_t j = 0; j < k; ++j) {
      const auto n = static_cast<Eigen::Index>(co);
      nn::Mat tap(n, n);
      for (std::size_t o = 0; o < co; ++o)
        for (std::size_t in = 0; in < co; ++in)
          tap(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(in)) = temporal.values[(o * co + in) * k + j];
      b.temporal.push_back(std::move(tap));
    }
    b.bias = nn::to_vec(archive.require(prefix + ".bias", {co}));
    b.residual = ci == co;
    w.blocks.push_back(std::move(b));
  }
  return w;
}

}  // namespace vovit::motion
