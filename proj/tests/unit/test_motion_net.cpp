// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "vovit/error.hpp"
#include "vovit/motion_net.hpp"
#include "vovit/synth.hpp"

using namespace vovit;
using namespace vovit::motion;

namespace {

nn::Mat random_mat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  nn::Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = oracle::uniform(rng);
  return m;
}

BlockWeights random_block(std::mt19937_64& rng, int c_in, int c_out, int k) {
  BlockWeights w;
  w.spatial = random_mat(rng, c_in, c_out);
  for (int j = 0; j < k; ++j) w.temporal.push_back(random_mat(rng, c_out, c_out));
  w.bias = random_mat(rng, c_out, 1).col(0);
  w.residual = c_in == c_out;
  return w;
}

// Direct per-element evaluation of the block definition.
NodeSequence naive_block(const NodeSequence& x, const Eigen::MatrixXd& a, const BlockWeights& w) {
  const int n = x.nodes, c_in = int(w.spatial.rows()), c_out = int(w.spatial.cols()), k = int(w.temporal.size());
  const long frames = long(x.frames);
  std::vector<double> s(std::size_t(frames) * n * c_out, 0.0);
  for (long t = 0; t < frames; ++t)
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < c_out; ++co) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
          for (int ci = 0; ci < c_in; ++ci) acc += a(i, j) * x.data(t * n + j, ci) * w.spatial(ci, co);
        s[(std::size_t(t) * n + i) * c_out + co] = acc;
      }
  NodeSequence y{x.frames, n, nn::Mat(x.data.rows(), c_out)};
  for (long t = 0; t < frames; ++t)
    for (int i = 0; i < n; ++i)
      for (int co = 0; co < c_out; ++co) {
        double acc = w.bias(co);
        for (int j = 0; j < k; ++j) {
          const long src = t + j - k / 2;
          if (src < 0 || src >= frames) continue;
          for (int c = 0; c < c_out; ++c) acc += w.temporal[j](co, c) * s[(std::size_t(src) * n + i) * c_out + c];
        }
        if (w.residual) acc += x.data(t * n + i, co);
        y.data(t * n + i, co) = std::max(acc, 0.0);
      }
  return y;
}

Eigen::MatrixXd random_graph(std::mt19937_64& rng, int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng() % 3 == 0) a(i, j) = a(j, i) = 1.0;
  return landmarks::normalize_adjacency(a);
}

landmarks::LandmarkSequence registered_face(std::size_t frames) {
  return landmarks::normalize_landmarks(landmarks::register_sequence(synth::talking_face(frames, 25.0, 4)).sequence);
}

MotionWeights random_weights(std::mt19937_64& rng, const StGcnConfig& cfg) {
  MotionWeights w;
  for (auto [ci, co] : cfg.blocks) w.blocks.push_back(random_block(rng, ci, co, cfg.temporal_kernel));
  return w;
}

}  // namespace

TEST_CASE("st_gcn_block matches the elementwise definition") {
  std::mt19937_64 rng(31);
  for (auto [ci, co, k] : {std::tuple{3, 5, 3}, std::tuple{4, 4, 5}, std::tuple{2, 3, 1}}) {
    const auto a = random_graph(rng, 6);
    NodeSequence x{7, 6, random_mat(rng, 42, ci)};
    const auto w = random_block(rng, ci, co, k);
    const auto y = st_gcn_block(x, a, w), ref = naive_block(x, a, w);
    CHECK((y.data - ref.data).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("st_gcn_block trivial cases") {
  std::mt19937_64 rng(32);
  NodeSequence x{4, 5, random_mat(rng, 20, 3)};
  BlockWeights zero{nn::Mat::Zero(3, 2), {nn::Mat::Zero(2, 2)}, nn::Vec::Zero(2), false};
  CHECK(st_gcn_block(x, Eigen::MatrixXd::Identity(5, 5), zero).data.norm() == 0.0);
  BlockWeights ident{nn::Mat::Identity(3, 3), {nn::Mat::Zero(3, 3), nn::Mat::Identity(3, 3), nn::Mat::Zero(3, 3)},
                     nn::Vec::Zero(3), false};
  const auto y = st_gcn_block(x, landmarks::normalize_adjacency(Eigen::MatrixXd::Zero(5, 5)), ident);
  CHECK((y.data - nn::relu(x.data)).norm() < 1e-15);
}

TEST_CASE("st_gcn_block permutation equivariance and pooled invariance") {
  std::mt19937_64 rng(33);
  const int n = 68, frames = 6;
  const auto a = landmarks::build_face_graph().normalized;
  const auto w1 = random_block(rng, 2, 8, 3), w2 = random_block(rng, 8, 8, 3);
  NodeSequence x{frames, n, random_mat(rng, frames * n, 2)};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) p(i, perm[i]) = 1.0;
    NodeSequence xp = x;
    for (int t = 0; t < frames; ++t)
      for (int i = 0; i < n; ++i) xp.data.row(t * n + i) = x.data.row(t * n + perm[i]);
    const Eigen::MatrixXd ap = p * a * p.transpose();
    const auto y = st_gcn_block(st_gcn_block(x, a, w1), a, w2);
    const auto yp = st_gcn_block(st_gcn_block(xp, ap, w1), ap, w2);
    double err = 0.0, pooled = 0.0;
    for (int t = 0; t < frames; ++t) {
      for (int i = 0; i < n; ++i) err = std::max(err, (yp.data.row(t * n + i) - y.data.row(t * n + perm[i])).cwiseAbs().maxCoeff());
      pooled = std::max(pooled, (yp.data.middleRows(t * n, n).colwise().mean() - y.data.middleRows(t * n, n).colwise().mean())
                                    .cwiseAbs()
                                    .maxCoeff());
    }
    CHECK(err < 1e-6);
    CHECK(pooled < 1e-6);
  }
}

TEST_CASE("motion_forward keeps one row per frame") {
  std::mt19937_64 rng(34);
  const auto cfg = StGcnConfig::desk();
  const auto w = random_weights(rng, cfg);
  const auto graph = landmarks::build_face_graph();
  for (std::size_t t : {1u, 50u, 64u, 100u, 128u, 640u}) {
    const auto m = motion_forward(registered_face(t), graph, w, cfg);
    CHECK(m.frames() == t);
    CHECK(m.data.cols() == 64);
    CHECK(m.data.allFinite());
  }
}

TEST_CASE("motion_forward: zero input and zero bias give zero features") {
  std::mt19937_64 rng(35);
  const auto cfg = StGcnConfig::desk();
  auto w = random_weights(rng, cfg);
  for (auto& b : w.blocks) b.bias.setZero();
  landmarks::LandmarkSequence zero(10, 2, 25.0);
  CHECK(motion_forward(zero, landmarks::build_face_graph(), w, cfg).data.norm() == 0.0);
}

TEST_CASE("motion_forward rejects mismatched inputs") {
  std::mt19937_64 rng(36);
  const auto cfg = StGcnConfig::desk();
  const auto w = random_weights(rng, cfg);
  landmarks::LandmarkSequence raw(5, 3, 25.0);
  CHECK_THROWS_AS(motion_forward(raw, landmarks::build_face_graph(), w, cfg), Error);
  StGcnConfig broken = cfg;
  broken.blocks[1].first = 7;
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("upsample_motion") {
  MotionFeatures m{nn::Mat(2, 1)};
  m.data << 0.0, 1.0;
  const auto up = upsample_motion(m, 4);
  REQUIRE(up.frames() == 4);
  CHECK(up.data(0, 0) == 0.0);
  CHECK(up.data(1, 0) == 0.5);
  CHECK(up.data(2, 0) == 1.0);
  CHECK(up.data(3, 0) == 1.0);
  MotionFeatures c{nn::Mat::Constant(50, 3, 2.5)};
  const auto c2 = upsample_motion(c, 128);
  CHECK(c2.frames() == 128);
  CHECK((c2.data.array() == 2.5).all());
  CHECK(upsample_motion(c, 50).data == c.data);
  CHECK_THROWS_AS(upsample_motion(c, 0), Error);
}

TEST_CASE("desk preset parameter budget") {
  CHECK(weights::parameter_count(param_specs(StGcnConfig::desk())) < 1500000);
}
