// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "vovit/avt.hpp"
#include "vovit/config.hpp"
#include "vovit/error.hpp"

using namespace vovit;
using namespace vovit::avt;

namespace {

constexpr FusionVariant kAll[] = {FusionVariant::kAV, FusionVariant::kVA, FusionVariant::kAVA};

spectral::ComplexSpectrogram half_spec(std::mt19937_64& rng, std::size_t bins, std::size_t frames) {
  spectral::ComplexSpectrogram s;
  s.data = oracle::random_grid(rng, bins, frames, 2.0);
  s.resolution = spectral::FreqResolution::kHalf;
  return s;
}

motion::MotionFeatures random_motion(std::mt19937_64& rng, std::size_t frames, int channels) {
  motion::MotionFeatures m{nn::Mat(Eigen::Index(frames), channels)};
  for (Eigen::Index i = 0; i < m.data.size(); ++i) m.data.data()[i] = oracle::uniform(rng);
  return m;
}

AvtWeights desk_weights(FusionVariant v, std::uint64_t seed = 1, const AvtConfig& cfg = AvtConfig::desk()) {
  return bind(weights::init_weights(param_specs(cfg, v), seed), cfg, v);
}

Spec2vecWeights zero_bias(Spec2vecWeights w) {
  for (auto& c : w.convs) c.bias.setZero();
  return w;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (auto v : kAll) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("VA"), Error);
}

TEST_CASE("config validation") {
  AvtConfig c = AvtConfig::desk();
  CHECK_NOTHROW(c.validate());
  c.heads = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  c = AvtConfig::desk();
  c.spectral_groups = 7;
  CHECK_THROWS_AS(c.validate(), Error);
  c = AvtConfig::desk();
  c.blocks = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(Spec2vecConfig::desk().layers.size() == 6);
  CHECK(Spec2vecConfig::full().layers.size() == 15);
  CHECK(Spec2vecConfig::desk().out_channels() == 32);
}

TEST_CASE("spec2vec preserves the frame count") {
  std::mt19937_64 rng(41);
  const auto cfg = AvtConfig::desk();
  const auto w = desk_weights(FusionVariant::kAV);
  for (std::size_t t : {1u, 50u, 64u, 100u, 128u, 640u}) {
    const auto e = spec2vec_forward(half_spec(rng, 256, t), w.spec2vec, cfg.spec2vec);
    CHECK(e.frames() == t);
    CHECK(e.data.cols() == cfg.audio_width());
  }
}

TEST_CASE("spec2vec: zero input with zero biases gives zero embeddings") {
  const auto cfg = AvtConfig::desk();
  const auto w = zero_bias(desk_weights(FusionVariant::kAV).spec2vec);
  spectral::ComplexSpectrogram z;
  z.data = ComplexGrid(256, 20);
  CHECK(spec2vec_forward(z, w, cfg.spec2vec).data.norm() == 0.0);
}

TEST_CASE("spec2vec is shift-equivariant away from the padding") {
  std::mt19937_64 rng(42);
  AvtConfig cfg = AvtConfig::desk();
  cfg.freq_bins = 16;
  const auto w = desk_weights(FusionVariant::kAV, 3, cfg).spec2vec;
  const int reach = cfg.spec2vec.time_reach();
  CHECK(reach == 126);
  const std::size_t frames = 300, k = 5;
  const auto longer = half_spec(rng, 16, frames + k);
  spectral::ComplexSpectrogram a, b;
  a.data = ComplexGrid(16, frames);
  b.data = ComplexGrid(16, frames);
  for (std::size_t f = 0; f < 16; ++f)
    for (std::size_t t = 0; t < frames; ++t) {
      a.data.set(f, t, longer.data.at(f, t));
      b.data.set(f, t, longer.data.at(f, t + k));
    }
  const auto ea = spec2vec_forward(a, w, cfg.spec2vec), eb = spec2vec_forward(b, w, cfg.spec2vec);
  double worst = 0.0;
  int checked = 0;
  for (std::size_t t = std::size_t(reach) + k; t + std::size_t(reach) < frames; ++t, ++checked)
    worst = std::max(worst, (ea.data.row(Eigen::Index(t)) - eb.data.row(Eigen::Index(t - k))).cwiseAbs().maxCoeff());
  CHECK(checked > 30);
  CHECK(worst < 1e-9);
}

TEST_CASE("spec2vec folds frequency into channels as c * F + f") {
  // A single 1x1 identity-like layer exposes the fold layout.
  Spec2vecConfig cfg;
  cfg.layers = {{2, 1, 1, 1, 1}};
  nn::Conv2d conv;
  conv.in_channels = conv.out_channels = 2;
  conv.weight = nn::Mat::Identity(2, 2);
  conv.bias = nn::Vec::Zero(2);
  spectral::ComplexSpectrogram x;
  x.data = ComplexGrid(3, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    x.data.re[i] = double(i + 1);
    x.data.im[i] = double(i + 11);
  }
  const auto e = spec2vec_forward(x, {{conv}}, cfg);
  REQUIRE(e.data.cols() == 6);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t f = 0; f < 3; ++f) {
      CHECK(e.data(Eigen::Index(t), Eigen::Index(f)) == x.data.re[f * 2 + t]);
      CHECK(e.data(Eigen::Index(t), Eigen::Index(3 + f)) == x.data.im[f * 2 + t]);
    }
}

TEST_CASE("fuse concatenates audio then motion") {
  std::mt19937_64 rng(43);
  FeatureSequence a{nn::Mat(5, 4)};
  for (Eigen::Index i = 0; i < a.data.size(); ++i) a.data.data()[i] = oracle::uniform(rng);
  const auto m = random_motion(rng, 5, 2);
  const auto z = fuse(a, m);
  REQUIRE(z.data.cols() == 6);
  for (Eigen::Index t = 0; t < 5; ++t)
    for (Eigen::Index c = 0; c < 6; ++c) CHECK(z.data(t, c) == (c < 4 ? a.data(t, c) : m.data(t, c - 4)));
  const auto z0 = fuse(a, motion::MotionFeatures{nn::Mat::Zero(5, 2)});
  CHECK(z0.data.leftCols(4) == a.data);
  CHECK_THROWS_AS(fuse(a, random_motion(rng, 6, 2)), Error);
}

TEST_CASE("compression layer is affine then GELU") {
  std::mt19937_64 rng(44);
  nn::Linear lin{nn::Mat(3, 7), nn::Vec(3)};
  for (Eigen::Index i = 0; i < lin.weight.size(); ++i) lin.weight.data()[i] = oracle::uniform(rng);
  for (Eigen::Index i = 0; i < 3; ++i) lin.bias(i) = oracle::uniform(rng);
  FeatureSequence z{nn::Mat(4, 7)};
  for (Eigen::Index i = 0; i < z.data.size(); ++i) z.data.data()[i] = 2.0 * oracle::uniform(rng);
  const auto y = compression_layer(z, lin);
  CHECK(y.data.cols() == 3);
  for (Eigen::Index t = 0; t < 4; ++t)
    for (Eigen::Index o = 0; o < 3; ++o) {
      double acc = lin.bias(o);
      for (Eigen::Index i = 0; i < 7; ++i) acc += lin.weight(o, i) * z.data(t, i);
      CHECK(y.data(t, o) == doctest::Approx(oracle::gelu(acc)).epsilon(1e-6));
    }
  lin.bias.setZero();
  CHECK(compression_layer(FeatureSequence{nn::Mat::Zero(2, 7)}, lin).data.norm() == 0.0);
}

TEST_CASE("positional encoding") {
  const auto pe = positional_encoding(3, 4);
  CHECK(pe(0, 0) == 0.0);
  CHECK(pe(0, 1) == 1.0);
  CHECK(pe(2, 0) == doctest::Approx(std::sin(2.0)));
  CHECK(pe(2, 3) == doctest::Approx(std::cos(2.0 / 100.0)));
}

TEST_CASE("encoder block: distributions, single frame and time permutation") {
  std::mt19937_64 rng(45);
  const auto cfg = AvtConfig::desk();
  const auto w = desk_weights(FusionVariant::kAV, 5);
  nn::Mat z(9, 64);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = oracle::uniform(rng);
  nn::AttentionProbe probe;
  const nn::Mat y = st_encoder_block(z, w.encoder[0], cfg.spectral_groups, &probe);
  CHECK(probe.rows > 0);
  CHECK(probe.min_weight >= 0.0);
  CHECK(probe.max_row_sum_error < 1e-6);

  // Permuting time permutes the output when no positional encoding is added.
  std::vector<Eigen::Index> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  nn::Mat zp(9, 64);
  for (Eigen::Index t = 0; t < 9; ++t) zp.row(t) = z.row(perm[std::size_t(t)]);
  const nn::Mat yp = st_encoder_block(zp, w.encoder[0], cfg.spectral_groups);
  for (Eigen::Index t = 0; t < 9; ++t) CHECK((yp.row(t) - y.row(perm[std::size_t(t)])).cwiseAbs().maxCoeff() < 1e-9);

  // T = 1: the temporal branch reduces to o(v(norm1(z))).
  const nn::Mat one = z.topRows(1);
  const auto& b = w.encoder[0];
  const nn::Mat u = b.norm1.forward(one);
  const nn::Mat tokens = Eigen::Map<const nn::Mat>(u.data(), 8, 8);
  const nn::Mat mixed = b.spectral.forward_grouped(tokens, 8);
  nn::Mat want = one + b.temporal.o.forward(b.temporal.v.forward(u)) + Eigen::Map<const nn::Mat>(mixed.data(), 1, 64);
  want += b.ffn.forward(b.norm2.forward(want));
  CHECK((st_encoder_block(one, b, cfg.spectral_groups) - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("avt output shape and range for every variant") {
  std::mt19937_64 rng(46);
  const auto cfg = AvtConfig::desk();
  for (auto v : kAll) {
    const auto w = desk_weights(v, 7);
    for (std::size_t t : {1u, 5u, 17u}) {
      nn::AttentionProbe probe;
      const auto out = avt_forward(half_spec(rng, 256, t), random_motion(rng, t, 64), v, w, cfg,
                                   AvtMode::kInference, nullptr, &probe);
      CHECK(out.mask.bounded);
      CHECK(out.mask.data.rows == 256);
      CHECK(out.mask.data.cols == t);
      for (std::size_t i = 0; i < out.mask.data.size(); ++i) {
        CHECK(std::abs(out.mask.data.re[i]) < 1.0);
        CHECK(std::abs(out.mask.data.im[i]) < 1.0);
      }
      CHECK(probe.min_weight >= 0.0);
      CHECK(probe.max_row_sum_error < 1e-6);
    }
  }
}

TEST_CASE("decoder pass counts: 1 for AV and V_A, T for AV_A inference") {
  std::mt19937_64 rng(47);
  const auto cfg = AvtConfig::desk();
  for (std::size_t t : {8u, 16u, 32u}) {
    const auto x = half_spec(rng, 256, t);
    const auto m = random_motion(rng, t, 64);
    for (auto v : kAll) {
      const auto out = avt_forward(x, m, v, desk_weights(v), cfg);
      CHECK(out.decoder_passes == (v == FusionVariant::kAVA ? int(t) : 1));
    }
  }
}

TEST_CASE("AV_A teacher forcing is causal") {
  std::mt19937_64 rng(48);
  const auto cfg = AvtConfig::desk();
  const auto w = desk_weights(FusionVariant::kAVA, 9);
  const std::size_t frames = 12;
  const auto x = half_spec(rng, 256, frames);
  const auto m = random_motion(rng, frames, 64);
  const auto audio = spec2vec_forward(x, w.spec2vec, cfg.spec2vec);
  const auto teacher = spec2vec_forward(half_spec(rng, 256, frames), w.spec2vec, cfg.spec2vec);
  const auto base = avt_from_features(audio, m, FusionVariant::kAVA, w, cfg, AvtMode::kTraining, &teacher);
  CHECK(base.decoder_passes == 1);
  for (std::size_t t : {0u, 4u, 10u}) {
    FeatureSequence changed = teacher;
    for (std::size_t r = t; r < frames; ++r) changed.data.row(Eigen::Index(r)).setConstant(5.0);
    const auto out = avt_from_features(audio, m, FusionVariant::kAVA, w, cfg, AvtMode::kTraining, &changed);
    const auto rows = Eigen::Index(t + 1);
    CHECK((out.hidden.topRows(rows) - base.hidden.topRows(rows)).cwiseAbs().maxCoeff() < 1e-6);
    if (t + 1 < frames) CHECK((out.hidden.bottomRows(Eigen::Index(frames) - rows) - base.hidden.bottomRows(Eigen::Index(frames) - rows)).norm() > 0.0);
  }
}

TEST_CASE("teacher stream contract") {
  std::mt19937_64 rng(50);
  const auto cfg = AvtConfig::desk();
  const auto x = half_spec(rng, 256, 4);
  const auto m = random_motion(rng, 4, 64);
  const auto w = desk_weights(FusionVariant::kAVA);
  try {
    avt_forward(x, m, FusionVariant::kAVA, w, cfg, AvtMode::kTraining);
    FAIL("expected missing teacher");
  } catch (const Error& e) {
    CHECK(e.code() == errc::kMissingTeacher);
  }
  const FeatureSequence teacher = spec2vec_forward(x, w.spec2vec, cfg.spec2vec);
  CHECK_THROWS_AS(avt_forward(x, m, FusionVariant::kAVA, w, cfg, AvtMode::kInference, &teacher), Error);
  const auto wav = desk_weights(FusionVariant::kAV);
  CHECK_THROWS_AS(avt_forward(x, m, FusionVariant::kAV, wav, cfg, AvtMode::kTraining, &teacher), Error);
  CHECK_THROWS_AS(avt_forward(x, random_motion(rng, 5, 64), FusionVariant::kAV, wav, cfg), Error);
}

TEST_CASE("avt is deterministic") {
  std::mt19937_64 rng(51);
  const auto cfg = AvtConfig::desk();
  const auto x = half_spec(rng, 256, 10);
  const auto m = random_motion(rng, 10, 64);
  for (auto v : kAll) {
    const auto a = avt_forward(x, m, v, desk_weights(v), cfg), b = avt_forward(x, m, v, desk_weights(v), cfg);
    CHECK(a.mask.data.re == b.mask.data.re);
    CHECK(a.mask.data.im == b.mask.data.im);
  }
}

TEST_CASE("parameter budgets") {
  const auto desk = weights::parameter_count(param_specs(AvtConfig::desk(), FusionVariant::kAV));
  MESSAGE("desk separator parameters: " << desk);
  CHECK(desk < 1000000);
  const auto cfg = PipelineConfig::from_preset("speech-10");
  const auto full = weights::parameter_count(param_specs(cfg.avt, cfg.variant));
  MESSAGE("speech-10 separator parameters: " << full);
  CHECK(full >= 10000000);
  CHECK(full < 100000000);
}

TEST_CASE("bind reports the offending tensor") {
  const auto cfg = AvtConfig::desk();
  auto archive = weights::init_weights(param_specs(cfg, FusionVariant::kAV), 1);
  CHECK_THROWS_AS(bind(archive, cfg, FusionVariant::kVA), Error);
  weights::WeightArchive broken;
  for (const auto& [name, t] : archive.tensors())
    if (name != "avt.head.bias") broken.put(name, t);
  try {
    bind(broken, cfg, FusionVariant::kAV);
    FAIL("expected bind error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("avt.head.bias") != std::string::npos);
  }
}
