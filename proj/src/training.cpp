// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/training.hpp"

#include <cmath>

#include "vovit/avt.hpp"
#include "vovit/criteria.hpp"
#include "vovit/error.hpp"

namespace vovit::training {

namespace {

struct Toy {
  avt::AvtConfig cfg;
  avt::AvtWeights w;
  spectral::ComplexMask gt;
  criteria::PenaltyGrid g;
  nn::Mat compress_x;  // fused features times the compression weight, bias excluded
  nn::Mat pe;
};

Toy build(std::uint64_t seed, const MicroOverfitConfig& toy) {
  Toy t;
  t.cfg = avt::AvtConfig::desk();
  t.cfg.freq_bins = toy.freq_bins;
  const auto f = static_cast<std::size_t>(toy.freq_bins), frames = static_cast<std::size_t>(toy.frames);
  t.w = avt::bind(weights::init_weights(avt::param_specs(t.cfg, avt::FusionVariant::kAV), seed), t.cfg,
                  avt::FusionVariant::kAV);

  spectral::ComplexSpectrogram s, x;
  s.data = ComplexGrid(f, frames);
  x.data = ComplexGrid(f, frames);
  s.resolution = x.resolution = spectral::FreqResolution::kHalf;
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    s.data.re[i] = weights::counter_uniform(seed, "toy.voice.re", i);
    s.data.im[i] = weights::counter_uniform(seed, "toy.voice.im", i);
    x.data.re[i] = s.data.re[i] + 0.7 * weights::counter_uniform(seed, "toy.noise.re", i);
    x.data.im[i] = s.data.im[i] + 0.7 * weights::counter_uniform(seed, "toy.noise.im", i);
  }
  t.gt = spectral::bound_mask(spectral::ideal_complex_mask(s, x));
  t.g = criteria::penalty_weights(x);

  motion::MotionFeatures motion{nn::Mat(Eigen::Index(frames), t.cfg.motion_channels)};
  for (Eigen::Index i = 0; i < motion.data.size(); ++i)
    motion.data.data()[i] = weights::counter_uniform(seed, "toy.motion", static_cast<std::uint64_t>(i));

  const auto fused = avt::fuse(avt::spec2vec_forward(x, t.w.spec2vec, t.cfg.spec2vec), motion);
  t.compress_x = fused.data * t.w.compress.weight.transpose();
  t.pe = avt::positional_encoding(frames, t.cfg.d_model);
  return t;
}

nn::Mat hidden(const Toy& t) {
  nn::Mat pre = t.compress_x;
  pre.rowwise() += t.w.compress.bias.transpose();
  const nn::Mat memory = avt::run_encoder(nn::gelu(pre) + t.pe, t.w, t.cfg);
  return avt::run_decoder(memory, memory, t.w, false);
}

double loss(const Toy& t, const nn::Mat& h) {
  return criteria::stage1_loss(t.gt, avt::mask_head(h, t.w.head, t.cfg.freq_bins), t.g);
}

// Unnormalized loss carried by head output column o (real part of bin o
// for o < F, imaginary part of bin o - F otherwise).
double column_loss(const Toy& t, const nn::Vec& logits, int o) {
  const int f = o % t.cfg.freq_bins;
  const auto& target = o < t.cfg.freq_bins ? t.gt.data.re : t.gt.data.im;
  const std::size_t frames = t.gt.data.cols;
  double sum = 0.0;
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t i = std::size_t(f) * frames + k;
    const double d = t.g.weights.values[i] * (target[i] - std::tanh(logits(Eigen::Index(k))));
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::vector<double> micro_overfit(std::uint64_t seed, int steps, double lr, const MicroOverfitConfig& toy) {
  if (steps < 0) throw Error(errc::kInvalidArgument, "micro_overfit: steps must be nonnegative");
  if (toy.freq_bins < 1 || toy.frames < 1) throw Error(errc::kInvalidArgument, "micro_overfit: empty toy example");
  Toy t = build(seed, toy);
  const double h = kFiniteDiffStep;
  const double norm = 2.0 * t.gt.data.size();
  auto& head = t.w.head;
  auto& bias = t.w.compress.bias;

  std::vector<double> trace;
  nn::Mat hid = hidden(t);
  trace.push_back(loss(t, hid));
  for (int step = 0; step < steps; ++step) {
    nn::Mat gw = nn::Mat::Zero(head.weight.rows(), head.weight.cols());
    nn::Vec gb = nn::Vec::Zero(head.bias.size());
    nn::Vec gc = nn::Vec::Zero(bias.size());

    // Head parameters only move their own output column.
    const nn::Mat logits = head.forward(hid);
    for (Eigen::Index o = 0; o < head.weight.rows(); ++o) {
      const nn::Vec col = logits.col(o);
      for (Eigen::Index i = 0; i < head.weight.cols(); ++i) {
        const double up = column_loss(t, col + h * hid.col(i), int(o));
        const double down = column_loss(t, col - h * hid.col(i), int(o));
        gw(o, i) = (up - down) / (2.0 * h * norm);
      }
      const nn::Vec ones = nn::Vec::Ones(col.size());
      gb(o) = (column_loss(t, col + h * ones, int(o)) - column_loss(t, col - h * ones, int(o))) / (2.0 * h * norm);
    }
    for (Eigen::Index j = 0; j < bias.size(); ++j) {
      const double keep = bias(j);
      bias(j) = keep + h;
      const double up = loss(t, hidden(t));
      bias(j) = keep - h;
      const double down = loss(t, hidden(t));
      bias(j) = keep;
      gc(j) = (up - down) / (2.0 * h);
    }

    head.weight -= lr * gw;
    head.bias -= lr * gb;
    bias -= lr * gc;
    hid = hidden(t);
    trace.push_back(loss(t, hid));
  }
  return trace;
}

}  // namespace vovit::training
