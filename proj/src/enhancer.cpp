// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/enhancer.hpp"

#include <cmath>
#include <string>

#include "vovit/error.hpp"

namespace vovit::enhancer {

namespace {

constexpr int kKernel = 4;

// Reflect index without repeating the edge sample; folds when the pad
// exceeds the signal length.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

int round_up(int n, int m) { return (n + m - 1) / m * m; }

void configure_down(nn::Conv2d& c) {
  c.stride_h = c.stride_w = 2;
  c.pad_h = c.pad_w = 1;
}

void configure_up(nn::ConvTranspose2d& c) {
  c.kernel = kKernel;
  c.stride = 2;
  c.pad = 1;
}

}  // namespace

int UNetConfig::channels(int level) const {
  int c = base_channels;
  for (int i = 0; i < level; ++i) c *= growth;
  return c;
}

void UNetConfig::validate() const {
  if (depth < 1 || depth > 10) throw Error(errc::kInvalidArgument, "enhancer: depth must be in [1, 10]");
  if (base_channels < 1 || growth < 1) throw Error(errc::kInvalidArgument, "enhancer: channels must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error(errc::kInvalidArgument, "enhancer: threshold must lie in (0, 1)");
}

criteria::BinaryMask unet_forward(const RealGrid& mag, const UNetWeights& w, const UNetConfig& cfg) {
  cfg.validate();
  if (w.down.size() != static_cast<std::size_t>(cfg.depth) || w.up.size() != static_cast<std::size_t>(cfg.depth))
    throw Error(errc::kShapeMismatch, "enhancer: weights do not match depth " + std::to_string(cfg.depth));
  if (mag.rows == 0 || mag.cols == 0) throw Error(errc::kEmptyInput, "enhancer: empty magnitude grid");

  const int rows = static_cast<int>(mag.rows), cols = static_cast<int>(mag.cols);
  const int ph = round_up(rows, cfg.multiple()), pw = round_up(cols, cfg.multiple());
  nn::FeatureMap x(1, ph, pw);
  for (int y = 0; y < ph; ++y)
    for (int t = 0; t < pw; ++t) x.at(0, y, t) = mag(std::size_t(reflect(y, rows)), std::size_t(reflect(t, cols)));

  std::vector<nn::FeatureMap> skips;
  for (auto conv : w.down) {
    configure_down(conv);
    x = conv.forward(x);
    nn::apply_leaky_relu(x, kLeakySlope);
    skips.push_back(x);
  }
  for (int i = cfg.depth - 1; i >= 0; --i) {
    nn::ConvTranspose2d up = w.up[std::size_t(i)];
    configure_up(up);
    nn::FeatureMap y = up.forward(i == cfg.depth - 1 ? skips.back() : x);
    nn::apply_leaky_relu(y, kLeakySlope);
    x = i > 0 ? nn::concat_channels(y, skips[std::size_t(i - 1)]) : std::move(y);
  }
  x = w.head.forward(x);

  criteria::BinaryMask out{RealGrid(mag.rows, mag.cols)};
  for (int y = 0; y < rows; ++y)
    for (int t = 0; t < cols; ++t) out.data(std::size_t(y), std::size_t(t)) = 1.0 / (1.0 + std::exp(-x.at(0, y, t)));
  return out;
}

spectral::ComplexSpectrogram apply_binary(const spectral::ComplexSpectrogram& x, const criteria::BinaryMask& m,
                                          double threshold) {
  if (m.data.rows != x.data.rows || m.data.cols != x.data.cols)
    throw Error(errc::kShapeMismatch, "enhancer: mask shape does not match spectrogram");
  spectral::ComplexSpectrogram out = x;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    if (!(m.data.values[i] >= threshold)) {
      out.data.re[i] = 0.0;
      out.data.im[i] = 0.0;
    }
  }
  return out;
}

EnhancerOutput enhance_with(const spectral::ComplexSpectrogram& s_hat, int r, const MaskFn& mask_fn,
                            double threshold) {
  if (r < 0) throw Error(errc::kInvalidArgument, "enhancer: r must be nonnegative");
  EnhancerOutput out;
  out.enhanced = s_hat;
  for (int pass = 0; pass < r; ++pass) {
    criteria::BinaryMask m = mask_fn(out.enhanced);
    out.enhanced = apply_binary(out.enhanced, m, threshold);
    out.soft_mask = std::move(m);
    ++out.passes;
  }
  return out;
}

EnhancerOutput enhance(const spectral::ComplexSpectrogram& s_hat, const UNetWeights& w, const UNetConfig& cfg,
                       int r) {
  return enhance_with(
      s_hat, r,
      [&](const spectral::ComplexSpectrogram& cur) { return unet_forward(spectral::magnitude(cur), w, cfg); },
      cfg.threshold);
}

std::vector<weights::ParamSpec> param_specs(const UNetConfig& cfg) {
  cfg.validate();
  std::vector<weights::ParamSpec> specs;
  std::size_t in = 1;
  for (int i = 0; i < cfg.depth; ++i) {
    const auto c = static_cast<std::size_t>(cfg.channels(i));
    nn::conv_specs(specs, "enh.down" + std::to_string(i), in, c, kKernel, kKernel);
    in = c;
  }
  for (int i = 0; i < cfg.depth; ++i) {
    const auto c_in = static_cast<std::size_t>(i == cfg.depth - 1 ? cfg.channels(i) : 2 * cfg.channels(i));
    const auto c_out = static_cast<std::size_t>(cfg.channels(i > 0 ? i - 1 : 0));
    nn::conv_transpose_specs(specs, "enh.up" + std::to_string(i), c_in, c_out, kKernel);
  }
  nn::conv_specs(specs, "enh.head", static_cast<std::size_t>(cfg.base_channels), 1, 1, 1);
  return specs;
}

UNetWeights bind(const weights::WeightArchive& a, const UNetConfig& cfg) {
  cfg.validate();
  UNetWeights w;
  std::size_t in = 1;
  for (int i = 0; i < cfg.depth; ++i) {
    const auto c = static_cast<std::size_t>(cfg.channels(i));
    w.down.push_back(nn::bind_conv(a, "enh.down" + std::to_string(i), in, c, kKernel, kKernel));
    configure_down(w.down.back());
    in = c;
  }
  for (int i = 0; i < cfg.depth; ++i) {
    const auto c_in = static_cast<std::size_t>(i == cfg.depth - 1 ? cfg.channels(i) : 2 * cfg.channels(i));
    const auto c_out = static_cast<std::size_t>(cfg.channels(i > 0 ? i - 1 : 0));
    w.up.push_back(nn::bind_conv_transpose(a, "enh.up" + std::to_string(i), c_in, c_out, kKernel));
    configure_up(w.up.back());
  }
  w.head = nn::bind_conv(a, "enh.head", static_cast<std::size_t>(cfg.base_channels), 1, 1, 1);
  return w;
}

}  // namespace vovit::enhancer
