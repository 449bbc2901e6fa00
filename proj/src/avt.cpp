// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/avt.hpp"

#include <cmath>
#include <string>

#include "vovit/error.hpp"

namespace vovit::avt {

namespace {

std::string idx(const char* stem, std::size_t i) { return stem + std::to_string(i); }

void check_rows(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(errc::kLengthMismatch, std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b) +
                                           " frames");
}

}  // namespace

std::string_view variant_name(FusionVariant v) {
  switch (v) {
    case FusionVariant::kAV: return "AV";
    case FusionVariant::kVA: return "V_A";
    case FusionVariant::kAVA: return "AV_A";
  }
  return "AV";
}

FusionVariant parse_variant(std::string_view name) {
  if (name == "AV") return FusionVariant::kAV;
  if (name == "V_A") return FusionVariant::kVA;
  if (name == "AV_A") return FusionVariant::kAVA;
  throw Error(errc::kInvalidArgument, "unknown fusion variant '" + std::string(name) + "' (AV, V_A, AV_A)");
}

Spec2vecConfig Spec2vecConfig::desk() {
  Spec2vecConfig cfg;
  const int channels[] = {8, 8, 8, 16, 16, 32};
  for (int i = 0; i < 6; ++i) cfg.layers.push_back({channels[i], 5, 5, 1, 1 << i});
  return cfg;
}

Spec2vecConfig Spec2vecConfig::full() {
  Spec2vecConfig cfg;
  constexpr int kWidth = 48;
  cfg.layers.push_back({kWidth, 7, 1, 1, 1});
  cfg.layers.push_back({kWidth, 1, 7, 1, 1});
  for (int i = 0; i < 6; ++i) cfg.layers.push_back({kWidth, 5, 5, 1, 1 << i});
  for (int i = 0; i < 6; ++i) cfg.layers.push_back({kWidth, 5, 5, 1 << i, 1 << i});
  cfg.layers.push_back({8, 1, 1, 1, 1});
  return cfg;
}

int Spec2vecConfig::time_reach() const {
  int reach = 0;
  for (const auto& l : layers) reach += l.dilation_t * (l.kernel_t - 1) / 2;
  return reach;
}

void Spec2vecConfig::validate() const {
  if (in_channels != 2) throw Error(errc::kInvalidArgument, "spec2vec: input must be 2 planes (re, im)");
  if (layers.empty()) throw Error(errc::kInvalidArgument, "spec2vec: no layers");
  for (const auto& l : layers) {
    if (l.out_channels <= 0 || l.kernel_f <= 0 || l.kernel_t <= 0 || l.dilation_f <= 0 || l.dilation_t <= 0)
      throw Error(errc::kInvalidArgument, "spec2vec: layer dimensions must be positive");
    if (l.kernel_f % 2 == 0 || l.kernel_t % 2 == 0)
      throw Error(errc::kInvalidArgument, "spec2vec: kernels must be odd for same padding");
  }
}

AvtConfig AvtConfig::desk() {
  AvtConfig cfg;
  cfg.d_model = 64;
  cfg.heads = 4;
  cfg.blocks = 2;
  cfg.ff_dim = 256;
  cfg.spectral_groups = 8;
  cfg.freq_bins = 256;
  cfg.motion_channels = 64;
  cfg.spec2vec = Spec2vecConfig::desk();
  return cfg;
}

void AvtConfig::validate() const {
  spec2vec.validate();
  if (d_model <= 0 || heads <= 0 || blocks < 1 || ff_dim <= 0 || freq_bins <= 0 || motion_channels <= 0)
    throw Error(errc::kInvalidArgument, "avt: dimensions must be positive and blocks >= 1");
  if (d_model % heads != 0) throw Error(errc::kInvalidArgument, "avt: d_model must be divisible by heads");
  if (spectral_groups <= 0 || d_model % spectral_groups != 0)
    throw Error(errc::kInvalidArgument, "avt: d_model must be divisible by spectral_groups");
  if ((d_model / spectral_groups) % heads != 0)
    throw Error(errc::kInvalidArgument, "avt: spectral token width must be divisible by heads");
}

FeatureSequence spec2vec_forward(const spectral::ComplexSpectrogram& x_half, const Spec2vecWeights& w,
                                 const Spec2vecConfig& cfg) {
  if (w.convs.size() != cfg.layers.size())
    throw Error(errc::kShapeMismatch, "spec2vec: weights hold " + std::to_string(w.convs.size()) +
                                          " layers, config has " + std::to_string(cfg.layers.size()));
  const int bins = static_cast<int>(x_half.bins()), frames = static_cast<int>(x_half.frames());
  nn::FeatureMap x(2, bins, frames);
  std::copy(x_half.data.re.begin(), x_half.data.re.end(), x.data.begin());
  std::copy(x_half.data.im.begin(), x_half.data.im.end(), x.data.begin() + static_cast<std::ptrdiff_t>(x_half.data.size()));

  for (std::size_t i = 0; i < w.convs.size(); ++i) {
    nn::Conv2d conv = w.convs[i];
    const auto& l = cfg.layers[i];
    conv.dilation_h = l.dilation_f;
    conv.dilation_w = l.dilation_t;
    conv.pad_h = l.dilation_f * (l.kernel_f - 1) / 2;
    conv.pad_w = l.dilation_t * (l.kernel_t - 1) / 2;
    x = conv.forward(x);
    nn::apply_relu(x);
  }

  // Fold frequency into channels: column c * F + f of row t.
  FeatureSequence out{nn::Mat(frames, Eigen::Index(x.channels) * bins)};
  for (int c = 0; c < x.channels; ++c)
    for (int f = 0; f < bins; ++f)
      for (int t = 0; t < frames; ++t) out.data(t, Eigen::Index(c) * bins + f) = x.at(c, f, t);
  return out;
}

FeatureSequence fuse(const FeatureSequence& audio, const motion::MotionFeatures& motion) {
  check_rows(audio.frames(), motion.frames(), "fuse");
  FeatureSequence out{nn::Mat(audio.data.rows(), audio.data.cols() + motion.data.cols())};
  out.data.leftCols(audio.data.cols()) = audio.data;
  out.data.rightCols(motion.data.cols()) = motion.data;
  return out;
}

FeatureSequence compression_layer(const FeatureSequence& z, const nn::Linear& w) {
  return {nn::gelu(w.forward(z.data))};
}

nn::Mat positional_encoding(std::size_t frames, int d_model) {
  nn::Mat pe(Eigen::Index(frames), d_model);
  for (std::size_t t = 0; t < frames; ++t) {
    for (int i = 0; i < d_model; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(i - i % 2) / d_model);
      const double a = static_cast<double>(t) * rate;
      pe(Eigen::Index(t), i) = i % 2 == 0 ? std::sin(a) : std::cos(a);
    }
  }
  return pe;
}

nn::Mat st_encoder_block(const nn::Mat& z, const EncoderBlock& w, int spectral_groups, nn::AttentionProbe* probe) {
  const Eigen::Index frames = z.rows(), d = z.cols();
  if (d % spectral_groups != 0) throw Error(errc::kShapeMismatch, "encoder: width not divisible by spectral groups");
  const nn::Mat u = w.norm1.forward(z);
  const nn::Mat temporal = w.temporal.forward(u, u, false, probe);
  // Spectral view: each frame's vector becomes spectral_groups tokens.
  const nn::Mat tokens = Eigen::Map<const nn::Mat>(u.data(), frames * spectral_groups, d / spectral_groups);
  const nn::Mat mixed = w.spectral.forward_grouped(tokens, spectral_groups, probe);
  const nn::Mat spectral = Eigen::Map<const nn::Mat>(mixed.data(), frames, d);
  nn::Mat out = z + temporal + spectral;
  out += w.ffn.forward(w.norm2.forward(out));
  return out;
}

nn::Mat decoder_block(const nn::Mat& query, const nn::Mat& memory, const DecoderBlock& w, bool causal,
                      nn::AttentionProbe* probe) {
  nn::Mat z = query;
  const nn::Mat u = w.norm1.forward(z);
  z += w.self_attn.forward(u, u, causal, probe);
  z += w.cross_attn.forward(w.norm2.forward(z), memory, false, probe);
  z += w.ffn.forward(w.norm3.forward(z));
  return z;
}

nn::Mat run_encoder(const nn::Mat& tokens, const AvtWeights& w, const AvtConfig& cfg, nn::AttentionProbe* probe) {
  nn::Mat z = tokens;
  for (const auto& block : w.encoder) z = st_encoder_block(z, block, cfg.spectral_groups, probe);
  return z;
}

nn::Mat run_decoder(const nn::Mat& query, const nn::Mat& memory, const AvtWeights& w, bool causal,
                    nn::AttentionProbe* probe) {
  nn::Mat z = query;
  for (const auto& block : w.decoder) z = decoder_block(z, memory, block, causal, probe);
  return w.final_norm.forward(z);
}

spectral::ComplexMask mask_head(const nn::Mat& hidden, const nn::Linear& head, int freq_bins) {
  if (head.out_features() != 2 * freq_bins) throw Error(errc::kShapeMismatch, "mask head: width mismatch");
  const nn::Mat out = head.forward(hidden);
  spectral::ComplexMask m;
  m.bounded = true;
  const auto frames = static_cast<std::size_t>(hidden.rows());
  m.data = ComplexGrid(static_cast<std::size_t>(freq_bins), frames);
  for (std::size_t t = 0; t < frames; ++t) {
    for (int f = 0; f < freq_bins; ++f) {
      m.data.re[f * frames + t] = std::tanh(out(Eigen::Index(t), f));
      m.data.im[f * frames + t] = std::tanh(out(Eigen::Index(t), freq_bins + f));
    }
  }
  return m;
}

AvtOutput avt_from_features(const FeatureSequence& audio, const motion::MotionFeatures& motion,
                            FusionVariant variant, const AvtWeights& w, const AvtConfig& cfg, AvtMode mode,
                            const FeatureSequence* teacher, nn::AttentionProbe* probe) {
  check_rows(audio.frames(), motion.frames(), "avt");
  const std::size_t frames = audio.frames();
  if (frames == 0) throw Error(errc::kEmptyInput, "avt: no frames");
  const bool teacher_forced = variant == FusionVariant::kAVA && mode == AvtMode::kTraining;
  if (teacher_forced && teacher == nullptr)
    throw Error(errc::kMissingTeacher, "avt: AV_A training requires the clean-audio teacher stream");
  if (!teacher_forced && teacher != nullptr)
    throw Error(errc::kInvalidArgument, "avt: a teacher stream is only accepted by AV_A in training mode");
  if (teacher) check_rows(teacher->frames(), frames, "avt teacher");

  const nn::Mat pe = positional_encoding(frames, cfg.d_model);
  AvtOutput out;

  switch (variant) {
    case FusionVariant::kAV: {
      const nn::Mat tokens = compression_layer(fuse(audio, motion), w.compress).data + pe;
      const nn::Mat memory = run_encoder(tokens, w, cfg, probe);
      out.hidden = run_decoder(memory, memory, w, false, probe);
      out.decoder_passes = 1;
      break;
    }
    case FusionVariant::kVA: {
      const nn::Mat enc_tokens = compression_layer({motion.data}, w.compress_motion).data + pe;
      const nn::Mat dec_tokens = compression_layer(audio, w.compress_audio).data + pe;
      const nn::Mat memory = run_encoder(enc_tokens, w, cfg, probe);
      out.hidden = run_decoder(dec_tokens, memory, w, false, probe);
      out.decoder_passes = 1;
      break;
    }
    case FusionVariant::kAVA: {
      const nn::Mat tokens = compression_layer(fuse(audio, motion), w.compress).data + pe;
      const nn::Mat memory = run_encoder(tokens, w, cfg, probe);
      nn::Mat inputs(Eigen::Index(frames), cfg.d_model);
      inputs.row(0) = w.start.transpose() + pe.row(0);
      if (teacher_forced) {
        const nn::Mat clean = compression_layer(*teacher, w.compress_audio).data;
        for (std::size_t t = 1; t < frames; ++t)
          inputs.row(Eigen::Index(t)) = clean.row(Eigen::Index(t - 1)) + pe.row(Eigen::Index(t));
        out.hidden = run_decoder(inputs, memory, w, true, probe);
        out.decoder_passes = 1;
      } else {
        // Each step re-decodes the prefix and feeds its newest output back
        // as the next input token.
        out.hidden.resize(Eigen::Index(frames), cfg.d_model);
        for (std::size_t t = 0; t < frames; ++t) {
          const auto n = Eigen::Index(t + 1);
          const nn::Mat step = run_decoder(inputs.topRows(n), memory, w, true, probe);
          ++out.decoder_passes;
          out.hidden.row(n - 1) = step.row(n - 1);
          if (t + 1 < frames) inputs.row(n) = step.row(n - 1) + pe.row(n);
        }
      }
      break;
    }
  }
  out.mask = mask_head(out.hidden, w.head, cfg.freq_bins);
  return out;
}

AvtOutput avt_forward(const spectral::ComplexSpectrogram& x_half, const motion::MotionFeatures& motion,
                      FusionVariant variant, const AvtWeights& w, const AvtConfig& cfg, AvtMode mode,
                      const FeatureSequence* teacher, nn::AttentionProbe* probe) {
  if (static_cast<int>(x_half.bins()) != cfg.freq_bins)
    throw Error(errc::kShapeMismatch, "avt: spectrogram has " + std::to_string(x_half.bins()) + " bins, expected " +
                                          std::to_string(cfg.freq_bins));
  const FeatureSequence audio = spec2vec_forward(x_half, w.spec2vec, cfg.spec2vec);
  return avt_from_features(audio, motion, variant, w, cfg, mode, teacher, probe);
}

std::vector<weights::ParamSpec> param_specs(const AvtConfig& cfg, FusionVariant variant) {
  cfg.validate();
  std::vector<weights::ParamSpec> specs;
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto ff = static_cast<std::size_t>(cfg.ff_dim);
  const auto dt = d / static_cast<std::size_t>(cfg.spectral_groups);
  const auto audio = static_cast<std::size_t>(cfg.audio_width());
  const auto motion = static_cast<std::size_t>(cfg.motion_channels);

  std::size_t in = static_cast<std::size_t>(cfg.spec2vec.in_channels);
  for (std::size_t i = 0; i < cfg.spec2vec.layers.size(); ++i) {
    const auto& l = cfg.spec2vec.layers[i];
    nn::conv_specs(specs, idx("avt.spec2vec.conv", i), in, static_cast<std::size_t>(l.out_channels),
                   static_cast<std::size_t>(l.kernel_f), static_cast<std::size_t>(l.kernel_t));
    in = static_cast<std::size_t>(l.out_channels);
  }
  switch (variant) {
    case FusionVariant::kAV: nn::linear_specs(specs, "avt.compress", audio + motion, d); break;
    case FusionVariant::kVA:
      nn::linear_specs(specs, "avt.compress_motion", motion, d);
      nn::linear_specs(specs, "avt.compress_audio", audio, d);
      break;
    case FusionVariant::kAVA:
      nn::linear_specs(specs, "avt.compress", audio + motion, d);
      nn::linear_specs(specs, "avt.compress_audio", audio, d);
      specs.push_back({"avt.start", {d}, d});
      break;
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.blocks); ++i) {
    const std::string p = idx("avt.enc", i);
    nn::layer_norm_specs(specs, p + ".norm1", d);
    nn::attention_specs(specs, p + ".temporal", d);
    nn::attention_specs(specs, p + ".spectral", dt);
    nn::layer_norm_specs(specs, p + ".norm2", d);
    nn::linear_specs(specs, p + ".ffn.fc1", d, ff);
    nn::linear_specs(specs, p + ".ffn.fc2", ff, d);
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.blocks); ++i) {
    const std::string p = idx("avt.dec", i);
    nn::layer_norm_specs(specs, p + ".norm1", d);
    nn::attention_specs(specs, p + ".self", d);
    nn::layer_norm_specs(specs, p + ".norm2", d);
    nn::attention_specs(specs, p + ".cross", d);
    nn::layer_norm_specs(specs, p + ".norm3", d);
    nn::linear_specs(specs, p + ".ffn.fc1", d, ff);
    nn::linear_specs(specs, p + ".ffn.fc2", ff, d);
  }
  nn::layer_norm_specs(specs, "avt.final_norm", d);
  nn::linear_specs(specs, "avt.head", d, 2 * static_cast<std::size_t>(cfg.freq_bins));
  return specs;
}

AvtWeights bind(const weights::WeightArchive& a, const AvtConfig& cfg, FusionVariant variant) {
  cfg.validate();
  AvtWeights w;
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto ff = static_cast<std::size_t>(cfg.ff_dim);
  const auto dt = d / static_cast<std::size_t>(cfg.spectral_groups);
  const auto audio = static_cast<std::size_t>(cfg.audio_width());
  const auto motion = static_cast<std::size_t>(cfg.motion_channels);

  std::size_t in = static_cast<std::size_t>(cfg.spec2vec.in_channels);
  for (std::size_t i = 0; i < cfg.spec2vec.layers.size(); ++i) {
    const auto& l = cfg.spec2vec.layers[i];
    w.spec2vec.convs.push_back(nn::bind_conv(a, idx("avt.spec2vec.conv", i), in,
                                             static_cast<std::size_t>(l.out_channels),
                                             static_cast<std::size_t>(l.kernel_f),
                                             static_cast<std::size_t>(l.kernel_t)));
    in = static_cast<std::size_t>(l.out_channels);
  }
  if (variant != FusionVariant::kVA) w.compress = nn::bind_linear(a, "avt.compress", audio + motion, d);
  if (variant == FusionVariant::kVA) w.compress_motion = nn::bind_linear(a, "avt.compress_motion", motion, d);
  if (variant != FusionVariant::kAV) w.compress_audio = nn::bind_linear(a, "avt.compress_audio", audio, d);
  if (variant == FusionVariant::kAVA) w.start = nn::to_vec(a.require("avt.start", {d}));

  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.blocks); ++i) {
    const std::string p = idx("avt.enc", i);
    EncoderBlock b;
    b.norm1 = nn::bind_layer_norm(a, p + ".norm1", d);
    b.temporal = nn::bind_attention(a, p + ".temporal", d, cfg.heads);
    b.spectral = nn::bind_attention(a, p + ".spectral", dt, cfg.heads);
    b.norm2 = nn::bind_layer_norm(a, p + ".norm2", d);
    b.ffn = {nn::bind_linear(a, p + ".ffn.fc1", d, ff), nn::bind_linear(a, p + ".ffn.fc2", ff, d)};
    w.encoder.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.blocks); ++i) {
    const std::string p = idx("avt.dec", i);
    DecoderBlock b;
    b.norm1 = nn::bind_layer_norm(a, p + ".norm1", d);
    b.self_attn = nn::bind_attention(a, p + ".self", d, cfg.heads);
    b.norm2 = nn::bind_layer_norm(a, p + ".norm2", d);
    b.cross_attn = nn::bind_attention(a, p + ".cross", d, cfg.heads);
    b.norm3 = nn::bind_layer_norm(a, p + ".norm3", d);
    b.ffn = {nn::bind_linear(a, p + ".ffn.fc1", d, ff), nn::bind_linear(a, p + ".ffn.fc2", ff, d)};
    w.decoder.push_back(std::move(b));
  }
  w.final_norm = nn::bind_layer_norm(a, "avt.final_norm", d);
  w.head = nn::bind_linear(a, "avt.head", d, 2 * static_cast<std::size_t>(cfg.freq_bins));
  return w;
}

}  // namespace vovit::avt
