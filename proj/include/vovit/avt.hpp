// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <string_view>
#include <vector>

#include "vovit/motion_net.hpp"
#include "vovit/nn.hpp"
#include "vovit/spectral.hpp"
#include "vovit/weights.hpp"

// Stage-1 separator: a dilated convolutional audio embedder (Spec2vec)
// followed by an encoder-decoder transformer whose encoder attends both
// across frames and across groups of feature channels.
namespace vovit::avt {

// AV:   fused audio-visual tokens feed the encoder; the decoder re-reads the
//       encoder output. One decoder pass.
// V_A:  motion tokens feed the encoder, mixture-audio tokens the decoder.
//       One decoder pass.
// AV_A: fused tokens feed the encoder; the decoder is autoregressive over
//       clean-audio tokens (teacher forced in training, T passes at inference).
enum class FusionVariant { kAV, kVA, kAVA };

std::string_view variant_name(FusionVariant v);
FusionVariant parse_variant(std::string_view name);

enum class AvtMode { kInference, kTraining };

struct ConvLayerSpec {
  int out_channels = 8;
  int kernel_f = 5;
  int kernel_t = 5;
  int dilation_f = 1;
  int dilation_t = 1;
};

struct Spec2vecConfig {
  int in_channels = 2;
  std::vector<ConvLayerSpec> layers;

  // 6 layers of 5x5 kernels, time dilations 1..32, channels 2->8->...->32.
  static Spec2vecConfig desk();
  // 15-layer schedule for the full-size presets.
  static Spec2vecConfig full();
  int out_channels() const { return layers.empty() ? in_channels : layers.back().out_channels; }
  // Frames on each side whose receptive field reaches the zero padding.
  int time_reach() const;
  void validate() const;
};

struct AvtConfig {
  int d_model = 512;
  int heads = 8;
  int blocks = 10;
  int ff_dim = 2048;
  int spectral_groups = 8;
  int freq_bins = 256;
  int motion_channels = 64;
  Spec2vecConfig spec2vec = Spec2vecConfig::full();

  static AvtConfig desk();
  int audio_width() const { return spec2vec.out_channels() * freq_bins; }
  void validate() const;
};

struct FeatureSequence {
  nn::Mat data;  // T x C
  std::size_t frames() const { return static_cast<std::size_t>(data.rows()); }
};

struct Spec2vecWeights {
  std::vector<nn::Conv2d> convs;
};

struct EncoderBlock {
  nn::LayerNorm norm1, norm2;
  nn::MultiHeadAttention temporal, spectral;
  nn::FeedForward ffn;
};

struct DecoderBlock {
  nn::LayerNorm norm1, norm2, norm3;
  nn::MultiHeadAttention self_attn, cross_attn;
  nn::FeedForward ffn;
};

struct AvtWeights {
  Spec2vecWeights spec2vec;
  nn::Linear compress;         // fused audio-visual -> d_model (AV, AV_A)
  nn::Linear compress_motion;  // motion -> d_model (V_A)
  nn::Linear compress_audio;   // audio -> d_model (V_A decoder, AV_A teacher)
  nn::Vec start;               // AV_A start token
  std::vector<EncoderBlock> encoder;
  std::vector<DecoderBlock> decoder;
  nn::LayerNorm final_norm;  // closes the pre-norm decoder stack
  nn::Linear head;
};

struct AvtOutput {
  spectral::ComplexMask mask;  // bounded, freq_bins x T
  nn::Mat hidden;              // normalized decoder output, T x d_model
  int decoder_passes = 0;
};

FeatureSequence spec2vec_forward(const spectral::ComplexSpectrogram& x_half, const Spec2vecWeights& w,
                                 const Spec2vecConfig& cfg);

// Channel concatenation, audio channels first.
FeatureSequence fuse(const FeatureSequence& audio, const motion::MotionFeatures& motion);

FeatureSequence compression_layer(const FeatureSequence& z, const nn::Linear& w);

nn::Mat positional_encoding(std::size_t frames, int d_model);

nn::Mat st_encoder_block(const nn::Mat& z, const EncoderBlock& w, int spectral_groups,
                         nn::AttentionProbe* probe = nullptr);
nn::Mat decoder_block(const nn::Mat& query, const nn::Mat& memory, const DecoderBlock& w, bool causal,
                      nn::AttentionProbe* probe = nullptr);

nn::Mat run_encoder(const nn::Mat& tokens, const AvtWeights& w, const AvtConfig& cfg,
                    nn::AttentionProbe* probe = nullptr);
nn::Mat run_decoder(const nn::Mat& query, const nn::Mat& memory, const AvtWeights& w, bool causal,
                    nn::AttentionProbe* probe = nullptr);

spectral::ComplexMask mask_head(const nn::Mat& hidden, const nn::Linear& head, int freq_bins);

// Everything after the audio embedder. `teacher` is the clean-audio
// embedding, required for AV_A in training mode and rejected otherwise.
AvtOutput avt_from_features(const FeatureSequence& audio, const motion::MotionFeatures& motion,
                            FusionVariant variant, const AvtWeights& w, const AvtConfig& cfg,
                            AvtMode mode = AvtMode::kInference, const FeatureSequence* teacher = nullptr,
                            nn::AttentionProbe* probe = nullptr);

AvtOutput avt_forward(const spectral::ComplexSpectrogram& x_half, const motion::MotionFeatures& motion,
                      FusionVariant variant, const AvtWeights& w, const AvtConfig& cfg,
                      AvtMode mode = AvtMode::kInference, const FeatureSequence* teacher = nullptr,
                      nn::AttentionProbe* probe = nullptr);

std::vector<weights::ParamSpec> param_specs(const AvtConfig& cfg, FusionVariant variant);
AvtWeights bind(const weights::WeightArchive& archive, const AvtConfig& cfg, FusionVariant variant);

}  // namespace vovit::avt
