// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/config.hpp"

#include "json.hpp"
#include "vovit/error.hpp"

namespace vovit {

namespace {

using nlohmann::json;

motion::StGcnConfig full_motion() {
  motion::StGcnConfig m;
  m.blocks = {{2, 64}, {64, 64}, {64, 128}, {128, 128}, {128, 256}, {256, 256}};
  m.temporal_kernel = 7;
  return m;
}

PipelineConfig full_preset(const char* name, int blocks) {
  PipelineConfig cfg;
  cfg.preset = name;
  cfg.avt = avt::AvtConfig{};
  cfg.avt.blocks = blocks;
  cfg.motion = full_motion();
  cfg.avt.motion_channels = cfg.motion.output_channels();
  return cfg;
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

const std::vector<std::string>& PipelineConfig::preset_names() {
  static const std::vector<std::string> names = {"desk", "acappella-4", "speech-10", "speech-18"};
  return names;
}

PipelineConfig PipelineConfig::from_preset(std::string_view name) {
  if (name == "desk") return PipelineConfig{};
  if (name == "acappella-4") return full_preset("acappella-4", 4);
  if (name == "speech-10") return full_preset("speech-10", 10);
  if (name == "speech-18") return full_preset("speech-18", 18);
  throw Error(errc::kInvalidArgument,
              "unknown preset '" + std::string(name) + "' (desk, acappella-4, speech-10, speech-18)");
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(errc::kFormat, std::string("config: ") + e.what());
  }
  try {
    PipelineConfig cfg = from_preset(j.value("preset", std::string("desk")));
    if (j.contains("variant")) cfg.variant = avt::parse_variant(j.at("variant").get<std::string>());
    read(j, "r", cfg.r);
    if (j.contains("stft")) {
      const json& s = j.at("stft");
      read(s, "sample_rate_hz", cfg.stft.sample_rate_hz);
      read(s, "win_length", cfg.stft.win_length);
      read(s, "hop_length", cfg.stft.hop_length);
      read(s, "centered", cfg.stft.centered);
    }
    if (j.contains("avt")) {
      const json& a = j.at("avt");
      read(a, "d_model", cfg.avt.d_model);
      read(a, "heads", cfg.avt.heads);
      read(a, "blocks", cfg.avt.blocks);
      read(a, "ff_dim", cfg.avt.ff_dim);
      read(a, "spectral_groups", cfg.avt.spectral_groups);
      read(a, "freq_bins", cfg.avt.freq_bins);
      read(a, "motion_channels", cfg.avt.motion_channels);
      if (a.contains("spec2vec")) {
        cfg.avt.spec2vec.layers.clear();
        for (const auto& l : a.at("spec2vec")) {
          avt::ConvLayerSpec spec;
          read(l, "out_channels", spec.out_channels);
          read(l, "kernel_f", spec.kernel_f);
          read(l, "kernel_t", spec.kernel_t);
          read(l, "dilation_f", spec.dilation_f);
          read(l, "dilation_t", spec.dilation_t);
          cfg.avt.spec2vec.layers.push_back(spec);
        }
      }
    }
    if (j.contains("motion")) {
      const json& m = j.at("motion");
      if (m.contains("blocks")) {
        cfg.motion.blocks.clear();
        for (const auto& b : m.at("blocks")) cfg.motion.blocks.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
      }
      read(m, "temporal_kernel", cfg.motion.temporal_kernel);
    }
    if (j.contains("enhancer")) {
      const json& e = j.at("enhancer");
      read(e, "depth", cfg.enhancer.depth);
      read(e, "base_channels", cfg.enhancer.base_channels);
      read(e, "growth", cfg.enhancer.growth);
      read(e, "threshold", cfg.enhancer.threshold);
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw Error(errc::kFormat, std::string("config: ") + e.what());
  }
}

std::string PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["preset"] = preset;
  j["variant"] = std::string(avt::variant_name(variant));
  j["r"] = r;
  j["stft"] = {{"sample_rate_hz", stft.sample_rate_hz},
               {"win_length", stft.win_length},
               {"hop_length", stft.hop_length},
               {"centered", stft.centered}};
  nlohmann::ordered_json layers = nlohmann::ordered_json::array();
  for (const auto& l : avt.spec2vec.layers)
    layers.push_back({{"out_channels", l.out_channels},
                      {"kernel_f", l.kernel_f},
                      {"kernel_t", l.kernel_t},
                      {"dilation_f", l.dilation_f},
                      {"dilation_t", l.dilation_t}});
  j["avt"] = {{"d_model", avt.d_model},
              {"heads", avt.heads},
              {"blocks", avt.blocks},
              {"ff_dim", avt.ff_dim},
              {"spectral_groups", avt.spectral_groups},
              {"freq_bins", avt.freq_bins},
              {"motion_channels", avt.motion_channels},
              {"spec2vec", layers}};
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& [in, out] : motion.blocks) blocks.push_back({in, out});
  j["motion"] = {{"blocks", blocks}, {"temporal_kernel", motion.temporal_kernel}};
  j["enhancer"] = {{"depth", enhancer.depth},
                   {"base_channels", enhancer.base_channels},
                   {"growth", enhancer.growth},
                   {"threshold", enhancer.threshold}};
  return j.dump(2);
}

void PipelineConfig::validate() const {
  stft.validate();
  avt.validate();
  motion.validate();
  enhancer.validate();
  if (r < 0) throw Error(errc::kInvalidArgument, "config: r must be nonnegative");
  if (stft.bins() != 2 * avt.freq_bins)
    throw Error(errc::kInvalidArgument, "config: stft has " + std::to_string(stft.bins()) +
                                            " bins but the separator expects 2 x " + std::to_string(avt.freq_bins));
  if (motion.output_channels() != avt.motion_channels)
    throw Error(errc::kInvalidArgument, "config: motion network emits " + std::to_string(motion.output_channels()) +
                                            " channels, separator expects " + std::to_string(avt.motion_channels));
  if (motion.input_channels() != 2)
    throw Error(errc::kInvalidArgument, "config: motion network must take 2-D registered landmarks");
}

std::vector<weights::ParamSpec> parameter_specs(const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<weights::ParamSpec> specs = motion::param_specs(cfg.motion);
  for (auto& s : avt::param_specs(cfg.avt, cfg.variant)) specs.push_back(std::move(s));
  for (auto& s : enhancer::param_specs(cfg.enhancer)) specs.push_back(std::move(s));
  return specs;
}

weights::WeightArchive init_weights(const PipelineConfig& cfg, std::uint64_t seed) {
  return weights::init_weights(parameter_specs(cfg), seed);
}

ModelWeights bind_weights(const weights::WeightArchive& archive, const PipelineConfig& cfg) {
  cfg.validate();
  return {motion::bind(archive, cfg.motion), avt::bind(archive, cfg.avt, cfg.variant),
          enhancer::bind(archive, cfg.enhancer)};
}

}  // namespace vovit
