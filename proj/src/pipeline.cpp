// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "vovit/criteria.hpp"
#include "vovit/error.hpp"

namespace vovit {

namespace {

using Clock = std::chrono::steady_clock;

double peak(const std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

// Runs fn under a stage label, recording wall-clock time.
template <typename Fn>
auto staged(Diagnostics& d, const char* stage, Fn&& fn) {
  const auto t0 = Clock::now();
  auto record = [&] {
    d.stage_ms.emplace_back(stage, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  };
  try {
    auto out = fn();
    record();
    return out;
  } catch (const Error& e) {
    throw e.stage().empty() ? e.with_stage(stage) : e;
  }
}

spectral::Waveform to_working_rate(const spectral::Waveform& w, const PipelineConfig& cfg) {
  if (w.sample_rate_hz == cfg.stft.sample_rate_hz) return w;
  return spectral::resample(w, cfg.stft.sample_rate_hz);
}

// Back to the caller's rate and exact length.
spectral::Waveform to_output(const spectral::Waveform& w, const spectral::Waveform& mixture) {
  spectral::Waveform out = w.sample_rate_hz == mixture.sample_rate_hz ? w : spectral::resample(w, mixture.sample_rate_hz);
  out.samples.resize(mixture.size(), 0.0);
  return out;
}

double saturation(const spectral::ComplexMask& m) {
  if (m.data.size() == 0) return 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.data.size(); ++i) n += (std::abs(m.data.re[i]) > 0.99) + (std::abs(m.data.im[i]) > 0.99);
  return static_cast<double>(n) / (2.0 * static_cast<double>(m.data.size()));
}

// Shared tail: stage-1 spectrogram -> stage 2 -> waveforms.
void finish(SeparationResult& res, const spectral::ComplexSpectrogram& s1, const enhancer::MaskFn& mask_fn,
            const PipelineConfig& cfg, std::size_t working_len, const spectral::Waveform& mixture) {
  auto& d = res.report;
  res.stage1 = s1;
  const auto enhanced = staged(d, "enhance", [&] {
    return enhancer::enhance_with(s1, cfg.r, mask_fn, cfg.enhancer.threshold);
  });
  d.enhancer_passes = enhanced.passes;
  res.estimate = staged(d, "istft", [&] {
    spectral::Waveform w = spectral::istft(enhanced.enhanced, cfg.stft, working_len);
    return to_output(w, mixture);
  });
  res.stage1_estimate = cfg.r == 0 ? res.estimate
                                   : to_output(spectral::istft(s1, cfg.stft, working_len), mixture);
  d.output_checksum = checksum(res.estimate.samples);
  d.stage1_checksum = checksum(s1.data);
}

}  // namespace

std::uint64_t checksum(const std::vector<double>& values) {
  std::vector<std::uint8_t> bytes(values.size() * sizeof(double));
  if (!values.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
  return weights::fnv1a64(bytes);
}

std::uint64_t checksum(const ComplexGrid& grid) {
  std::vector<double> all(grid.re);
  all.insert(all.end(), grid.im.begin(), grid.im.end());
  return checksum(all);
}

spectral::Waveform make_mixture(const spectral::Waveform& s1, const spectral::Waveform& s2,
                                const spectral::Waveform* background) {
  if (s1.sample_rate_hz != s2.sample_rate_hz || (background && background->sample_rate_hz != s1.sample_rate_hz))
    throw Error(errc::kSampleRateMismatch, "mix: inputs have different sample rates");
  const double p1 = peak(s1.samples), p2 = peak(s2.samples);
  if (p1 == 0.0) throw Error(errc::kSilentInput, "mix: first voice is silent");
  if (p2 == 0.0) throw Error(errc::kSilentInput, "mix: second voice is silent");

  const std::size_t n = std::max(s1.size(), s2.size());
  spectral::Waveform x;
  x.sample_rate_hz = s1.sample_rate_hz;
  x.samples.assign(n, 0.0);
  for (std::size_t i = 0; i < s1.size(); ++i) x.samples[i] += 0.5 * (s1.samples[i] / p1);
  for (std::size_t i = 0; i < s2.size(); ++i) x.samples[i] += 0.5 * (s2.samples[i] / p2);
  if (background) {
    for (std::size_t i = 0; i < std::min(n, background->size()); ++i) x.samples[i] += background->samples[i];
    const double p = peak(x.samples);
    if (p > 1.0)
      for (double& v : x.samples) v /= p;
  }
  return x;
}

std::string Diagnostics::to_json(bool with_timings) const {
  nlohmann::ordered_json j;
  if (with_timings) {
    nlohmann::ordered_json t;
    double total = 0.0;
    for (const auto& [stage, ms] : stage_ms) {
      t[stage] = ms;
      total += ms;
    }
    j["stage_ms"] = t;
    j["total_ms"] = total;
  }
  j["frames"] = frames;
  j["trimmed_samples"] = trimmed_samples;
  j["mask_saturation"] = mask_saturation;
  j["decoder_passes"] = decoder_passes;
  j["enhancer_passes"] = enhancer_passes;
  j["oracle_bypass"] = oracle_bypass;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(output_checksum));
  j["output_checksum"] = buf;
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stage1_checksum));
  j["stage1_checksum"] = buf;
  j["warnings"] = warnings;
  return j.dump(2);
}

Separator::Separator(PipelineConfig cfg, const weights::WeightArchive& archive)
    : cfg_(std::move(cfg)), graph_(landmarks::build_face_graph()) {
  try {
    cfg_.validate();
    weights_ = bind_weights(archive, cfg_);
  } catch (const Error& e) {
    throw e.with_stage("bind");
  }
}

SeparationResult Separator::run(const spectral::Waveform& mixture_in, const landmarks::LandmarkSequence& lm) const {
  SeparationResult res;
  auto& d = res.report;
  if (mixture_in.size() == 0) throw Error(errc::kEmptyInput, "separate: empty mixture").with_stage("input");

  spectral::Waveform mix = staged(d, "resample", [&] { return to_working_rate(mixture_in, cfg_); });

  // Trim audio to the landmark-covered duration.
  staged(d, "align", [&] {
    lm.validate();
    const double video_s = lm.duration_s(), audio_s = mix.duration_s();
    if (std::abs(video_s - audio_s) > 1.0 / lm.fps + 1e-9)
      throw Error(errc::kLengthMismatch, "audio lasts " + std::to_string(audio_s) + " s but landmarks cover " +
                                             std::to_string(video_s) + " s (tolerance one video frame)");
    const auto covered = static_cast<std::size_t>(std::llround(video_s * mix.sample_rate_hz));
    if (covered < mix.size()) {
      d.trimmed_samples = mix.size() - covered;
      mix.samples.resize(covered);
    }
    if (mix.size() == 0) throw Error(errc::kEmptyInput, "no audio after alignment");
    return 0;
  });

  const auto x = staged(d, "stft", [&] { return spectral::stft(mix, cfg_.stft); });
  const std::size_t frames = x.frames();
  d.frames = frames;
  const auto x_half = staged(d, "downsample", [&] { return spectral::downsample_freq(x); });
  const auto audio = staged(d, "spec2vec", [&] { return avt::spec2vec_forward(x_half, weights_.avt.spec2vec, cfg_.avt.spec2vec); });
  const auto reg = staged(d, "register", [&] { return landmarks::register_sequence(lm); });
  d.warnings = reg.warnings;
  const auto motion = staged(d, "motion", [&] {
    const auto norm = landmarks::normalize_landmarks(reg.sequence);
    return motion::upsample_motion(motion::motion_forward(norm, graph_, weights_.motion, cfg_.motion), frames);
  });
  const auto out = staged(d, "avt", [&] {
    return avt::avt_from_features(audio, motion, cfg_.variant, weights_.avt, cfg_.avt, avt::AvtMode::kInference);
  });
  d.decoder_passes = out.decoder_passes;
  d.mask_saturation = saturation(out.mask);
  const auto s1 = staged(d, "mask", [&] {
    return spectral::apply_complex_mask(x, spectral::upsample_mask_freq(out.mask));
  });
  finish(
      res, s1,
      [&](const spectral::ComplexSpectrogram& cur) {
        return enhancer::unet_forward(spectral::magnitude(cur), weights_.enhancer, cfg_.enhancer);
      },
      cfg_, mix.size(), mixture_in);
  return res;
}

SeparationResult separate(const SeparationRequest& req) {
  if (req.weights == nullptr) throw Error(errc::kInvalidArgument, "separate: no weights supplied").with_stage("bind");
  return Separator(req.config, *req.weights).run(req.mixture, req.landmarks);
}

SeparationResult oracle_separate(const spectral::Waveform& mixture_in, const spectral::Waveform& target_in,
                                 const PipelineConfig& cfg) {
  cfg.validate();
  if (mixture_in.size() == 0) throw Error(errc::kEmptyInput, "oracle: empty mixture").with_stage("input");
  SeparationResult res;
  auto& d = res.report;
  d.oracle_bypass = true;
  const auto mix = staged(d, "resample", [&] { return to_working_rate(mixture_in, cfg); });
  auto target = staged(d, "resample_ref", [&] { return to_working_rate(target_in, cfg); });
  if (target.sample_rate_hz != mix.sample_rate_hz)
    throw Error(errc::kSampleRateMismatch, "oracle: reference rate differs").with_stage("input");
  target.samples.resize(mix.size(), 0.0);

  const auto x = staged(d, "stft", [&] { return spectral::stft(mix, cfg.stft); });
  const auto s = staged(d, "stft_ref", [&] { return spectral::stft(target, cfg.stft); });
  d.frames = x.frames();
  const auto m = staged(d, "mask", [&] { return spectral::ideal_complex_mask(s, x); });
  d.mask_saturation = saturation(spectral::bound_mask(m));
  const auto s1 = spectral::apply_complex_mask(x, m);
  finish(
      res, s1, [&](const spectral::ComplexSpectrogram& cur) { return criteria::ideal_binary_mask(s, cur); }, cfg,
      mix.size(), mixture_in);
  return res;
}

}  // namespace vovit
