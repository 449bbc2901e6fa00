// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

#include "json.hpp"
#include "vovit/error.hpp"
#include "vovit/gradcheck.hpp"
#include "vovit/io.hpp"
#include "vovit/landmarks.hpp"
#include "vovit/metrics.hpp"
#include "vovit/pipeline.hpp"
#include "vovit/synth.hpp"
#include "vovit/wav.hpp"
#include "vovit/weights.hpp"

namespace vovit::cli {

namespace {

int fail(std::ostream& err, const std::string& code, const std::string& message, const std::string& stage = "") {
  nlohmann::ordered_json j;
  j["error"] = {{"code", code}, {"message", message}};
  if (!stage.empty()) j["error"]["stage"] = stage;
  err << j.dump() << "\n";
  return 1;
}

struct SeparateArgs {
  std::string mix, landmarks, weights, preset = "desk", variant, out, ref, diagnostics, stage1_out, config;
  std::optional<int> r;
  bool oracle = false;
};

PipelineConfig resolve_config(const SeparateArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig::from_preset(a.preset)
                                        : PipelineConfig::from_json(io::read_text(a.config));
  if (!a.variant.empty()) cfg.variant = avt::parse_variant(a.variant);
  if (a.r) cfg.r = *a.r;
  cfg.validate();
  return cfg;
}

int do_separate(const SeparateArgs& a, std::ostream& out) {
  const PipelineConfig cfg = resolve_config(a);
  const spectral::Waveform mix = wav::read(a.mix);
  SeparationResult res;
  if (a.oracle) {
    if (a.ref.empty()) throw Error(errc::kInvalidArgument, "--oracle-bypass needs --ref (the clean target)");
    res = oracle_separate(mix, wav::read(a.ref), cfg);
  } else {
    if (a.landmarks.empty() || a.weights.empty())
      throw Error(errc::kInvalidArgument, "separate needs --landmarks and --weights (or --oracle-bypass)");
    const auto archive = weights::load_archive_file(a.weights);
    const auto lm = landmarks::load_landmarks(a.landmarks);
    res = Separator(cfg, archive).run(mix, lm);
  }
  wav::write(a.out, res.estimate);
  if (!a.stage1_out.empty()) wav::write(a.stage1_out, res.stage1_estimate);
  if (!a.diagnostics.empty()) io::write_text(a.diagnostics, res.report.to_json() + "\n");
  nlohmann::ordered_json summary;
  summary["out"] = a.out;
  summary["samples"] = res.estimate.size();
  summary["sample_rate_hz"] = res.estimate.sample_rate_hz;
  summary["frames"] = res.report.frames;
  summary["decoder_passes"] = res.report.decoder_passes;
  summary["enhancer_passes"] = res.report.enhancer_passes;
  out << summary.dump() << "\n";
  return 0;
}

int do_oracle(const std::string& s1_path, const std::string& s2_path, const std::string& bg_path,
              const std::string& out_path, std::ostream& out) {
  const auto s1 = wav::read(s1_path), s2 = wav::read(s2_path);
  std::optional<spectral::Waveform> bg;
  if (!bg_path.empty()) bg = wav::read(bg_path);
  const auto mix = make_mixture(s1, s2, bg ? &*bg : nullptr);
  PipelineConfig cfg;
  cfg.r = 0;
  // References must live at the mixture's scale: peak-normalized and halved.
  auto scaled = [](spectral::Waveform w, std::size_t n) {
    double p = 0.0;
    for (double v : w.samples) p = std::max(p, std::abs(v));
    for (double& v : w.samples) v = 0.5 * v / p;
    w.samples.resize(n, 0.0);
    return w;
  };
  const auto r1 = scaled(s1, mix.size()), r2 = scaled(s2, mix.size());
  const auto res = oracle_separate(mix, r1, cfg);
  if (!out_path.empty()) wav::write(out_path, res.estimate);
  const auto rep = metrics::evaluate(res.estimate, {r1, r2}, 0);
  out << rep.to_json() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vovit: two-stage audio-visual voice separation", "vovit"};
  app.require_subcommand(1);

  std::string s1, s2, background, mix_out;
  auto* mix = app.add_subcommand("mix", "Peak-normalize and average two voices into a mixture WAV");
  mix->add_option("--s1", s1, "First voice WAV")->required();
  mix->add_option("--s2", s2, "Second voice WAV")->required();
  mix->add_option("--background", background, "Optional background WAV");
  mix->add_option("--out", mix_out, "Output mixture WAV")->required();

  SeparateArgs sep;
  auto* separate_cmd = app.add_subcommand("separate", "Separate the voice of the face in --landmarks");
  separate_cmd->add_option("--mix", sep.mix, "Mixture WAV")->required();
  separate_cmd->add_option("--landmarks", sep.landmarks, "Landmark JSON for the target face");
  separate_cmd->add_option("--weights", sep.weights, "Weight archive (.vvwa)");
  separate_cmd->add_option("--preset", sep.preset, "desk | acappella-4 | speech-10 | speech-18");
  separate_cmd->add_option("--variant", sep.variant, "AV | V_A | AV_A");
  separate_cmd->add_option("--r", sep.r, "Stage-2 recursion count");
  separate_cmd->add_option("--out", sep.out, "Output WAV")->required();
  separate_cmd->add_flag("--oracle-bypass", sep.oracle, "Use ground-truth masks instead of the networks");
  separate_cmd->add_option("--ref", sep.ref, "Clean target WAV (oracle bypass)");
  separate_cmd->add_option("--emit-diagnostics", sep.diagnostics, "Write diagnostics JSON here");
  separate_cmd->add_option("--stage1-out", sep.stage1_out, "Also write the stage-1 reconstruction");
  separate_cmd->add_option("--config", sep.config, "PipelineConfig JSON (overrides --preset)");

  std::string o_s1, o_s2, o_bg, o_out;
  auto* oracle = app.add_subcommand("oracle", "Ideal-mask separation of a synthetic mixture plus report");
  oracle->add_option("--s1", o_s1, "Target voice WAV")->required();
  oracle->add_option("--s2", o_s2, "Interfering voice WAV")->required();
  oracle->add_option("--background", o_bg, "Optional background WAV");
  oracle->add_option("--out", o_out, "Write the separated target here");

  std::string est;
  std::vector<std::string> refs;
  std::size_t target = 0;
  auto* eval = app.add_subcommand("eval", "SDR/SIR of an estimate against references");
  eval->add_option("--est", est, "Estimate WAV")->required();
  eval->add_option("--ref", refs, "Reference WAV (repeat for each source)")->required();
  eval->add_option("--target", target, "Index of the target among --ref");

  std::uint64_t gc_seed = 0;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the loss gradients");
  grad->add_option("--seed", gc_seed, "Instance seed");

  std::string preset = "desk", variant, weights_out;
  std::uint64_t seed = 0;
  auto* init = app.add_subcommand("init-weights", "Write a deterministic random weight archive");
  init->add_option("--preset", preset, "Preset name");
  init->add_option("--variant", variant, "AV | V_A | AV_A");
  init->add_option("--seed", seed, "64-bit seed")->required();
  init->add_option("--out", weights_out, "Output archive")->required();

  std::string synth_dir;
  double seconds = 4.0, fps = 25.0;
  auto* synth_cmd = app.add_subcommand("synth", "Write demo voices and a landmark track");
  synth_cmd->add_option("--dir", synth_dir, "Output directory")->required();
  synth_cmd->add_option("--seconds", seconds, "Duration");
  synth_cmd->add_option("--fps", fps, "Landmark frame rate");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    fail(err, "usage", e.what());
    return 2;
  }

  try {
    if (*mix) {
      const auto a = wav::read(s1), b = wav::read(s2);
      std::optional<spectral::Waveform> bg;
      if (!background.empty()) bg = wav::read(background);
      wav::write(mix_out, make_mixture(a, b, bg ? &*bg : nullptr));
      return 0;
    }
    if (*separate_cmd) return do_separate(sep, out);
    if (*oracle) return do_oracle(o_s1, o_s2, o_bg, o_out, out);
    if (*eval) {
      std::vector<spectral::Waveform> r;
      for (const auto& p : refs) r.push_back(wav::read(p));
      out << metrics::evaluate(wav::read(est), r, target).to_json() << "\n";
      return 0;
    }
    if (*grad) {
      const auto rep = gradcheck::run(gc_seed);
      out << rep.to_json() << "\n";
      return rep.pass ? 0 : 3;
    }
    if (*init) {
      PipelineConfig cfg = PipelineConfig::from_preset(preset);
      if (!variant.empty()) cfg.variant = avt::parse_variant(variant);
      const auto archive = init_weights(cfg, seed);
      weights::save_archive_file(weights_out, archive);
      nlohmann::ordered_json j;
      j["out"] = weights_out;
      j["tensors"] = archive.tensors().size();
      j["parameters"] = archive.parameter_count();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(archive.checksum()));
      j["checksum"] = buf;
      out << j.dump() << "\n";
      return 0;
    }
    if (*synth_cmd) {
      const auto v1 = synth::chirp(seconds, 300.0, 1800.0);
      const auto v2 = synth::harmonic_tone(seconds, 220.0);
      const auto frames = static_cast<std::size_t>(std::llround(seconds * fps));
      wav::write(synth_dir + "/voice1.wav", v1);
      wav::write(synth_dir + "/voice2.wav", v2);
      wav::write(synth_dir + "/mix.wav", make_mixture(v1, v2));
      landmarks::save_landmarks(synth_dir + "/face1.json", synth::talking_face(frames, fps, 1));
      return 0;
    }
  } catch (const Error& e) {
    return fail(err, e.code(), e.what(), e.stage());
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what());
  }
  return 2;
}

}  // namespace vovit::cli
