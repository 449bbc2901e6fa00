// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <string>

#include "vovit/criteria.hpp"
#include "vovit/error.hpp"
#include "vovit/gradcheck.hpp"
#include "vovit/landmarks.hpp"
#include "vovit/metrics.hpp"
#include "vovit/pipeline.hpp"
#include "vovit/spectral.hpp"
#include "vovit/synth.hpp"
#include "vovit/training.hpp"
#include "vovit/weights.hpp"

namespace py = pybind11;
using namespace vovit;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using C128 = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

spectral::Waveform to_wave(const F64& a, int rate) {
  if (a.ndim() != 1) throw Error(errc::kShapeMismatch, "expected a 1-D waveform");
  return {std::vector<double>(a.data(), a.data() + a.size()), rate};
}

py::array_t<double> from_wave(const spectral::Waveform& w) {
  py::array_t<double> out(static_cast<py::ssize_t>(w.size()));
  std::copy(w.samples.begin(), w.samples.end(), out.mutable_data());
  return out;
}

ComplexGrid to_grid(const C128& a) {
  if (a.ndim() != 2) throw Error(errc::kShapeMismatch, "expected a 2-D complex array (F x T)");
  ComplexGrid g(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.re[i] = a.data()[i].real();
    g.im[i] = a.data()[i].imag();
  }
  return g;
}

C128 from_grid(const ComplexGrid& g) {
  C128 out({static_cast<py::ssize_t>(g.rows), static_cast<py::ssize_t>(g.cols)});
  for (std::size_t i = 0; i < g.size(); ++i) out.mutable_data()[i] = {g.re[i], g.im[i]};
  return out;
}

py::array_t<double> from_real(const RealGrid& g) {
  py::array_t<double> out({static_cast<py::ssize_t>(g.rows), static_cast<py::ssize_t>(g.cols)});
  std::copy(g.values.begin(), g.values.end(), out.mutable_data());
  return out;
}

spectral::ComplexSpectrogram to_spec(const C128& a) { return {to_grid(a), {}, spectral::FreqResolution::kFull}; }

landmarks::Points3 to_points(const F64& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw Error(errc::kShapeMismatch, "expected an N x 3 point array");
  landmarks::Points3 p(a.shape(0), 3);
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (int d = 0; d < 3; ++d) p(i, d) = a.at(i, d);
  return p;
}

py::dict result_dict(const SeparationResult& res) {
  py::dict d;
  d["estimate"] = from_wave(res.estimate);
  d["stage1_estimate"] = from_wave(res.stage1_estimate);
  d["stage1"] = from_grid(res.stage1.data);
  d["sample_rate"] = res.estimate.sample_rate_hz;
  d["diagnostics"] = res.report.to_json();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "vovit C++ core";
  static py::exception<Error> error(m, "VovitError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string where = e.stage().empty() ? "" : " [" + e.stage() + "]";
      py::set_error(error, (e.code() + where + ": " + e.what()).c_str());
    }
  });
  m.attr("SAMPLE_RATE") = spectral::kSampleRate;

  m.def(
      "stft", [](const F64& x, int rate) { return from_grid(spectral::stft(to_wave(x, rate)).data); }, py::arg("x"),
      py::arg("sample_rate") = spectral::kSampleRate, "Centered Hann STFT, returns complex F x T.");
  m.def(
      "istft",
      [](const C128& s, std::size_t length) { return from_wave(spectral::istft(to_spec(s), {}, length)); },
      py::arg("spec"), py::arg("length"));
  m.def(
      "ideal_complex_mask",
      [](const C128& s, const C128& x) { return from_grid(spectral::ideal_complex_mask(to_spec(s), to_spec(x)).data); },
      py::arg("source"), py::arg("mixture"));
  m.def(
      "bound_mask", [](const C128& m) { return from_grid(spectral::bound_mask({to_grid(m), false}).data); },
      py::arg("mask"));
  m.def(
      "penalty_weights", [](const C128& x) { return from_real(criteria::penalty_weights(to_grid(x)).weights); },
      py::arg("mixture"));
  m.def(
      "ideal_binary_mask",
      [](const C128& s, const C128& s_hat) { return from_real(criteria::ideal_binary_mask(to_grid(s), to_grid(s_hat)).data); },
      py::arg("source"), py::arg("estimate"));
  m.def(
      "stage1_loss",
      [](const C128& gt, const C128& pred, const C128& x) {
        return criteria::stage1_loss({to_grid(gt), true}, {to_grid(pred), true}, criteria::penalty_weights(to_grid(x)));
      },
      py::arg("gt"), py::arg("pred"), py::arg("mixture"));
  m.def(
      "kabsch",
      [](const F64& p, const F64& q, bool rigid) {
        const auto t = landmarks::kabsch(to_points(p), to_points(q),
                                         rigid ? landmarks::KabschMode::kRigid : landmarks::KabschMode::kSimilarity);
        py::array_t<double> r({3, 3}), tr(3);
        for (int i = 0; i < 3; ++i) {
          tr.mutable_at(i) = t.translation(i);
          for (int j = 0; j < 3; ++j) r.mutable_at(i, j) = t.rotation(i, j);
        }
        return py::make_tuple(r, tr, t.scale);
      },
      py::arg("p"), py::arg("q"), py::arg("rigid") = false, "Returns (R, t, s) with s R p + t ~ q.");
  m.def(
      "evaluate",
      [](const F64& est, const std::vector<F64>& refs, std::size_t target) {
        std::vector<spectral::Waveform> r;
        for (const auto& a : refs) r.push_back(to_wave(a, spectral::kSampleRate));
        return metrics::evaluate(to_wave(est, spectral::kSampleRate), r, target).to_json();
      },
      py::arg("est"), py::arg("refs"), py::arg("target") = 0, "JSON SDR/SIR report.");
  m.def(
      "summarize",
      [](const std::vector<std::pair<double, double>>& sdr_sir) {
        std::vector<metrics::SeparationReport> reps;
        for (const auto& [sdr, sir] : sdr_sir) {
          metrics::SeparationReport r;
          r.sdr_db = sdr;
          r.sir_db = sir;
          r.sdr_capped = sdr >= metrics::kCapDb;
          r.sir_capped = sir >= metrics::kCapDb;
          reps.push_back(r);
        }
        return metrics::summarize(reps).to_json();
      },
      py::arg("pairs"));
  m.def(
      "make_mixture",
      [](const F64& s1, const F64& s2, std::optional<F64> bg, int rate) {
        std::optional<spectral::Waveform> b;
        if (bg) b = to_wave(*bg, rate);
        return from_wave(make_mixture(to_wave(s1, rate), to_wave(s2, rate), b ? &*b : nullptr));
      },
      py::arg("s1"), py::arg("s2"), py::arg("background") = py::none(), py::arg("sample_rate") = spectral::kSampleRate);
  m.def(
      "preset_config", [](const std::string& name) { return PipelineConfig::from_preset(name).to_json(); },
      py::arg("name") = "desk");
  m.def(
      "init_weights",
      [](const std::string& preset, std::uint64_t seed, const std::string& variant) {
        PipelineConfig cfg = PipelineConfig::from_preset(preset);
        if (!variant.empty()) cfg.variant = avt::parse_variant(variant);
        const auto bytes = init_weights(cfg, seed).save();
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("preset") = "desk", py::arg("seed") = 0, py::arg("variant") = "", "Serialized weight archive bytes.");
  m.def(
      "weights_checksum",
      [](const py::bytes& b) {
        const std::string s = b;
        return weights::WeightArchive::load({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}).checksum();
      },
      py::arg("archive"));
  m.def(
      "separate",
      [](const F64& mix, const std::string& landmarks_json, const py::bytes& archive, const std::string& preset,
         const std::string& variant, int r, int rate) {
        PipelineConfig cfg = PipelineConfig::from_preset(preset);
        if (!variant.empty()) cfg.variant = avt::parse_variant(variant);
        cfg.r = r;
        const std::string s = archive;
        const auto a = weights::WeightArchive::load({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
        const auto lm = landmarks::parse_landmarks_json(landmarks_json);
        const auto w = to_wave(mix, rate);
        SeparationResult res;
        {
          py::gil_scoped_release release;
          res = Separator(cfg, a).run(w, lm);
        }
        return result_dict(res);
      },
      py::arg("mixture"), py::arg("landmarks_json"), py::arg("archive"), py::arg("preset") = "desk",
      py::arg("variant") = "", py::arg("r") = 1, py::arg("sample_rate") = spectral::kSampleRate);
  m.def(
      "oracle_separate",
      [](const F64& mix, const F64& target, int r, int rate) {
        PipelineConfig cfg;
        cfg.r = r;
        return result_dict(oracle_separate(to_wave(mix, rate), to_wave(target, rate), cfg));
      },
      py::arg("mixture"), py::arg("target"), py::arg("r") = 0, py::arg("sample_rate") = spectral::kSampleRate);
  m.def(
      "gradcheck", [](std::uint64_t seed) { return gradcheck::run(seed).to_json(); }, py::arg("seed") = 0);
  m.def(
      "micro_overfit",
      [](std::uint64_t seed, int steps, double lr) {
        py::gil_scoped_release release;
        return training::micro_overfit(seed, steps, lr);
      },
      py::arg("seed"), py::arg("steps"), py::arg("lr") = training::kMicroOverfitLr);
  m.def(
      "chirp", [](double sec, double f0, double f1) { return from_wave(synth::chirp(sec, f0, f1)); }, py::arg("seconds"),
      py::arg("f0"), py::arg("f1"));
  m.def(
      "harmonic_tone", [](double sec, double f0) { return from_wave(synth::harmonic_tone(sec, f0)); },
      py::arg("seconds"), py::arg("f0"));
  m.def(
      "talking_face",
      [](std::size_t frames, double fps, std::uint64_t seed) {
        return landmarks::landmarks_to_json(synth::talking_face(frames, fps, seed));
      },
      py::arg("frames"), py::arg("fps") = 25.0, py::arg("seed") = 0, "Landmark JSON text.");
}
