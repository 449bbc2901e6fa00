// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vovit/spectral.hpp"

// Projection-based SDR/SIR with whole-signal projections (no distortion
// filters).
namespace vovit::metrics {

inline constexpr double kCapDb = 100.0;

struct SourceBreakdown {
  double target_energy = 0.0;    // ||s_target||^2
  double interf_energy = 0.0;    // ||e_interf||^2
  double artif_energy = 0.0;     // ||e_artif||^2
  double estimate_energy = 0.0;  // ||est||^2
  double target_gain = 0.0;      // est . ref / ||ref||^2
};

struct SeparationReport {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  bool sdr_capped = false;
  bool sir_capped = false;
  std::size_t n = 0;  // samples compared
  std::size_t target_index = 0;
  // Gain of est on every reference in the least-squares fit.
  std::vector<double> per_source_gain;
  SourceBreakdown breakdown;

  bool capped() const { return sdr_capped || sir_capped; }
  std::string to_json() const;
};

SeparationReport evaluate(const spectral::Waveform& est, const std::vector<spectral::Waveform>& refs,
                          std::size_t target_index);

// Evaluates independent (est, refs, target) triples in parallel.
struct EvalJob {
  spectral::Waveform est;
  std::vector<spectral::Waveform> refs;
  std::size_t target_index = 0;
};
std::vector<SeparationReport> evaluate_batch(const std::vector<EvalJob>& jobs);

struct Moments {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t count = 0;
  std::size_t capped = 0;
};

struct Summary {
  Moments sdr;
  Moments sir;
  std::string to_json() const;
};

Summary summarize(const std::vector<SeparationReport>& reports);

}  // namespace vovit::metrics
