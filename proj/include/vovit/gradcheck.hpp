// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Finite-difference verification of the analytic loss gradients.
namespace vovit::gradcheck {

inline constexpr double kTolerance = 1e-4;
inline constexpr double kStep = 1e-4;
// Components where both gradients are below this magnitude are skipped.
inline constexpr double kFloor = 1e-6;

struct OpResult {
  std::string op;
  double max_rel_err = 0.0;
  double tolerance = kTolerance;
  int instances = 0;
  bool pass = false;
};

struct Report {
  std::vector<OpResult> results;
  bool pass = false;
  std::string to_json() const;
};

double relative_error(double analytic, double numeric);

Report run(std::uint64_t seed = 0, int instances = 20, int size = 8);

}  // namespace vovit::gradcheck
