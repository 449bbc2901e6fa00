// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "vovit/criteria.hpp"

namespace vovit::gradcheck {

namespace {

using spectral::ComplexMask;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  // Portable across standard libraries, unlike uniform_real_distribution.
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ComplexGrid random_grid(std::mt19937_64& rng, std::size_t n, double scale) {
  ComplexGrid g(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.re[i] = scale * uniform(rng, -1.0, 1.0);
    g.im[i] = scale * uniform(rng, -1.0, 1.0);
  }
  return g;
}

void track(double a, double n, double& worst) {
  if (std::max(std::abs(a), std::abs(n)) < kFloor) return;
  worst = std::max(worst, relative_error(a, n));
}

double check_stage1(std::mt19937_64& rng, int size) {
  const auto n = static_cast<std::size_t>(size);
  const auto x = random_grid(rng, n, 3.0);
  const auto g = criteria::penalty_weights(x);
  const ComplexMask gt{random_grid(rng, n, 0.95), true};
  ComplexMask pred{random_grid(rng, n, 0.95), true};
  const ComplexGrid grad = criteria::stage1_loss_grad(gt, pred, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    for (auto* plane : {&pred.data.re, &pred.data.im}) {
      const double keep = (*plane)[i];
      (*plane)[i] = keep + kStep;
      const double up = criteria::stage1_loss(gt, pred, g);
      (*plane)[i] = keep - kStep;
      const double down = criteria::stage1_loss(gt, pred, g);
      (*plane)[i] = keep;
      const double analytic = plane == &pred.data.re ? grad.re[i] : grad.im[i];
      track(analytic, (up - down) / (2.0 * kStep), worst);
    }
  }
  return worst;
}

double check_stage2(std::mt19937_64& rng, int size) {
  const auto n = static_cast<std::size_t>(size);
  const auto g = criteria::penalty_weights(random_grid(rng, n, 3.0));
  criteria::BinaryMask gt{RealGrid(n, n)}, pred{RealGrid(n, n)};
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    gt.data.values[i] = (rng() >> 63) ? 1.0 : 0.0;
    pred.data.values[i] = uniform(rng, 0.05, 0.95);
  }
  const RealGrid grad = criteria::stage2_loss_grad(gt, pred, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double keep = pred.data.values[i];
    pred.data.values[i] = keep + kStep;
    const double up = criteria::stage2_loss(gt, pred, g);
    pred.data.values[i] = keep - kStep;
    const double down = criteria::stage2_loss(gt, pred, g);
    pred.data.values[i] = keep;
    track(grad.values[i], (up - down) / (2.0 * kStep), worst);
  }
  return worst;
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return scale == 0.0 ? 0.0 : std::abs(analytic - numeric) / scale;
}

Report run(std::uint64_t seed, int instances, int size) {
  std::mt19937_64 rng(seed);
  Report rep;
  OpResult s1{"stage1_loss_grad"}, s2{"stage2_loss_grad"};
  for (int i = 0; i < instances; ++i) {
    s1.max_rel_err = std::max(s1.max_rel_err, check_stage1(rng, size));
    s2.max_rel_err = std::max(s2.max_rel_err, check_stage2(rng, size));
  }
  for (auto* r : {&s1, &s2}) {
    r->instances = instances;
    r->pass = r->max_rel_err < r->tolerance;
  }
  rep.results = {s1, s2};
  rep.pass = s1.pass && s2.pass;
  return rep;
}

std::string Report::to_json() const {
  nlohmann::ordered_json j;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : results)
    j["results"].push_back({{"op", r.op},
                            {"max_rel_err", r.max_rel_err},
                            {"tolerance", r.tolerance},
                            {"instances", r.instances},
                            {"pass", r.pass}});
  j["pass"] = pass;
  return j.dump(2);
}

}  // namespace vovit::gradcheck
