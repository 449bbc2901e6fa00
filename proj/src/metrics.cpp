// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "vovit/metrics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "json.hpp"
#include "vovit/error.hpp"
#include "vovit/parallel.hpp"

namespace vovit::metrics {

namespace {

// 10 log10(num / den) with the +100 dB cap; a zero denominator caps.
double ratio_db(double num, double den, bool& capped) {
  if (den <= 0.0 || num / den > std::pow(10.0, kCapDb / 10.0)) {
    capped = true;
    return kCapDb;
  }
  if (num <= 0.0) return -kCapDb;
  capped = false;
  return std::max(-kCapDb, 10.0 * std::log10(num / den));
}

}  // namespace

SeparationReport evaluate(const spectral::Waveform& est, const std::vector<spectral::Waveform>& refs,
                          std::size_t target_index) {
  if (refs.empty()) throw Error(errc::kEmptyInput, "evaluate: no references");
  if (target_index >= refs.size())
    throw Error(errc::kInvalidArgument, "evaluate: target index " + std::to_string(target_index) + " out of range");
  const std::size_t n = est.size();
  if (n == 0) throw Error(errc::kEmptyInput, "evaluate: empty estimate");
  for (const auto& r : refs) {
    if (r.size() != n)
      throw Error(errc::kLengthMismatch, "evaluate: reference has " + std::to_string(r.size()) +
                                             " samples, estimate has " + std::to_string(n));
    if (r.sample_rate_hz != est.sample_rate_hz)
      throw Error(errc::kSampleRateMismatch, "evaluate: reference and estimate sample rates differ");
  }

  const auto k = static_cast<Eigen::Index>(refs.size());
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), k);
  for (Eigen::Index j = 0; j < k; ++j)
    basis.col(j) = Eigen::Map<const Eigen::VectorXd>(refs[std::size_t(j)].samples.data(), Eigen::Index(n));
  const Eigen::Map<const Eigen::VectorXd> e(est.samples.data(), Eigen::Index(n));

  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmax > 0.0) || eig.eigenvalues().minCoeff() <= 1e-12 * lmax)
    throw Error(errc::kRankDeficient, "evaluate: references are linearly dependent or silent");

  const Eigen::VectorXd rhs = basis.transpose() * e;
  const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
  const Eigen::VectorXd& target_ref = basis.col(Eigen::Index(target_index));
  const double gain = rhs(Eigen::Index(target_index)) / gram(Eigen::Index(target_index), Eigen::Index(target_index));

  const Eigen::VectorXd s_target = gain * target_ref;
  const Eigen::VectorXd p_all = basis * coef;
  const Eigen::VectorXd e_interf = p_all - s_target;
  const Eigen::VectorXd e_artif = e - p_all;

  SeparationReport rep;
  rep.n = n;
  rep.target_index = target_index;
  rep.per_source_gain.assign(coef.data(), coef.data() + coef.size());
  rep.breakdown.target_energy = s_target.squaredNorm();
  rep.breakdown.interf_energy = e_interf.squaredNorm();
  rep.breakdown.artif_energy = e_artif.squaredNorm();
  rep.breakdown.estimate_energy = e.squaredNorm();
  rep.breakdown.target_gain = gain;
  rep.sdr_db = ratio_db(rep.breakdown.target_energy, (e_interf + e_artif).squaredNorm(), rep.sdr_capped);
  rep.sir_db = ratio_db(rep.breakdown.target_energy, rep.breakdown.interf_energy, rep.sir_capped);
  return rep;
}

std::vector<SeparationReport> evaluate_batch(const std::vector<EvalJob>& jobs) {
  std::vector<SeparationReport> out(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) { out[i] = evaluate(jobs[i].est, jobs[i].refs, jobs[i].target_index); });
  return out;
}

std::string SeparationReport::to_json() const {
  nlohmann::ordered_json j;
  j["sdr_db"] = sdr_db;
  j["sir_db"] = sir_db;
  j["capped"] = capped();
  j["n"] = n;
  j["target_index"] = target_index;
  j["per_source"] = {
      {"gains", per_source_gain},
      {"target_energy", breakdown.target_energy},
      {"interf_energy", breakdown.interf_energy},
      {"artif_energy", breakdown.artif_energy},
      {"sdr_capped", sdr_capped},
      {"sir_capped", sir_capped},
  };
  return j.dump(2);
}

Summary summarize(const std::vector<SeparationReport>& reports) {
  if (reports.empty()) throw Error(errc::kEmptyInput, "summarize: no reports");
  auto moments = [&](auto value, auto capped) {
    Moments m;
    double sum = 0.0;
    for (const auto& r : reports) {
      if (capped(r)) {
        ++m.capped;
      } else {
        sum += value(r);
        ++m.count;
      }
    }
    if (m.count == 0) {
      m.mean = std::numeric_limits<double>::quiet_NaN();
      return m;
    }
    m.mean = sum / double(m.count);
    double var = 0.0;
    for (const auto& r : reports)
      if (!capped(r)) var += (value(r) - m.mean) * (value(r) - m.mean);
    m.std = std::sqrt(var / double(m.count));
    return m;
  };
  Summary s;
  s.sdr = moments([](const SeparationReport& r) { return r.sdr_db; },
                  [](const SeparationReport& r) { return r.sdr_capped; });
  s.sir = moments([](const SeparationReport& r) { return r.sir_db; },
                  [](const SeparationReport& r) { return r.sir_capped; });
  return s;
}

std::string Summary::to_json() const {
  auto m = [](const Moments& x) {
    nlohmann::ordered_json j;
    j["mean"] = std::isfinite(x.mean) ? nlohmann::ordered_json(x.mean) : nlohmann::ordered_json(nullptr);
    j["std"] = x.std;
    j["count"] = x.count;
    j["capped"] = x.capped;
    return j;
  };
  nlohmann::ordered_json j;
  j["sdr_db"] = m(sdr);
  j["sir_db"] = m(sir);
  return j.dump(2);
}

}  // namespace vovit::metrics
