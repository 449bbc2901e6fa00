// Copyright 2026 The vovit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "vovit/error.hpp"
#include "vovit/metrics.hpp"

using namespace vovit;
using namespace vovit::metrics;
using spectral::Waveform;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Gram-Schmidt on random vectors: k orthonormal vectors of length n.
std::vector<std::vector<double>> orthonormal(std::mt19937_64& rng, std::size_t k, std::size_t n) {
  std::vector<std::vector<double>> out;
  while (out.size() < k) {
    auto v = oracle::random_signal(rng, n);
    for (const auto& u : out) {
      const double p = dot(v, u);
      for (std::size_t i = 0; i < n; ++i) v[i] -= p * u[i];
    }
    const double norm = std::sqrt(dot(v, v));
    for (auto& x : v) x /= norm;
    out.push_back(v);
  }
  return out;
}

Waveform wave(std::vector<double> s) { return Waveform{std::move(s), 16000}; }

std::vector<double> combo(const std::vector<std::pair<double, const std::vector<double>*>>& terms) {
  std::vector<double> out(terms.front().second->size(), 0.0);
  for (const auto& [c, v] : terms)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * (*v)[i];
  return out;
}

SeparationReport with_sdr(double sdr, double sir, bool capped = false) {
  SeparationReport r;
  r.sdr_db = sdr;
  r.sir_db = sir;
  r.sdr_capped = capped;
  return r;
}

}  // namespace

TEST_CASE("perfect estimate is capped") {
  std::mt19937_64 rng(71);
  const auto s1 = oracle::random_signal(rng, 2000), s2 = oracle::random_signal(rng, 2000);
  const auto r = evaluate(wave(s1), {wave(s1), wave(s2)}, 0);
  CHECK(r.sdr_db == kCapDb);
  CHECK(r.sir_db == kCapDb);
  CHECK(r.sdr_capped);
  CHECK(r.capped());
  CHECK(r.n == 2000);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["capped"].get<bool>());
  CHECK(j["sdr_db"].get<double>() == kCapDb);
}

TEST_CASE("orthogonal construction: 20 dB SIR and closed-form SDR") {
  std::mt19937_64 rng(72);
  const auto b = orthonormal(rng, 3, 1500);
  const double a = 0.1, e = 0.05;
  const auto est = combo({{1.0, &b[0]}, {a, &b[1]}, {e, &b[2]}});
  const auto r = evaluate(wave(est), {wave(b[0]), wave(b[1])}, 0);
  CHECK(r.sir_db == doctest::Approx(20.0).epsilon(1e-9));
  CHECK(r.sdr_db == doctest::Approx(10.0 * std::log10(1.0 / (a * a + e * e))).epsilon(1e-9));
  CHECK_FALSE(r.capped());
  CHECK(r.per_source_gain[0] == doctest::Approx(1.0));
  CHECK(r.per_source_gain[1] == doctest::Approx(a));
}

TEST_CASE("non-orthogonal references against a 2x2 normal-equation oracle") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 800;
    const auto s1 = oracle::random_signal(rng, n);
    auto s2 = oracle::random_signal(rng, n);
    for (std::size_t i = 0; i < n; ++i) s2[i] += 0.4 * s1[i];
    const auto noise = oracle::random_signal(rng, n, 0.3);
    const double g1 = oracle::uniform(rng, 0.5, 1.5), g2 = oracle::uniform(rng, -0.5, 0.5);
    std::vector<double> est(n);
    for (std::size_t i = 0; i < n; ++i) est[i] = g1 * s1[i] + g2 * s2[i] + noise[i];

    const double a11 = dot(s1, s1), a12 = dot(s1, s2), a22 = dot(s2, s2);
    const double b1 = dot(est, s1), b2 = dot(est, s2);
    const double det = a11 * a22 - a12 * a12;
    const double c1 = (b1 * a22 - b2 * a12) / det, c2 = (a11 * b2 - a12 * b1) / det;
    const double t = b1 / a11;
    std::vector<double> target(n), interf(n), artif(n);
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = t * s1[i];
      const double proj = c1 * s1[i] + c2 * s2[i];
      interf[i] = proj - target[i];
      artif[i] = est[i] - proj;
    }
    const double tt = dot(target, target), ii = dot(interf, interf), aa = dot(artif, artif);
    std::vector<double> err(n);
    for (std::size_t i = 0; i < n; ++i) err[i] = interf[i] + artif[i];
    const auto r = evaluate(wave(est), {wave(s1), wave(s2)}, 0);
    CHECK(r.sdr_db == doctest::Approx(10.0 * std::log10(tt / dot(err, err))).epsilon(1e-8));
    CHECK(r.sir_db == doctest::Approx(10.0 * std::log10(tt / ii)).epsilon(1e-8));
    CHECK(r.breakdown.artif_energy == doctest::Approx(aa).epsilon(1e-8));
    CHECK(r.per_source_gain[0] == doctest::Approx(c1).epsilon(1e-8));
    CHECK(r.per_source_gain[1] == doctest::Approx(c2).epsilon(1e-8));
  }
}

TEST_CASE("scale invariance and target index") {
  std::mt19937_64 rng(74);
  const auto s1 = oracle::random_signal(rng, 1200), s2 = oracle::random_signal(rng, 1200);
  const auto noise = oracle::random_signal(rng, 1200, 0.2);
  std::vector<double> est(1200);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] = s1[i] + 0.3 * s2[i] + noise[i];
  const auto base = evaluate(wave(est), {wave(s1), wave(s2)}, 0);
  for (double c : {0.01, 3.0, -2.0}) {
    std::vector<double> scaled(est);
    for (auto& v : scaled) v *= c;
    const auto r = evaluate(wave(scaled), {wave(s1), wave(s2)}, 0);
    CHECK(r.sdr_db == doctest::Approx(base.sdr_db).epsilon(1e-9));
    CHECK(r.sir_db == doctest::Approx(base.sir_db).epsilon(1e-9));
  }
  const auto other = evaluate(wave(est), {wave(s1), wave(s2)}, 1);
  CHECK(other.target_index == 1);
  CHECK(other.sdr_db < base.sdr_db);
  CHECK_THROWS_AS(evaluate(wave(est), {wave(s1), wave(s2)}, 2), Error);
}

TEST_CASE("breakdown energies are an orthogonal split of the estimate") {
  std::mt19937_64 rng(75);
  const auto s1 = oracle::random_signal(rng, 900), s2 = oracle::random_signal(rng, 900);
  auto est = oracle::random_signal(rng, 900);
  for (std::size_t i = 0; i < est.size(); ++i) est[i] += s1[i];
  const auto r = evaluate(wave(est), {wave(s1), wave(s2)}, 0);
  const auto& b = r.breakdown;
  const double target = b.target_gain * b.target_gain * dot(s1, s1);
  CHECK(target + b.interf_energy + b.artif_energy == doctest::Approx(b.estimate_energy).epsilon(1e-9));
  CHECK(b.estimate_energy == doctest::Approx(dot(est, est)).epsilon(1e-12));
}

TEST_CASE("error contract") {
  std::mt19937_64 rng(76);
  const auto s1 = oracle::random_signal(rng, 500);
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  CHECK(code_of([&] { evaluate(wave(s1), {wave(s1), wave(std::vector<double>(s1.begin(), s1.end() - 1))}, 0); }) ==
        errc::kLengthMismatch);
  CHECK(code_of([&] { evaluate(wave({}), {wave({})}, 0); }) == errc::kEmptyInput);
  CHECK(code_of([&] { evaluate(wave(s1), {}, 0); }) == errc::kEmptyInput);
  CHECK(code_of([&] { evaluate(wave(s1), {Waveform{s1, 8000}}, 0); }) == errc::kSampleRateMismatch);
  std::vector<double> twice(s1);
  for (auto& v : twice) v *= 2.0;
  CHECK(code_of([&] { evaluate(wave(s1), {wave(s1), wave(twice)}, 0); }) == errc::kRankDeficient);
  CHECK(code_of([&] { evaluate(wave(s1), {wave(std::vector<double>(500, 0.0))}, 0); }) == errc::kRankDeficient);
}

TEST_CASE("batch matches sequential evaluation") {
  std::mt19937_64 rng(77);
  std::vector<EvalJob> jobs;
  for (int i = 0; i < 6; ++i) {
    const auto s1 = oracle::random_signal(rng, 700), s2 = oracle::random_signal(rng, 700);
    auto est = oracle::random_signal(rng, 700, 0.5);
    for (std::size_t k = 0; k < est.size(); ++k) est[k] += s1[k];
    jobs.push_back({wave(est), {wave(s1), wave(s2)}, 0});
  }
  const auto batch = evaluate_batch(jobs);
  REQUIRE(batch.size() == jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i)
    CHECK(batch[i].sdr_db == evaluate(jobs[i].est, jobs[i].refs, 0).sdr_db);
}

TEST_CASE("summaries") {
  const auto s = summarize({with_sdr(8.0, 18.0), with_sdr(12.0, 22.0)});
  CHECK(s.sdr.mean == doctest::Approx(10.0));
  CHECK(s.sdr.std == doctest::Approx(2.0));
  CHECK(s.sir.mean == doctest::Approx(20.0));
  CHECK(s.sdr.count == 2);

  const std::vector<double> xs{1.5, -3.0, 7.25, 4.0, 0.5};
  std::vector<SeparationReport> reports;
  for (double x : xs) reports.push_back(with_sdr(x, x));
  reports.push_back(with_sdr(kCapDb, kCapDb, true));
  double mean = 0.0;
  for (double x : xs) mean += x / double(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean) / double(xs.size());
  const auto t = summarize(reports);
  CHECK(t.sdr.mean == doctest::Approx(mean));
  CHECK(t.sdr.std == doctest::Approx(std::sqrt(var)));
  CHECK(t.sdr.count == xs.size());
  CHECK(t.sdr.capped == 1);
  const auto j = nlohmann::json::parse(t.to_json());
  CHECK(j["sdr_db"]["count"].get<std::size_t>() == xs.size());

  CHECK_THROWS_AS(summarize({}), Error);
}
