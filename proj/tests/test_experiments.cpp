#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "corrcs/experiments.hpp"
#include "corrcs/kernels.hpp"
#include "corrcs/stats.hpp"

using namespace corrcs;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.grid = {{200, 60, 3}, {200, 80, 10}};
  c.trials = 24;
  c.methods = {Method::kBpdn, Method::kBpdnScale, Method::kBpdnBeta, Method::kBpdnPrescale, Method::kBiht};
  c.retain_trials = true;
  c.gain_fit_samples = 20'000;
  return c;
}

bool identical(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    for (std::size_t j = 0; j < a.points[i].methods.size(); ++j) {
      const auto& x = a.points[i].methods[j];
      const auto& y = b.points[i].methods[j];
      if (x.per_trial != y.per_trial || x.mean_nmse != y.mean_nmse || x.ci99 != y.ci99) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("aggregates are consistent with per-trial values") {
  const auto r = run_experiment(small_config());
  for (const auto& p : r.points) {
    for (const auto& s : p.methods) {
      REQUIRE(s.per_trial.size() == 24);
      CHECK(s.trials == 24);
      CHECK(s.mean_nmse == stats::mean(s.per_trial));
      const double ci = 2.5758293035489 * stats::sample_stddev(s.per_trial) / std::sqrt(24.0);
      CHECK(s.ci99 == doctest::Approx(ci).epsilon(1e-9));
    }
  }
}

TEST_CASE("runs are bit-identical across reruns and worker counts") {
  for (NoiseMode mode : {NoiseMode::kArtificial, NoiseMode::kLloydMax, NoiseMode::kUniform}) {
    auto c = small_config();
    c.noise_mode = mode;
    c.bits = 3;
    const int saved = kernels::max_threads();
    kernels::set_threads(1);
    const auto a = run_experiment(c);
    kernels::set_threads(3);
    const auto b = run_experiment(c);
    kernels::set_threads(saved);
    const auto d = run_experiment(c);
    CHECK(identical(a, b));
    CHECK(identical(a, d));
  }
}

TEST_CASE("methods coincide where the model says they must") {
  auto c = small_config();
  c.alpha = 1.0;
  c.methods = {Method::kBpdn, Method::kBpdnScale, Method::kBpdnBeta};
  c.sigma_w_ratio = 0.05;
  // With alpha = 1 the rule radius from sigma_r is zero for every method.
  c.epsilon_mode = EpsilonMode::kExplicit;
  c.explicit_epsilon = 0.01;
  const auto r = run_experiment(c);
  for (const auto& p : r.points) {
    CHECK(p.at(Method::kBpdn).per_trial == p.at(Method::kBpdnScale).per_trial);
    CHECK(p.at(Method::kBpdn).per_trial == p.at(Method::kBpdnBeta).per_trial);
  }
}

TEST_CASE("a different seed stays within the union of the 99% intervals") {
  ExperimentConfig c;
  for (std::size_t k = 2; k <= 12; k += 2) {
    c.grid.push_back({160, 60, k});
    c.grid.push_back({160, 90, k});
  }
  c.trials = 40;
  c.methods = {Method::kBpdnScale};
  auto d = c;
  d.master_seed = 99;
  const auto a = run_experiment(c), b = run_experiment(d);
  int agree = 0;
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    const auto& x = a.points[i].at(Method::kBpdnScale);
    const auto& y = b.points[i].at(Method::kBpdnScale);
    agree += std::abs(x.mean_nmse - y.mean_nmse) <= x.ci99 + y.ci99;
  }
  CHECK(agree >= static_cast<int>(std::ceil(0.95 * c.grid.size())));
}

TEST_CASE("quantized and artificial noise agree within 1 dB at 3 and 5 bits") {
  for (int bits : {3, 5}) {
    ExperimentConfig art;
    art.grid = {{1000, 200, 1}, {1000, 400, 41}};
    art.trials = 1000;
    art.bits = bits;
    art.methods = {Method::kBpdnScale};
    auto lm = art;
    lm.noise_mode = NoiseMode::kLloydMax;
    lm.gain_fit_samples = 200'000;
    const auto a = run_experiment(art), q = run_experiment(lm);
    for (std::size_t i = 0; i < art.grid.size(); ++i) {
      const double pa = a.points[i].at(Method::kBpdnScale).mean_nmse;
      const double pq = q.points[i].at(Method::kBpdnScale).mean_nmse;
      CAPTURE(bits);
      CAPTURE(i);
      MESSAGE(bits, " bits, point ", i, ": ", improvement_db(pa, pq), " dB");
      CHECK(std::abs(improvement_db(pa, pq)) < 1.0);
    }
  }
}

TEST_CASE("NMSE does not decrease with K at fixed M") {
  ExperimentConfig c;
  for (std::size_t k : {2, 6, 12, 20, 30}) c.grid.push_back({300, 100, k});
  c.trials = 30;
  c.methods = {Method::kBpdn, Method::kBpdnScale};
  const auto r = run_experiment(c);
  for (Method m : c.methods) {
    for (std::size_t i = 1; i < c.grid.size(); ++i) {
      const auto& lo = r.points[i - 1].at(m);
      const auto& hi = r.points[i].at(m);
      CHECK(hi.mean_nmse + hi.ci99 + lo.ci99 >= lo.mean_nmse);
    }
  }
}

TEST_CASE("scaled reconstruction beats plain BPDN under correlated noise") {
  ExperimentConfig c;
  c.grid = {{1000, 200, 1}};
  c.trials = 20;
  const auto r = run_experiment(c);
  const auto& p = r.points[0];
  CHECK(improvement_db(p.at(Method::kBpdn).mean_nmse, p.at(Method::kBpdnScale).mean_nmse) > 4.0);
}

TEST_CASE("alpha defaults") {
  ExperimentConfig c;
  c.grid = {{100, 40, 2}};
  c.trials = 2;
  c.bits = 3;
  CHECK(run_experiment(c).points[0].alpha == 0.965461586);
  c.alpha = 0.9;
  CHECK(run_experiment(c).points[0].alpha == 0.9);
  c.alpha.reset();
  c.bits = 2;
  CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
  c.noise_mode = NoiseMode::kLloydMax;
  c.gain_fit_samples = 100'000;
  const double a = run_experiment(c).points[0].alpha;
  CHECK(a > 0.8);
  CHECK(a < 0.9);
}

TEST_CASE("invalid configs are rejected") {
  auto c = small_config();
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.grid = {{100, 120, 3}};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.grid = {{100, 50, 0}};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.alpha = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config();
  c.methods.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("enum names round-trip") {
  for (auto m : {Method::kBpdn, Method::kBpdnScale, Method::kBpdnBeta, Method::kBpdnPrescale, Method::kBiht}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  for (auto m : {NoiseMode::kArtificial, NoiseMode::kLloydMax, NoiseMode::kUniform}) {
    CHECK(parse_noise_mode(to_string(m)) == m);
  }
  CHECK(parse_epsilon_mode("rule-eq13") == EpsilonMode::kRule);
  CHECK_THROWS_AS(parse_method("lasso"), std::invalid_argument);
}

TEST_CASE("phase sweep skips empty sparsity and stops columns at the cutoff") {
  PhaseSweepConfig c;
  c.n = 60;
  c.delta_step = 0.25;
  c.rho_step = 0.1;
  c.trials = 6;
  c.nmse_cutoff = 0.5;
  c.gain_fit_samples = 20'000;
  const auto r = run_phase_sweep(c);
  REQUIRE_FALSE(r.cells.empty());
  for (const auto& cell : r.cells) {
    CHECK(cell.point.k >= 1);
    CHECK(cell.rho * cell.point.m >= 1.0);
    CHECK(cell.point.m == static_cast<std::size_t>(std::lround(cell.delta * 60)));
  }
  // Nothing is evaluated in a column after a method crossed the cutoff.
  for (Method m : c.methods) {
    for (double delta : {0.25, 0.5, 0.75, 1.0}) {
      bool crossed = false;
      for (int i = 1; i <= 10; ++i) {
        const auto* cell = r.find(delta, 0.1 * i, m);
        if (crossed) CHECK(cell == nullptr);
        if (cell && cell->stats.mean_nmse > c.nmse_cutoff) crossed = true;
      }
    }
  }
  // delta = 0.25 gives M = 15: rho = 0.1 has K = round(1.5) = 2.
  const auto* first = r.find(0.25, 0.1, Method::kBiht);
  REQUIRE(first);
  CHECK(first->point.k == 2);
}

TEST_CASE("parameter study is deterministic and improves on the defaults") {
  ParameterStudyConfig c;
  c.point = {300, 60, 2};
  c.alpha = 0.636597595;
  c.trials = 12;
  c.simplex.max_evals = 60;
  const auto a = optimize_beta_epsilon(c);
  const auto b = optimize_beta_epsilon(c);
  CHECK(a.p2 == b.p2);
  CHECK(a.beta2_ratio == b.beta2_ratio);
  CHECK(a.p2 <= a.p_alpha);
  CHECK(a.p1 > 0.0);
  CHECK(a.evaluations > 0);
}
