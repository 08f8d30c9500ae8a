#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "corrcs/bpdn.hpp"
#include "corrcs/experiments.hpp"
#include "corrcs/kernels.hpp"
#include "corrcs/siggen.hpp"
#include "oracles.hpp"

using namespace corrcs;

namespace {

struct Instance {
  SparseSignal signal;
  SensingEnsemble ensemble;
  Vector y;
};

Instance noisy_instance(std::size_t n, std::size_t m, std::size_t k, std::uint64_t trial, double noise) {
  InstanceConfig ic{n, m, k, 77, trial};
  Rng rs = ic.stream(StreamTag::kSignal), re = ic.stream(StreamTag::kEnsemble), rn = ic.stream(StreamTag::kNoise);
  SparseSignal s = generate_signal(ic, rs);
  SensingEnsemble e = generate_ensemble(ic, re);
  Vector y = measure_noiseless(s, e);
  Vector w(m);
  fill_gaussian(rn, w, noise);
  for (std::size_t i = 0; i < m; ++i) y[i] += w[i];
  return {std::move(s), std::move(e), std::move(y)};
}

double residual(const Matrix& a, std::span<const double> y, std::span<const double> z) {
  Vector r(a.rows());
  kernels::gemv(a, z, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  return kernels::norm2(r);
}

}  // namespace

TEST_CASE("epsilon rule") {
  CHECK(epsilon_rule(200, 1.0) == doctest::Approx(std::sqrt(240.0)));
  CHECK(epsilon_rule(200, 1.0) == doctest::Approx(15.4919).epsilon(1e-5));
  CHECK(epsilon_rule(2, 1.0) == doctest::Approx(2.4495).epsilon(1e-4));
  CHECK(epsilon_rule(50, 0.0) == 0.0);
}

TEST_CASE("origin is returned when it is feasible") {
  const auto inst = noisy_instance(40, 20, 3, 0, 0.01);
  const double ynorm = kernels::norm2(inst.y);
  const auto r = solve_bpdn({inst.ensemble.system_matrix(), inst.y, ynorm * 1.01});
  CHECK(r.converged);
  CHECK(kernels::norm1(r.solution) == 0.0);
  CHECK(r.residual_norm == doctest::Approx(ynorm));
}

TEST_CASE("feasibility, Pareto root and report consistency") {
  for (std::uint64_t t = 0; t < 15; ++t) {
    const auto inst = noisy_instance(200, 80, 1 + t % 10, t, 0.05);
    const Matrix& a = inst.ensemble.system_matrix();
    const double eps = epsilon_rule(80, 0.05);
    REQUIRE(eps < kernels::norm2(inst.y));
    const auto r = solve_bpdn({a, inst.y, eps});
    CAPTURE(t);
    REQUIRE(r.converged);
    CHECK(r.residual_norm <= eps * (1 + 1e-4) + 1e-9);
    CHECK(std::abs(r.residual_norm - eps) <= 1e-3 * eps);
    CHECK(std::abs(r.residual_norm - residual(a, inst.y, r.solution)) < 1e-10);
    CHECK(std::abs(r.l1_norm - kernels::norm1(r.solution)) < 1e-10);
    CHECK(r.relative_gap < 1e-5);
  }
}

TEST_CASE("enumeration oracle finds the minimum outside the first columns") {
  // Basic solutions: (1,1,0,0) l1 2, e3 l1 1 (reached from three bases), and
  // two with l1 3.
  const Matrix a(2, 4, {1, 0, 1, 1, 0, 1, 1, -1});
  const Vector y{1, 1};
  const auto cert = oracle::min_l1_by_enumeration(a, y);
  REQUIRE(cert);
  CHECK(cert->unique);
  CHECK(cert->minimizer == Vector{0, 0, 1, 0});
}

TEST_CASE("noiseless exact recovery matches the enumeration oracle") {
  int certified = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    InstanceConfig ic{16, 8, 1, 5, t};
    Rng rs = ic.stream(StreamTag::kSignal), re = ic.stream(StreamTag::kEnsemble);
    const SparseSignal s = generate_signal(ic, rs);
    const SensingEnsemble e = generate_ensemble(ic, re);
    const Vector y = measure_noiseless(s, e);
    const auto cert = oracle::min_l1_by_enumeration(e.system_matrix(), y);
    REQUIRE(cert);
    if (!cert->unique || nmse(cert->minimizer, s.values()) > 1e-12) continue;
    ++certified;
    const auto r = solve_bpdn({e.system_matrix(), y, 1e-8});
    CHECK(nmse(r.solution, s.values()) < 1e-6);
  }
  CHECK(certified >= 10);
}

TEST_CASE("scaled-matrix and post-scaled variants") {
  const auto inst = noisy_instance(150, 60, 4, 3, 0.05);
  const Matrix& a = inst.ensemble.system_matrix();
  const double eps = epsilon_rule(60, 0.05);
  const BpdnProblem p{a, inst.y, eps};
  const auto plain = solve_bpdn(p);

  SUBCASE("alpha = 1 is plain BPDN") {
    const auto s = solve_scaled_matrix(p, 1.0);
    CHECK(s.solution == plain.solution);
  }
  SUBCASE("beta = 1 is plain BPDN") {
    const auto s = solve_post_scaled(p, 1.0);
    CHECK(s.solution == plain.solution);
  }
  SUBCASE("post scaling divides by beta") {
    const double beta = 0.6366;
    const auto s = solve_post_scaled(p, beta);
    CHECK(s.l1_norm == doctest::Approx(plain.l1_norm / beta).epsilon(1e-12));
    for (std::size_t i = 0; i < s.solution.size(); ++i) {
      CHECK(s.solution[i] == doctest::Approx(plain.solution[i] / beta).epsilon(1e-12));
    }
    CHECK(s.residual_norm == doctest::Approx(residual(a, inst.y, s.solution)).epsilon(1e-10));
    const auto again = rescale_report(plain, p, beta);
    CHECK(again.solution == s.solution);
  }
  SUBCASE("scaling A, y and epsilon together leaves the solution unchanged") {
    const double c = 0.7;
    Matrix ac = a;
    for (double& v : ac.data()) v *= c;
    Vector yc = inst.y;
    for (double& v : yc) v *= c;
    const auto s = solve_bpdn({ac, yc, c * eps});
    CHECK(nmse(s.solution, plain.solution) < 1e-6);
  }
  SUBCASE("scaled-matrix constraint holds for alpha A") {
    const double alpha = 0.8;
    const auto s = solve_scaled_matrix(p, alpha);
    REQUIRE(s.converged);
    Vector scaled = s.solution;
    for (double& v : scaled) v *= alpha;
    CHECK(residual(a, inst.y, scaled) <= eps * (1 + 1e-4) + 1e-9);
    CHECK(std::abs(s.residual_norm - residual(a, inst.y, s.solution)) < 1e-10);
    CHECK(std::abs(s.constraint_residual - residual(a, inst.y, scaled)) < 1e-10);
  }
}

TEST_CASE("true signal is feasible for the scaled constraint without w") {
  const auto inst = noisy_instance(100, 40, 3, 9, 0.0);
  const double alpha = 0.6;
  Vector y = inst.y;
  for (double& v : y) v *= alpha;
  Vector ax(40);
  kernels::gemv(inst.ensemble.system_matrix(), inst.signal.values(), ax);
  for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(y[i] - alpha * ax[i]) < 1e-14);
  const auto r = solve_scaled_matrix({inst.ensemble.system_matrix(), y, 0.0}, alpha);
  CHECK(r.l1_norm <= kernels::norm1(inst.signal.values()) * (1 + 1e-6));
}

TEST_CASE("plain BPDN NMSE at the first grid point with 1-bit-equivalent noise") {
  // Consistent with 0.1212 * 10^(7.26 / 10) = 0.645 for the unscaled method.
  ExperimentConfig c;
  c.grid = {{1000, 200, 1}};
  c.trials = 40;
  c.methods = {Method::kBpdn};
  const auto r = run_experiment(c);
  CHECK(r.points[0].at(Method::kBpdn).mean_nmse == doctest::Approx(0.645).epsilon(0.2));
}

TEST_CASE("invalid problems are rejected") {
  const Matrix a(3, 5, 1.0);
  const Vector y(3, 1.0), bad(4, 1.0);
  CHECK_THROWS_AS(solve_bpdn({a, bad, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(solve_bpdn({a, y, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(solve_scaled_matrix({a, y, 0.1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_scaled_matrix({a, y, 0.1}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(solve_post_scaled({a, y, 0.1}, 0.0), std::invalid_argument);
}

TEST_CASE("iteration cap reports non-convergence with the best iterate") {
  const auto inst = noisy_instance(300, 100, 20, 1, 0.01);
  BpdnOptions o;
  o.max_matvecs = 5;
  const auto r = solve_bpdn({inst.ensemble.system_matrix(), inst.y, epsilon_rule(100, 0.01)}, o);
  CHECK_FALSE(r.converged);
  CHECK(r.solution.size() == 300);
  CHECK(std::abs(r.residual_norm - residual(inst.ensemble.system_matrix(), inst.y, r.solution)) < 1e-10);
}
