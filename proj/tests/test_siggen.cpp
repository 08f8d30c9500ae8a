#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "corrcs/kernels.hpp"
#include "corrcs/siggen.hpp"
#include "corrcs/stats.hpp"

using namespace corrcs;

TEST_CASE("signal support size is exactly K") {
  for (std::uint64_t t = 0; t < 50; ++t) {
    InstanceConfig ic{100, 40, 7, 9, t};
    Rng r = ic.stream(StreamTag::kSignal);
    CHECK(generate_signal(ic, r).sparsity() == 7);
  }
}

TEST_CASE("signal boundary cases") {
  InstanceConfig zero{20, 10, 0, 1, 0};
  Rng r0 = zero.stream(StreamTag::kSignal);
  const auto z = generate_signal(zero, r0);
  CHECK(z.sparsity() == 0);
  CHECK(kernels::norm1(z.values()) == 0.0);

  InstanceConfig dense{20, 20, 20, 1, 0};
  Rng r1 = dense.stream(StreamTag::kSignal);
  CHECK(generate_signal(dense, r1).sparsity() == 20);

  InstanceConfig first{1000, 200, 1, 1, 0};
  Rng r2 = first.stream(StreamTag::kSignal);
  CHECK(generate_signal(first, r2).sparsity() == 1);

  Rng r3 = first.stream(StreamTag::kSignal);
  CHECK(kernels::norm2(generate_signal(first, r3, true).values()) == doctest::Approx(1.0));
}

TEST_CASE("invalid instance configs are rejected") {
  CHECK_THROWS_AS((InstanceConfig{10, 5, 11, 1, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((InstanceConfig{10, 11, 1, 1, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((InstanceConfig{10, 0, 0, 1, 0}.validate()), std::invalid_argument);
}

TEST_CASE("ensemble entries are N(0, 1/M)") {
  InstanceConfig ic{1000, 1000, 1, 5, 0};
  Rng r = ic.stream(StreamTag::kEnsemble);
  const SensingEnsemble e = generate_ensemble(ic, r);
  const auto d = e.measurement_matrix().data();
  CHECK(std::abs(stats::mean(d)) < 0.001);
  const double var = stats::sample_stddev(d) * stats::sample_stddev(d);
  CHECK(std::abs(var * 1000 - 1.0) < 0.02);
  CHECK(e.system_matrix() == e.measurement_matrix());
  CHECK(e.dictionary() == Matrix::identity(1000));
}

TEST_CASE("instances are reproducible and independent of call order") {
  InstanceConfig a{200, 50, 5, 42, 3};
  InstanceConfig b{200, 50, 5, 42, 4};
  Rng ra1 = a.stream(StreamTag::kSignal);
  const auto first = generate_signal(a, ra1);
  Rng rb = b.stream(StreamTag::kSignal);
  const auto other = generate_signal(b, rb);
  Rng ra2 = a.stream(StreamTag::kSignal);
  const auto again = generate_signal(a, ra2);
  CHECK(std::equal(first.values().begin(), first.values().end(), again.values().begin()));
  CHECK(!std::equal(first.values().begin(), first.values().end(), other.values().begin()));

  Rng e1 = a.stream(StreamTag::kEnsemble), e2 = a.stream(StreamTag::kEnsemble);
  CHECK(generate_ensemble(a, e1).system_matrix() == generate_ensemble(a, e2).system_matrix());
}

TEST_CASE("paper grid") {
  const auto g = paper_grid();
  REQUIRE(g.size() == 9);
  CHECK(g.front() == GridPoint{1000, 200, 1});
  CHECK(g.back() == GridPoint{1000, 1000, 542});
  const std::size_t ks[] = {1, 17, 41, 73, 115, 167, 235, 330, 542};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(g[i].n == 1000);
    CHECK(g[i].m == 200 + 100 * i);
    CHECK(g[i].k == ks[i]);
  }
}
