#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>
#include <vector>

#include "corrcs/experiments.hpp"
#include "corrcs/stats.hpp"

using namespace corrcs;

TEST_CASE("summary statistics") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  CHECK(stats::pairwise_sum(v) == 66.0);
  CHECK(stats::mean(v) == 6.0);
  CHECK(stats::sample_stddev(v) == doctest::Approx(std::sqrt(11.0)));
  CHECK(stats::z99() == doctest::Approx(2.5758).epsilon(1e-4));
  CHECK(stats::ci99_halfwidth(v) == doctest::Approx(2.5758293 * std::sqrt(11.0) / std::sqrt(11.0)).epsilon(1e-6));
  CHECK(stats::sample_stddev(std::vector<double>{4.0}) == 0.0);
}

TEST_CASE("nmse examples") {
  const Vector t{1.0, 0.0};
  CHECK(nmse(t, t) == 0.0);
  CHECK(nmse(Vector{0.5, 0.0}, t) == doctest::Approx(0.25));
  CHECK(nmse(Vector{0.0, 0.0}, t) == 1.0);
  CHECK_THROWS_AS(nmse(t, Vector{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(nmse(t, Vector{1.0}), std::invalid_argument);
}

TEST_CASE("improvement in dB") {
  CHECK(improvement_db(0.3, 0.3) == 0.0);
  CHECK(improvement_db(1.0, 0.1) == doctest::Approx(10.0));
  CHECK(improvement_db(0.29, 0.1212) == doctest::Approx(3.789).epsilon(1e-3));
  CHECK_THROWS_AS(improvement_db(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(improvement_db(1.0, -1.0), std::invalid_argument);
}
