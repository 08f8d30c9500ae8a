#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "corrcs/kernels.hpp"
#include "corrcs/l1_projection.hpp"
#include "corrcs/rng.hpp"

using namespace corrcs;

TEST_CASE("points inside the ball are unchanged") {
  const Vector v{0.1, -0.2, 0.3};
  CHECK(project_l1_ball(v, 1.0) == v);
}

TEST_CASE("hand-worked projection") {
  // Soft threshold at 1: [3, -1, 0.5] -> [2, 0, 0].
  const Vector p = project_l1_ball(Vector{3.0, -1.0, 0.5}, 2.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.0));
  const Vector z = project_l1_ball(Vector{1.0, -2.0}, 0.0);
  CHECK(z == Vector{0.0, 0.0});
}

TEST_CASE("projection is on the boundary and satisfies the variational inequality") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(50);
    fill_gaussian(rng, v, 2.0);
    const double tau = 5.0;
    const Vector p = project_l1_ball(v, tau);
    CHECK(std::abs(kernels::norm1(p) - tau) < 1e-10);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(p[i] * v[i] >= 0.0);
      CHECK(std::abs(p[i]) <= std::abs(v[i]) + 1e-15);
    }
    // <v - p, q - p> <= 0 for feasible q.
    for (int k = 0; k < 10; ++k) {
      Vector q(50);
      fill_gaussian(rng, q);
      const double s = kernels::norm1(q);
      for (double& x : q) x *= tau / s * 0.9;
      double ip = 0.0;
      for (std::size_t i = 0; i < 50; ++i) ip += (v[i] - p[i]) * (q[i] - p[i]);
      CHECK(ip <= 1e-10);
    }
  }
}

TEST_CASE("negative radius is rejected") {
  CHECK_THROWS_AS(project_l1_ball(Vector{1.0}, -1.0), std::invalid_argument);
}
