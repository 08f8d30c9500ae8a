#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "corrcs/kernels.hpp"
#include "corrcs/rng.hpp"

using namespace corrcs;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  Vector data(r * c);
  fill_gaussian(rng, data);
  return Matrix(r, c, std::move(data));
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  fill_gaussian(rng, v);
  return v;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("gemv and gemv_t agree with the serial reference") {
  // Large enough to take the parallel path when threads are available.
  for (auto [r, c] : {std::pair<std::size_t, std::size_t>{3, 5}, {200, 1000}, {517, 333}}) {
    const Matrix a = random_matrix(r, c, 11 + r);
    const Vector x = random_vector(c, 5);
    const Vector y = random_vector(r, 6);
    Vector fast(r), slow(r), fast_t(c), slow_t(c);
    kernels::gemv(a, x, fast);
    kernels::reference::gemv(a, x, slow);
    kernels::gemv_t(a, y, fast_t);
    kernels::reference::gemv_t(a, y, slow_t);
    CHECK(max_abs_diff(fast, slow) < 1e-12);
    CHECK(max_abs_diff(fast_t, slow_t) < 1e-12);
  }
}

TEST_CASE("gemm agrees with the serial reference") {
  const Matrix a = random_matrix(40, 70, 1);
  const Matrix b = random_matrix(70, 30, 2);
  const Matrix fast = kernels::gemm(a, b);
  const Matrix slow = kernels::reference::gemm(a, b);
  CHECK(max_abs_diff(fast.data(), slow.data()) < 1e-12);
}

TEST_CASE("kernels are bit-identical across thread counts") {
  const Matrix a = random_matrix(300, 400, 3);
  const Vector x = random_vector(400, 4);
  const Vector y = random_vector(300, 5);
  const int saved = kernels::max_threads();
  kernels::set_threads(1);
  Vector one(300), one_t(400);
  kernels::gemv(a, x, one);
  kernels::gemv_t(a, y, one_t);
  kernels::set_threads(4);
  Vector four(300), four_t(400);
  kernels::gemv(a, x, four);
  kernels::gemv_t(a, y, four_t);
  kernels::set_threads(saved);
  CHECK(one == four);
  CHECK(one_t == four_t);
}

TEST_CASE("vector reductions") {
  const Vector v{3.0, -4.0, 0.0};
  CHECK(kernels::norm2(v) == doctest::Approx(5.0));
  CHECK(kernels::norm1(v) == doctest::Approx(7.0));
  CHECK(kernels::norm_inf(v) == doctest::Approx(4.0));
  CHECK(kernels::dot(v, v) == doctest::Approx(25.0));
  Vector y{1.0, 1.0, 1.0};
  kernels::axpy(2.0, v, y);
  CHECK(y == Vector{7.0, -7.0, 1.0});
}

TEST_CASE("dimension mismatches are rejected") {
  const Matrix a(2, 3, 1.0);
  Vector x(2), out(2);
  CHECK_THROWS_AS(kernels::gemv(a, x, out), std::invalid_argument);
}
