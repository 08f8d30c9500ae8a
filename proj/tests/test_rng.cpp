#include <doctest.h>

#include <stdexcept>

#include "corrcs/matrix.hpp"
#include "corrcs/rng.hpp"

using namespace corrcs;

TEST_CASE("derived seeds depend on every coordinate") {
  const auto base = derive_seed(1, {1000, 200, 1, 0, 0});
  CHECK(base == derive_seed(1, {1000, 200, 1, 0, 0}));
  CHECK(base != derive_seed(2, {1000, 200, 1, 0, 0}));
  CHECK(base != derive_seed(1, {1000, 200, 1, 1, 0}));
  CHECK(base != derive_seed(1, {1000, 200, 1, 0, 1}));
  CHECK(base != derive_seed(1, {1000, 200, 1, 0}));
}

TEST_CASE("streams are reproducible") {
  Rng a = make_stream(7, {1, 2});
  Rng b = make_stream(7, {1, 2});
  Vector x(100), y(100);
  fill_gaussian(a, x);
  fill_gaussian(b, y);
  CHECK(x == y);
}

TEST_CASE("zero standard deviation gives zeros") {
  Rng a(1);
  Vector x(10, 5.0);
  fill_gaussian(a, x, 0.0);
  for (double v : x) CHECK(v == 0.0);
}
