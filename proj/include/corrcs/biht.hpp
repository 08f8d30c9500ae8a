#pragma once

// Binary iterative hard thresholding for 1-bit measurements signs = sign(A x):
//
//   a     <- x + (step / 2) * A^T (signs - sign(A x))
//   x     <- keep the k largest-magnitude entries of a
//
// until sign(A x) == signs or the iteration cap. sign(0) is +1. The returned
// estimate is normalized to unit l2 norm (amplitude is not observable).

#include <cstddef>
#include <span>
#include <vector>

#include "corrcs/bpdn.hpp"
#include "corrcs/matrix.hpp"

namespace corrcs {

struct BihtProblem {
  const Matrix& system_matrix;
  std::span<const double> signs;  ///< entries are -1 or +1
  std::size_t k = 1;
  int max_iterations = 300;
  double step_size = 1.0;
  /// Starting point; empty means the zero vector.
  std::span<const double> initial = {};

  void validate() const;
};

/// sign with sign(0) = +1.
inline double one_bit(double v) noexcept { return v < 0.0 ? -1.0 : 1.0; }

/// Elementwise one_bit.
Vector sign_measurements(std::span<const double> v);

/// Keeps the k largest magnitudes (lowest index wins ties) and zeroes the rest.
Vector hard_threshold(std::span<const double> v, std::size_t k);

/// On non-convergence the iterate with the fewest sign mismatches is returned.
SolverReport solve_biht(const BihtProblem& problem);

}  // namespace corrcs
