#pragma once

// Basis pursuit denoise
//
//   minimize ||z||_1  subject to  ||y - A z||_2 <= epsilon
//
// solved by root finding on the Pareto curve phi(tau) = ||y - A x_tau||_2,
// where x_tau solves the l1-constrained least-squares problem
//
//   minimize ||y - A x||_2  subject to  ||x||_1 <= tau.
//
// Each subproblem is handled by spectral projected gradient with a
// nonmonotone line search and exact l1-ball projection. phi is convex and
// nonincreasing with phi'(tau) = -||A^T r||_inf / ||r||_2, so tau is updated
// with Newton steps once the current subproblem is solved accurately enough
// to trust the sign of phi(tau) - epsilon.

#include <cstddef>
#include <span>

#include "corrcs/matrix.hpp"

namespace corrcs {

struct BpdnProblem {
  const Matrix& system_matrix;
  std::span<const double> observed;
  double epsilon = 0.0;

  void validate() const;
};

struct SolverReport {
  Vector solution;
  double residual_norm = 0.0;  ///< ||y - A * solution||_2 with A the problem's matrix
  double l1_norm = 0.0;
  int iterations = 0;
  bool converged = false;

  // Diagnostics.
  double constraint_residual = 0.0;  ///< residual of the constraint actually solved
  double tau = 0.0;                  ///< final l1 radius of the inner problem
  double relative_gap = 0.0;         ///< final relative duality gap of the inner problem
  int matvecs = 0;
  int newton_steps = 0;
};

struct BpdnOptions {
  double root_tolerance = 1e-5;  ///< accept |  ||r|| - eps | <= root_tolerance * eps
  double gap_tolerance = 1e-6;   ///< relative duality gap of the inner problem
  int max_matvecs = 10000;
  int line_search_memory = 10;
  double step_min = 1e-16;
  double step_max = 1e16;
};

/// sqrt(M + 2 sqrt(2M)) * sigma.
double epsilon_rule(std::size_t m, double sigma);

/// Plain BPDN.
SolverReport solve_bpdn(const BpdnProblem& problem, const BpdnOptions& options = {});

/// BPDN with the constraint ||y - alpha A z||_2 <= epsilon.
SolverReport solve_scaled_matrix(const BpdnProblem& problem, double alpha,
                                 const BpdnOptions& options = {});

/// Plain BPDN followed by division of the solution by beta.
SolverReport solve_post_scaled(const BpdnProblem& problem, double beta,
                               const BpdnOptions& options = {});

/// Applies `1 / beta` to a plain-BPDN report (no new solve); used when one
/// inner solution is reused for several scale factors.
SolverReport rescale_report(const SolverReport& plain, const BpdnProblem& problem, double beta);

}  // namespace corrcs
