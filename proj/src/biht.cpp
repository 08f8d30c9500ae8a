#include "corrcs/biht.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "corrcs/kernels.hpp"

namespace corrcs {

void BihtProblem::validate() const {
  if (signs.size() != system_matrix.rows()) {
    throw std::invalid_argument("BihtProblem: sign vector length does not match matrix rows");
  }
  if (k < 1 || k > system_matrix.cols()) throw std::invalid_argument("BihtProblem: need 1 <= k <= N");
  if (max_iterations < 0) throw std::invalid_argument("BihtProblem: max_iterations must be >= 0");
  if (!(step_size > 0.0)) throw std::invalid_argument("BihtProblem: step_size must be > 0");
  for (double s : signs) {
    if (s != 1.0 && s != -1.0) throw std::invalid_argument("BihtProblem: signs must be +1 or -1");
  }
  if (!initial.empty() && initial.size() != system_matrix.cols()) {
    throw std::invalid_argument("BihtProblem: initial estimate has wrong length");
  }
}

Vector sign_measurements(std::span<const double> v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), one_bit);
  return out;
}

Vector hard_threshold(std::span<const double> v, std::size_t k) {
  if (k > v.size()) throw std::invalid_argument("hard_threshold: k exceeds vector length");
  Vector out(v.size(), 0.0);
  if (k == v.size()) return Vector(v.begin(), v.end());
  if (k == 0) return out;

  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto larger = [&v](std::size_t a, std::size_t b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma != mb ? ma > mb : a < b;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), larger);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = v[order[i]];
  return out;
}

SolverReport solve_biht(const BihtProblem& problem) {
  problem.validate();
  const Matrix& a = problem.system_matrix;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  Vector x = problem.initial.empty() ? Vector(n, 0.0) : Vector(problem.initial.begin(), problem.initial.end());
  Vector ax(m), mismatch(m), grad(n);
  Vector best = x;
  std::size_t best_errors = std::numeric_limits<std::size_t>::max();

  SolverReport report;
  int it = 0;
  for (;; ++it) {
    kernels::gemv(a, x, ax);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < m; ++i) {
      mismatch[i] = problem.signs[i] - one_bit(ax[i]);
      errors += mismatch[i] != 0.0;
    }
    if (errors < best_errors) {
      best_errors = errors;
      best = x;
    }
    if (errors == 0) {
      report.converged = true;
      break;
    }
    if (it >= problem.max_iterations) break;

    kernels::gemv_t(a, mismatch, grad);
    kernels::axpy(0.5 * problem.step_size, grad, x);
    x = hard_threshold(x, problem.k);
  }

  const double norm = kernels::norm2(best);
  if (norm > 0.0) {
    for (double& v : best) v /= norm;
  }
  report.iterations = it;
  report.matvecs = 2 * it + 1;
  report.l1_norm = kernels::norm1(best);
  kernels::gemv(a, best, ax);
  double r2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) r2 += (problem.signs[i] - ax[i]) * (problem.signs[i] - ax[i]);
  // The constraint residual of sign data is the number of sign mismatches.
  report.constraint_residual = static_cast<double>(best_errors);
  report.residual_norm = std::sqrt(r2);
  report.solution = std::move(best);
  return report;
}

}  // namespace corrcs
