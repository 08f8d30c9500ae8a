#include "corrcs/bpdn.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "corrcs/kernels.hpp"
#include "corrcs/l1_projection.hpp"

namespace corrcs {

namespace {

// A * x with an optional scalar gain, counting products.
class ScaledOperator {
 public:
  ScaledOperator(const Matrix& a, double scale) : a_(a), scale_(scale) {}

  std::size_t rows() const { return a_.rows(); }
  std::size_t cols() const { return a_.cols(); }
  int products() const { return products_; }
  double entry(std::size_t i, std::size_t j) const { return scale_ * a_(i, j); }

  void apply(std::span<const double> x, std::span<double> out) {
    kernels::gemv(a_, x, out);
    scale(out);
  }
  void adjoint(std::span<const double> y, std::span<double> out) {
    kernels::gemv_t(a_, y, out);
    scale(out);
  }

 private:
  void scale(std::span<double> v) {
    ++products_;
    if (scale_ != 1.0) {
      for (double& e : v) e *= scale_;
    }
  }

  const Matrix& a_;
  double scale_;
  int products_ = 0;
};

// Face steps are tried only on small supports; the Gram matrix costs
// support^2 * rows.
constexpr std::size_t kMaxFaceSupport = 128;
constexpr int kFaceSteadyIterations = 3;

// Least squares on the face of the l1 ball holding x (fixed support and
// signs, l1 norm at most tau), taking the minimum-norm correction when the
// face is underdetermined, then the longest step towards it that keeps the
// signs. Spectral steps crawl along such faces when the restricted problem is
// badly conditioned. Returns false when no step was taken.
bool face_step(const ScaledOperator& op, std::span<const double> y, double tau, Vector& x) {
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) support.push_back(j);
  }
  const std::size_t k = support.size();
  if (k == 0 || k > kMaxFaceSupport) return false;

  const auto rows = static_cast<Eigen::Index>(op.rows());
  const auto cols = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd as(rows, cols);
  Eigen::VectorXd signs(cols), xs(cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index i = 0; i < rows; ++i) as(i, c) = op.entry(static_cast<std::size_t>(i), support[c]);
    signs(c) = x[support[c]] > 0.0 ? 1.0 : -1.0;
    xs(c) = x[support[c]];
  }
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(y.data(), rows) - as * xs;
  const double slack = std::max(0.0, tau - signs.dot(xs));

  Eigen::VectorXd dz = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(as).solve(r);
  if (signs.dot(dz) > slack) {
    // Keep the l1 norm at tau: dz = base + P v with P the projector onto s-perp.
    const Eigen::VectorXd base = (slack / signs.squaredNorm()) * signs;
    const Eigen::MatrixXd proj =
        Eigen::MatrixXd::Identity(cols, cols) - signs * signs.transpose() / signs.squaredNorm();
    dz = base + proj * Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(as * proj).solve(r - as * base);
  }
  if (!dz.allFinite()) return false;

  // Longest step along dz that stays in the orthant and in the ball.
  double t = 1.0;
  Eigen::Index blocking = -1;
  for (Eigen::Index c = 0; c < cols; ++c) {
    if (xs(c) * dz(c) < 0.0 && -xs(c) / dz(c) <= t) {
      t = -xs(c) / dz(c);
      blocking = c;
    }
  }
  const double rise = signs.dot(dz);
  if (rise > 0.0 && slack / rise < t) {
    t = slack / rise;
    blocking = -1;
  }
  if (!(t > 0.0)) return false;
  for (Eigen::Index c = 0; c < cols; ++c) x[support[c]] = xs(c) + t * dz(c);
  if (blocking >= 0) x[support[blocking]] = 0.0;
  return true;
}

double residual_norm(const Matrix& a, double scale, std::span<const double> y,
                     std::span<const double> x) {
  Vector ax(a.rows());
  kernels::gemv(a, x, ax);
  double s = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = y[i] - scale * ax[i];
    s += d * d;
  }
  return std::sqrt(s);
}

SolverReport pareto_root(ScaledOperator& op, std::span<const double> y, double epsilon,
                         const BpdnOptions& opt) {
  const std::size_t m = op.rows();
  const std::size_t n = op.cols();
  SolverReport report;
  report.solution.assign(n, 0.0);

  const double bnorm = kernels::norm2(y);
  if (epsilon >= bnorm) {
    // The origin is feasible and has the smallest possible l1 norm.
    report.constraint_residual = bnorm;
    report.converged = true;
    return report;
  }
  const double target = epsilon > 0.0 ? epsilon : 1e-12 * bnorm;
  const double root_abs = opt.root_tolerance * target + 1e-13 * bnorm;
  const double gap_floor = 1e-10 * 0.5 * bnorm * bnorm;

  Vector x(n, 0.0), r(y.begin(), y.end()), g(n), d(n), trial(n), ad(m), r_new(m), g_new(n);
  op.adjoint(r, g);
  for (double& v : g) v = -v;
  double f = 0.5 * bnorm * bnorm;

  double gnorm = kernels::norm_inf(g);
  if (gnorm == 0.0) {
    // y is orthogonal to the range of A; no z can reduce the residual.
    report.constraint_residual = bnorm;
    report.matvecs = op.products();
    return report;
  }
  // At tau = 0 the subproblem is solved exactly by x = 0, so the first
  // Newton step is exact.
  double tau = (bnorm - target) * bnorm / gnorm;
  double tau_lo = 0.0;
  double tau_hi = std::numeric_limits<double>::infinity();
  report.newton_steps = 1;

  auto projected_direction = [&](double step) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - step * g[i];
    project_l1_ball(trial, tau, d);
    for (std::size_t i = 0; i < n; ++i) d[i] -= x[i];
  };

  double step = 1.0;
  projected_direction(1.0);
  {
    const double dn = kernels::norm_inf(d);
    step = dn > 0.0 ? std::clamp(1.0 / dn, opt.step_min, opt.step_max) : 1.0;
  }

  std::deque<double> history{f};
  bool stalled = false;
  int stalls_without_progress = 0;
  double rnorm = bnorm;
  double rel_gap = 0.0;
  std::vector<signed char> face(n, 0), last_face(n, 0);
  int steady = 0;

  // Stalls and Newton updates do not cost products, so bound the passes too.
  const long max_passes = 4L * opt.max_matvecs + 100;
  for (long pass = 0; pass < max_passes; ++pass) {
    rnorm = kernels::norm2(r);
    gnorm = kernels::norm_inf(g);
    // Duality gap of the l1-constrained least-squares problem.
    const double gap = std::max(0.0, kernels::dot(r, r) - kernels::dot(r, y) + tau * gnorm);
    rel_gap = gap / std::max(f, gap_floor);
    const double misfit = rnorm - target;
    const bool root_ok = std::abs(misfit) <= root_abs;
    const bool solved = rel_gap <= opt.gap_tolerance;

    if (root_ok && (solved || (stalled && rel_gap <= 100.0 * opt.gap_tolerance))) {
      report.converged = true;
      break;
    }

    const double f_target = 0.5 * target * target;
    // Once the root has been overshot, a loose inner solve gives a slope
    // too inaccurate to land on it; insist on a solved subproblem.
    const bool early_ok = !std::isfinite(tau_hi) && gap <= 0.1 * std::abs(f - f_target);
    if (!root_ok && (solved || stalled || early_ok)) {
      if (gnorm == 0.0 && rnorm > target) break;  // least-squares limit above epsilon
      if (misfit > 0.0) {
        tau_lo = std::max(tau_lo, tau);
      } else {
        tau_hi = std::min(tau_hi, tau);
      }
      // Well past the root the curve is flat and its tangent says nothing.
      const bool flat = misfit < 0.0 && rnorm < 0.5 * target;
      double next = gnorm > 0.0 && !flat ? tau + rnorm * misfit / gnorm : 0.5 * (tau_lo + tau);
      if (!(next > tau_lo && next < tau_hi)) {
        next = std::isfinite(tau_hi) ? 0.5 * (tau_lo + tau_hi) : 2.0 * tau;
      }
      next = std::max(next, 0.0);
      ++report.newton_steps;
      const bool moved = next != tau;
      if (next < tau) {
        project_l1_ball(Vector(x), next, x);
        op.apply(x, ad);
        for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - ad[i];
        op.adjoint(r, g);
        for (double& v : g) v = -v;
        f = 0.5 * kernels::dot(r, r);
      }
      tau = next;
      history.assign(1, f);
      if (stalled) {
        stalls_without_progress = moved ? 0 : stalls_without_progress + 1;
        if (stalls_without_progress > 2) break;
      }
      stalled = false;
      if (moved) continue;
    }

    if (op.products() >= opt.max_matvecs) break;
    // Stationary at an acceptable tau but the gap will not close further.
    if (stalled && root_ok) break;

    // Spectral projected gradient step.
    projected_direction(step);
    const double gtd = kernels::dot(g, d);
    if (kernels::norm_inf(d) == 0.0 || gtd >= 0.0) {
      stalled = true;
      continue;
    }
    op.apply(d, ad);
    const double f_ref = *std::max_element(history.begin(), history.end());

    double lambda = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < m; ++i) r_new[i] = r[i] - lambda * ad[i];
      f_new = 0.5 * kernels::dot(r_new, r_new);
      if (f_new <= f_ref + 1e-4 * lambda * gtd) {
        accepted = true;
        break;
      }
      const double denom = 2.0 * (f_new - f - lambda * gtd);
      const double guess = denom > 0.0 ? -gtd * lambda * lambda / denom : 0.5 * lambda;
      lambda = std::clamp(guess, 0.1 * lambda, 0.5 * lambda);
    }
    if (!accepted && !(f_new < f)) {
      stalled = true;
      step = std::clamp(step * 0.1, opt.step_min, opt.step_max);
      continue;
    }

    op.adjoint(r_new, g_new);
    for (double& v : g_new) v = -v;
    double sts = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = lambda * d[i];
      x[i] += s;
      sts += s * s;
      sty += s * (g_new[i] - g[i]);
    }
    step = sty <= 0.0 ? opt.step_max : std::clamp(sts / sty, opt.step_min, opt.step_max);
    std::swap(r, r_new);
    std::swap(g, g_new);
    f = f_new;
    history.push_back(f);
    if (static_cast<int>(history.size()) > opt.line_search_memory) history.pop_front();
    stalled = false;
    ++report.iterations;

    for (std::size_t i = 0; i < n; ++i) face[i] = static_cast<signed char>((x[i] > 0.0) - (x[i] < 0.0));
    steady = face == last_face ? steady + 1 : 0;
    std::swap(face, last_face);
    if (steady >= kFaceSteadyIterations) {
      steady = 0;
      Vector moved(x);
      if (face_step(op, y, tau, moved)) {
        op.apply(moved, ad);
        for (std::size_t i = 0; i < m; ++i) r_new[i] = y[i] - ad[i];
        const double f_face = 0.5 * kernels::dot(r_new, r_new);
        if (f_face < f) {
          std::swap(x, moved);
          std::swap(r, r_new);
          op.adjoint(r, g);
          for (double& v : g) v = -v;
          f = f_face;
          history.push_back(f);
          if (static_cast<int>(history.size()) > opt.line_search_memory) history.pop_front();
        }
      }
    }
  }

  report.solution = std::move(x);
  report.tau = tau;
  report.relative_gap = rel_gap;
  report.matvecs = op.products();
  return report;
}

}  // namespace

void BpdnProblem::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("BpdnProblem: epsilon must be >= 0");
  if (observed.size() != system_matrix.rows()) {
    throw std::invalid_argument("BpdnProblem: observation length does not match matrix rows");
  }
  if (system_matrix.cols() == 0) throw std::invalid_argument("BpdnProblem: empty matrix");
}

double epsilon_rule(std::size_t m, double sigma) {
  if (m == 0) throw std::invalid_argument("epsilon_rule: m must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("epsilon_rule: sigma must be >= 0");
  const double md = static_cast<double>(m);
  return std::sqrt(md + 2.0 * std::sqrt(2.0 * md)) * sigma;
}

SolverReport solve_bpdn(const BpdnProblem& problem, const BpdnOptions& options) {
  return solve_scaled_matrix(problem, 1.0, options);
}

SolverReport solve_scaled_matrix(const BpdnProblem& problem, double alpha, const BpdnOptions& options) {
  problem.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("solve_scaled_matrix: alpha must be in (0, 1]");
  ScaledOperator op(problem.system_matrix, alpha);
  SolverReport report = pareto_root(op, problem.observed, problem.epsilon, options);
  report.l1_norm = kernels::norm1(report.solution);
  report.constraint_residual =
      residual_norm(problem.system_matrix, alpha, problem.observed, report.solution);
  report.residual_norm = alpha == 1.0
                             ? report.constraint_residual
                             : residual_norm(problem.system_matrix, 1.0, problem.observed, report.solution);
  return report;
}

SolverReport rescale_report(const SolverReport& plain, const BpdnProblem& problem, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_post_scaled: beta must be > 0");
  SolverReport out = plain;
  if (beta == 1.0) return out;
  for (double& v : out.solution) v /= beta;
  out.l1_norm = plain.l1_norm / beta;
  out.residual_norm = residual_norm(problem.system_matrix, 1.0, problem.observed, out.solution);
  return out;
}

SolverReport solve_post_scaled(const BpdnProblem& problem, double beta, const BpdnOptions& options) {
  if (!(beta > 0.0)) throw std::invalid_argument("solve_post_scaled: beta must be > 0");
  return rescale_report(solve_bpdn(problem, options), problem, beta);
}

}  // namespace corrcs
