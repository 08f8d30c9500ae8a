#pragma once

#include <functional>
#include <vector>

namespace corrcs {

struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  std::vector<double> init_point;
  double init_spread = 0.2;     ///< relative offset of the initial vertices, per coordinate
  double tol = 1e-3;            ///< relative simplex diameter at convergence
  int max_evals = 400;
  /// Per-coordinate lower bounds; vertices below are moved to bound + 1e-9.
  std::vector<double> lower_bounds;

  void validate() const;
};

struct SimplexResult {
  std::vector<double> point;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> best_history;  ///< best value after each iteration
};

using Objective = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead downhill simplex.
SimplexResult minimize(const Objective& objective, const SimplexConfig& config);

struct BetaEpsilonOptimum {
  double beta = 0.0;
  double epsilon = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Two-parameter form; the search is confined to beta > 0, epsilon >= 0.
BetaEpsilonOptimum minimize(const std::function<double(double, double)>& objective, SimplexConfig config);

}  // namespace corrcs
