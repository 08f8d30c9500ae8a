#include "corrcs/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace corrcs {

namespace {

constexpr double kBoundaryOffset = 1e-9;

struct Vertex {
  std::vector<double> x;
  double f = 0.0;
};

}  // namespace

void SimplexConfig::validate() const {
  if (!(reflection > 0.0)) throw std::invalid_argument("SimplexConfig: reflection must be > 0");
  if (!(expansion > 1.0)) throw std::invalid_argument("SimplexConfig: expansion must be > 1");
  if (!(contraction > 0.0 && contraction < 1.0)) throw std::invalid_argument("SimplexConfig: contraction must be in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("SimplexConfig: shrink must be in (0, 1)");
  if (init_point.empty()) throw std::invalid_argument("SimplexConfig: empty init_point");
  if (!(init_spread > 0.0)) throw std::invalid_argument("SimplexConfig: init_spread must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("SimplexConfig: tol must be > 0");
  if (max_evals < static_cast<int>(init_point.size()) + 1) throw std::invalid_argument("SimplexConfig: max_evals too small");
  if (!lower_bounds.empty() && lower_bounds.size() != init_point.size()) {
    throw std::invalid_argument("SimplexConfig: lower_bounds size mismatch");
  }
}

SimplexResult minimize(const Objective& objective, const SimplexConfig& config) {
  config.validate();
  const std::size_t dim = config.init_point.size();
  SimplexResult result;

  auto confine = [&](std::vector<double>& x) {
    if (config.lower_bounds.empty()) return;
    for (std::size_t c = 0; c < dim; ++c) {
      if (x[c] <= config.lower_bounds[c]) x[c] = config.lower_bounds[c] + kBoundaryOffset;
    }
  };
  auto evaluate = [&](std::vector<double> x) {
    confine(x);
    ++result.evaluations;
    double f = objective(x);
    if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
    return Vertex{std::move(x), f};
  };

  std::vector<Vertex> simplex;
  simplex.reserve(dim + 1);
  simplex.push_back(evaluate(config.init_point));
  if (!std::isfinite(simplex[0].f)) {
    throw std::invalid_argument("minimize: objective is not finite at the initial point");
  }
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<double> x = config.init_point;
    x[c] = x[c] != 0.0 ? x[c] * (1.0 + config.init_spread) : 0.00025;
    simplex.push_back(evaluate(std::move(x)));
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (true) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    result.best_history.push_back(simplex[0].f);

    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double scale = std::max(std::abs(simplex[0].x[c]), 1e-12);
        diameter = std::max(diameter, std::abs(simplex[i].x[c] - simplex[0].x[c]) / scale);
      }
    }
    if (diameter < config.tol) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= config.max_evals) break;

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t c = 0; c < dim; ++c) centroid[c] += simplex[i].x[c] / static_cast<double>(dim);
    }
    const Vertex& worst = simplex[dim];
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t c = 0; c < dim; ++c) x[c] = centroid[c] + t * (worst.x[c] - centroid[c]);
      return x;
    };

    Vertex reflected = evaluate(along(-config.reflection));
    bool do_shrink = false;
    if (reflected.f < simplex[0].f) {
      Vertex expanded = evaluate(along(-config.reflection * config.expansion));
      simplex[dim] = expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
    } else if (reflected.f < simplex[dim - 1].f) {
      simplex[dim] = std::move(reflected);
    } else if (reflected.f < worst.f) {
      Vertex outside = evaluate(along(-config.reflection * config.contraction));
      if (outside.f <= reflected.f) {
        simplex[dim] = std::move(outside);
      } else {
        do_shrink = true;
      }
    } else {
      Vertex inside = evaluate(along(config.contraction));
      if (inside.f < worst.f) {
        simplex[dim] = std::move(inside);
      } else {
        do_shrink = true;
      }
    }
    if (do_shrink) {
      for (std::size_t i = 1; i <= dim; ++i) {
        std::vector<double> x(dim);
        for (std::size_t c = 0; c < dim; ++c) {
          x[c] = simplex[0].x[c] + config.shrink * (simplex[i].x[c] - simplex[0].x[c]);
        }
        simplex[i] = evaluate(std::move(x));
      }
    }
  }

  result.point = simplex[0].x;
  result.value = simplex[0].f;
  return result;
}

BetaEpsilonOptimum minimize(const std::function<double(double, double)>& objective, SimplexConfig config) {
  if (config.init_point.size() != 2) throw std::invalid_argument("minimize: expected a (beta, epsilon) init point");
  if (config.lower_bounds.empty()) config.lower_bounds = {0.0, 0.0};
  const SimplexResult r = minimize([&](const std::vector<double>& p) { return objective(p[0], p[1]); }, config);
  return {r.point[0], r.point[1], r.value, r.evaluations, r.converged};
}

}  // namespace corrcs
