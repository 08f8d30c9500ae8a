#include "corrcs/l1_projection.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "corrcs/kernels.hpp"

namespace corrcs {

void project_l1_ball(std::span<const double> v, double tau, std::span<double> out) {
  if (out.size() != v.size()) throw std::invalid_argument("project_l1_ball: length mismatch");
  if (!(tau >= 0.0)) throw std::invalid_argument("project_l1_ball: tau must be >= 0");

  if (kernels::norm1(v) <= tau) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  if (tau == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }

  std::vector<double> mag(v.size());
  std::transform(v.begin(), v.end(), mag.begin(), [](double x) { return std::abs(x); });
  std::sort(mag.begin(), mag.end(), std::greater<>());

  // Largest j with mag[j] > (sum_{i<=j} mag[i] - tau) / (j + 1).
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < mag.size(); ++j) {
    cumulative += mag[j];
    const double candidate = (cumulative - tau) / static_cast<double>(j + 1);
    if (mag[j] > candidate) {
      theta = candidate;
    } else {
      break;
    }
  }
  theta = std::max(theta, 0.0);

  for (std::size_t i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v[i]) - theta;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, v[i]) : 0.0;
  }
}

Vector project_l1_ball(std::span<const double> v, double tau) {
  Vector out(v.size());
  project_l1_ball(v, tau, out);
  return out;
}

}  // namespace corrcs
