#include "corrcs/stats.hpp"

#include <cmath>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace corrcs::stats {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return pairwise_sum(v) / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mu) * (v[i] - mu);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
}

double z99() {
  static const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.995);
  return z;
}

double ci99_halfwidth(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return z99() * sample_stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace corrcs::stats
