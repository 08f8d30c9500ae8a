#include "corrcs/siggen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "corrcs/kernels.hpp"

namespace corrcs {

void InstanceConfig::validate() const {
  if (n == 0) throw std::invalid_argument("InstanceConfig: n must be >= 1");
  if (k > n) throw std::invalid_argument("InstanceConfig: k must not exceed n");
  if (m == 0 || m > n) throw std::invalid_argument("InstanceConfig: need 1 <= m <= n");
}

Rng InstanceConfig::stream(StreamTag tag) const {
  return make_stream(master_seed, {n, m, k, trial_index, static_cast<std::uint64_t>(tag)});
}

SparseSignal generate_signal(const InstanceConfig& config, Rng& rng, bool unit_norm) {
  if (config.k > config.n) throw std::invalid_argument("generate_signal: k > n");
  if (config.n == 0) throw std::invalid_argument("generate_signal: n must be >= 1");

  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  std::vector<std::size_t> index(config.n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::size_t i = 0; i < config.k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, config.n - 1);
    std::swap(index[i], index[pick(rng)]);
  }

  Vector values(config.n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < config.k; ++i) {
    double v = 0.0;
    while (v == 0.0) v = normal(rng);
    values[index[i]] = v;
  }
  if (unit_norm && config.k > 0) {
    const double scale = 1.0 / kernels::norm2(values);
    for (double& v : values) v *= scale;
  }
  return SparseSignal(std::move(values));
}

SensingEnsemble generate_ensemble(const InstanceConfig& config, Rng& rng) {
  config.validate();
  Matrix phi(config.m, config.n);
  fill_gaussian(rng, phi.data(), 1.0 / std::sqrt(static_cast<double>(config.m)));
  return SensingEnsemble(std::move(phi));
}

std::vector<GridPoint> paper_grid() {
  constexpr std::size_t n = 1000;
  return {{n, 200, 1},   {n, 300, 17},  {n, 400, 41},  {n, 500, 73},  {n, 600, 115},
          {n, 700, 167}, {n, 800, 235}, {n, 900, 330}, {n, 1000, 542}};
}

}  // namespace corrcs
