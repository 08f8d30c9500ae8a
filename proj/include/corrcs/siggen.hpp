#pragma once

#include <cstdint>
#include <vector>

#include "corrcs/model.hpp"
#include "corrcs/rng.hpp"

namespace corrcs {

/// One random problem instance: sizes plus the seed coordinates.
struct InstanceConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  void validate() const;

  /// Independent stream for one purpose of this trial.
  Rng stream(StreamTag tag) const;
};

struct GridPoint {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// K support indices drawn uniformly without replacement, N(0,1) amplitudes;
/// optionally rescaled to unit l2 norm.
SparseSignal generate_signal(const InstanceConfig& config, Rng& rng, bool unit_norm = false);

/// Phi with IID N(0, 1/M) entries and Psi = I.
SensingEnsemble generate_ensemble(const InstanceConfig& config, Rng& rng);

/// The nine (M, K) pairs at N = 1000 sitting on the finite-N 99% recovery bound.
std::vector<GridPoint> paper_grid();

}  // namespace corrcs
