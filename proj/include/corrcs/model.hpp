#pragma once

// Measurement model: y = alpha * A x + w, with w white Gaussian and
// uncorrelated with x. alpha = 1 is the ordinary additive-noise model.

#include <cstddef>
#include <optional>
#include <span>

#include "corrcs/matrix.hpp"
#include "corrcs/rng.hpp"

namespace corrcs {

/// N-vector with exactly K nonzero entries.
class SparseSignal {
 public:
  /// Counts the nonzeros of `values`; throws if the vector is empty.
  explicit SparseSignal(Vector values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t sparsity() const noexcept { return sparsity_; }

 private:
  Vector values_;
  std::size_t sparsity_ = 0;
};

/// Measurement matrix Phi (M x N), orthonormal dictionary Psi (N x N) and the
/// system matrix A = Phi * Psi.
class SensingEnsemble {
 public:
  /// Psi = I, so A = Phi.
  explicit SensingEnsemble(Matrix measurement);
  /// Validates orthonormality of `dictionary` and forms the product.
  SensingEnsemble(Matrix measurement, Matrix dictionary);

  const Matrix& measurement_matrix() const noexcept { return measurement_; }
  const Matrix& dictionary() const noexcept { return dictionary_; }
  const Matrix& system_matrix() const noexcept { return system_; }
  std::size_t measurements() const noexcept { return system_.rows(); }
  std::size_t dimension() const noexcept { return system_.cols(); }

 private:
  Matrix measurement_;
  Matrix dictionary_;
  Matrix system_;
};

struct NoiseSpec {
  double alpha = 1.0;          ///< correlation gain, 0 < alpha <= 1
  double sigma_w_sq = 0.0;     ///< variance of the uncorrelated part w
  double sigma_ybar_sq = 0.0;  ///< variance of the noiseless measurements

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct MeasurementSet {
  Vector observed;                ///< y
  std::optional<Vector> noiseless;  ///< ybar = A x, kept for diagnostics

  /// n = y - ybar; requires `noiseless`.
  Vector noise() const;
};

/// ybar = A x.
Vector measure_noiseless(const SparseSignal& signal, const SensingEnsemble& ensemble);

/// y = alpha * ybar + w, w ~ N(0, sigma_w_sq) IID.
MeasurementSet apply_correlated_noise(std::span<const double> noiseless, const NoiseSpec& spec,
                                      Rng& rng);

/// Per-entry variance of n = y - ybar: (alpha - 1)^2 sigma_ybar^2 + sigma_w^2.
double correlated_noise_variance(const NoiseSpec& spec);

}  // namespace corrcs
