#pragma once

// Scalar quantizers designed for a zero-mean Gaussian input, and the
// gain-plus-additive-noise model Q(ybar) = alpha * ybar + r fitted to them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrcs/matrix.hpp"
#include "corrcs/rng.hpp"

namespace corrcs {

/// L = 2^bits cells. Cell i is (p_{i-1}, p_i] for i < L-1 and (p_{L-2}, +inf)
/// for the last one, with p_{-1} = -inf.
class ScalarQuantizer {
 public:
  ScalarQuantizer(int bits, std::vector<double> thresholds, std::vector<double> levels);

  int bits() const noexcept { return bits_; }
  std::size_t cell_count() const noexcept { return levels_.size(); }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  const std::vector<double>& levels() const noexcept { return levels_; }

  /// Index of the cell containing v.
  std::size_t cell_of(double v) const noexcept;
  double operator()(double v) const noexcept { return levels_[cell_of(v)]; }

  /// Same quantizer with every threshold and level multiplied by c > 0.
  ScalarQuantizer scaled(double c) const;

  friend bool operator==(const ScalarQuantizer&, const ScalarQuantizer&) = default;

 private:
  int bits_;
  std::vector<double> thresholds_;
  std::vector<double> levels_;
};

struct GainModelFit {
  double alpha = 1.0;
  double sigma_q_sq = 0.0;    ///< variance of q = Q(ybar) - ybar, (1 - alpha) sigma_ybar^2
  double sigma_r_sq = 0.0;    ///< variance of r, alpha (1 - alpha) sigma_ybar^2
  double sigma_ybar_sq = 0.0;
  std::size_t sample_count = 0;
};

/// Thrown when an iterative design stops without meeting its tolerance.
/// Carries the last iterate.
class QuantizerDesignError : public std::runtime_error {
 public:
  QuantizerDesignError(const std::string& what, std::vector<double> thresholds,
                       std::vector<double> levels)
      : std::runtime_error(what), thresholds_(std::move(thresholds)), levels_(std::move(levels)) {}
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  const std::vector<double>& levels() const noexcept { return levels_; }

 private:
  std::vector<double> thresholds_;
  std::vector<double> levels_;
};

struct LloydMaxOptions {
  double tolerance = 1e-12;  ///< on max level movement, in units of sigma
  int max_iterations = 100000;
};

/// Lloyd-Max (centroid levels, midpoint thresholds) for N(0, sigma^2).
ScalarQuantizer design_lloyd_max(int bits, double sigma, const LloydMaxOptions& options = {});

/// Uniform mid-point quantizer whose step minimizes the MSE for N(0, sigma^2).
ScalarQuantizer design_uniform_mmse(int bits, double sigma);

/// Elementwise quantization.
Vector quantize(const ScalarQuantizer& q, std::span<const double> v);

/// Monte-Carlo fit of alpha = 1 - var(q) / var(ybar) for ybar ~ N(0, sigma_ybar_sq).
GainModelFit fit_gain_model(const ScalarQuantizer& q, double sigma_ybar_sq,
                            std::size_t sample_count, Rng& rng);

/// Gain model implied by a known alpha.
GainModelFit gain_model_from_alpha(double alpha, double sigma_ybar_sq);

namespace gaussian {

/// P(a < Y <= b) for Y ~ N(0, 1); a and b may be infinite.
double mass(double a, double b);
/// E[Y | a < Y <= b] for Y ~ N(0, 1).
double centroid(double a, double b);
/// Exact MSE of q for an N(0, sigma^2) input.
double distortion(const ScalarQuantizer& q, double sigma);

}  // namespace gaussian

}  // namespace corrcs
