#pragma once

// Monte-Carlo harness: generate instances, corrupt the measurements with
// correlated noise (artificial gain model or actual quantization),
// reconstruct with each method and aggregate NMSE with 99% confidence
// intervals.
//
// The noiseless measurement variance is taken per trial as ||ybar||^2 / M,
// the power a gain-control stage in front of the quantizer would report.
// Trials run in parallel; every trial draws from its own seeded streams and
// results are reduced in trial order, so output does not depend on the
// worker count.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrcs/bpdn.hpp"
#include "corrcs/nelder_mead.hpp"
#include "corrcs/quantizer.hpp"
#include "corrcs/siggen.hpp"

namespace corrcs {

enum class NoiseMode { kArtificial, kLloydMax, kUniform };
enum class Method {
  kBpdn,          ///< plain BPDN, epsilon from sigma_q
  kBpdnScale,     ///< BPDN with epsilon from sigma_r, solution divided by alpha
  kBpdnBeta,      ///< as kBpdnScale with beta = beta_ratio * alpha and epsilon scaled by epsilon_ratio
  kBpdnPrescale,  ///< constraint with alpha * A, epsilon from sigma_r
  kBiht,          ///< BIHT on the signs of y
};
enum class EpsilonMode { kRule, kExplicit };
enum class QuantizerDesign { kLloydMax, kUniform };

std::string_view to_string(NoiseMode mode);
std::string_view to_string(Method method);
std::string_view to_string(EpsilonMode mode);
NoiseMode parse_noise_mode(std::string_view s);
Method parse_method(std::string_view s);
EpsilonMode parse_epsilon_mode(std::string_view s);

/// Correlation gains of the reference study's 1/3/5-bit quantizers.
std::optional<double> reference_alpha(QuantizerDesign design, int bits);

struct ExperimentConfig {
  std::vector<GridPoint> grid;
  std::size_t trials = 1000;
  NoiseMode noise_mode = NoiseMode::kArtificial;
  int bits = 1;
  /// Artificial mode: the gain; defaults to the Lloyd-Max reference value for
  /// `bits`. Quantized modes: overrides the Monte-Carlo fit.
  std::optional<double> alpha;
  /// Artificial mode: standard deviation of w relative to sqrt(power);
  /// defaults to sqrt(alpha (1 - alpha)).
  std::optional<double> sigma_w_ratio;
  std::vector<Method> methods{Method::kBpdn, Method::kBpdnScale};
  std::uint64_t master_seed = 1;
  EpsilonMode epsilon_mode = EpsilonMode::kRule;
  double explicit_epsilon = 0.0;
  double beta_ratio = 1.0;
  double epsilon_ratio = 1.0;
  bool unit_norm_signals = false;  ///< forced on when kBiht is requested
  bool retain_trials = false;
  std::size_t gain_fit_samples = 1'000'000;
  int biht_max_iterations = 300;
  BpdnOptions solver;

  void validate() const;
};

struct MethodStats {
  Method method = Method::kBpdn;
  double mean_nmse = 0.0;
  double ci99 = 0.0;
  std::size_t trials = 0;
  std::size_t nonconverged = 0;
  bool flagged = false;  ///< more than 1% of trials did not converge
  std::vector<double> per_trial;
};

struct PointResult {
  GridPoint point;
  double alpha = 1.0;
  std::vector<MethodStats> methods;

  const MethodStats& at(Method m) const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<PointResult> points;

  bool flagged() const;
};

/// ||estimate - truth||^2 / ||truth||^2.
double nmse(std::span<const double> estimate, std::span<const double> truth);

/// 10 log10(p_baseline / p_method).
double improvement_db(double p_baseline, double p_method);

using ProgressFn = std::function<void(const PointResult&)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

struct PhaseSweepConfig {
  std::size_t n = 256;
  double delta_step = 0.05;
  double rho_step = 0.05;
  std::size_t trials = 100;
  std::vector<Method> methods{Method::kBpdnScale, Method::kBiht};
  double nmse_cutoff = 1.0;
  std::uint64_t master_seed = 1;
  int bits = 1;
  /// Explicit delta columns; empty means every multiple of delta_step in (0, 1].
  std::vector<double> deltas;
  double rho_max = 1.0;
  std::size_t gain_fit_samples = 1'000'000;
  int biht_max_iterations = 300;

  void validate() const;
};

struct PhaseCell {
  double delta = 0.0;
  double rho = 0.0;
  GridPoint point;
  MethodStats stats;
};

struct PhaseSweepResult {
  PhaseSweepConfig config;
  double alpha = 1.0;
  std::vector<PhaseCell> cells;

  /// Cell for (delta, rho, method), if it was evaluated.
  const PhaseCell* find(double delta, double rho, Method method) const;
};

/// Each delta column is climbed in rho from rho_step until a method's mean
/// NMSE exceeds the cutoff; that method then stops for the column. BPDN-scale
/// sees Lloyd-Max-quantized measurements, BIHT their signs; signals have unit
/// norm.
PhaseSweepResult run_phase_sweep(const PhaseSweepConfig& config,
                                 const std::function<void(const PhaseCell&)>& progress = {});

/// Search over the scale factor and fidelity radius at one grid point, with
/// artificial correlated noise and a fixed set of trials (common random
/// numbers). Ratios are relative to alpha and to the rule-of-thumb epsilon.
struct ParameterStudy {
  GridPoint point;
  double alpha = 1.0;
  std::size_t trials = 0;
  double p_alpha = 0.0;  ///< beta = alpha, rule epsilon
  double epsilon1_ratio = 1.0;
  double p1 = 0.0;       ///< plain BPDN at its best epsilon
  double beta2_ratio = 1.0;
  double epsilon2_ratio = 1.0;
  double p2 = 0.0;       ///< scaled BPDN at its best (beta, epsilon)
  int evaluations = 0;
  bool converged = false;
};

struct ParameterStudyConfig {
  GridPoint point;
  double alpha = 1.0;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  bool optimize_plain = true;
  SimplexConfig simplex;  ///< init_point left empty means (1, 1) in ratio space
};

ParameterStudy optimize_beta_epsilon(const ParameterStudyConfig& config);

}  // namespace corrcs
