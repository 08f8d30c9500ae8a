#include "corrcs/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>

#include "corrcs/biht.hpp"
#include "corrcs/kernels.hpp"
#include "corrcs/stats.hpp"

namespace corrcs {

namespace {

// Above this the parameter study regenerates instances for every evaluation
// instead of keeping them in memory.
constexpr std::size_t kInstanceCacheBytes = std::size_t{1} << 30;

struct NoiseSetup {
  NoiseMode mode = NoiseMode::kArtificial;
  double alpha = 1.0;
  double sigma_w_ratio = 0.0;
  std::optional<ScalarQuantizer> unit_quantizer;
  bool unit_norm = false;
  std::uint64_t seed = 0;
};

struct Trial {
  SparseSignal signal;
  SensingEnsemble ensemble;
  Vector observed;
  double power = 0.0;  // ||ybar||^2 / M
};

Trial make_trial(const NoiseSetup& setup, const GridPoint& gp, std::uint64_t index) {
  const InstanceConfig ic{gp.n, gp.m, gp.k, setup.seed, index};
  Rng signal_rng = ic.stream(StreamTag::kSignal);
  SparseSignal signal = generate_signal(ic, signal_rng, setup.unit_norm);
  Rng ensemble_rng = ic.stream(StreamTag::kEnsemble);
  SensingEnsemble ensemble = generate_ensemble(ic, ensemble_rng);
  Vector ybar = measure_noiseless(signal, ensemble);
  const double power = kernels::dot(ybar, ybar) / static_cast<double>(gp.m);

  Vector observed;
  if (setup.mode == NoiseMode::kArtificial) {
    Rng noise_rng = ic.stream(StreamTag::kNoise);
    const double sw = setup.sigma_w_ratio * std::sqrt(power);
    NoiseSpec spec{setup.alpha, sw * sw, power};
    observed = apply_correlated_noise(ybar, spec, noise_rng).observed;
  } else if (power > 0.0) {
    observed = quantize(setup.unit_quantizer->scaled(std::sqrt(power)), ybar);
  } else {
    observed = ybar;
  }
  return Trial{std::move(signal), std::move(ensemble), std::move(observed), power};
}

struct MethodParams {
  double alpha = 1.0;
  EpsilonMode epsilon_mode = EpsilonMode::kRule;
  double explicit_epsilon = 0.0;
  double beta_ratio = 1.0;
  double epsilon_ratio = 1.0;
  double plain_epsilon_ratio = 1.0;
  BpdnOptions solver;
  int biht_max_iterations = 300;
};

struct Outcome {
  double nmse = 0.0;
  bool converged = true;
};

Outcome run_method(Method method, const Trial& trial, const MethodParams& p,
                   std::map<double, SolverReport>& plain_cache) {
  const Matrix& a = trial.ensemble.system_matrix();
  const std::size_t m = a.rows();
  const double alpha = p.alpha;
  const double sigma_q = std::sqrt(std::max(0.0, (1.0 - alpha) * trial.power));
  const double sigma_r = std::sqrt(std::max(0.0, alpha * (1.0 - alpha) * trial.power));
  const bool rule = p.epsilon_mode == EpsilonMode::kRule;
  const double eps_q = rule ? epsilon_rule(m, sigma_q) : p.explicit_epsilon;
  const double eps_r = rule ? epsilon_rule(m, sigma_r) : p.explicit_epsilon;

  auto plain = [&](double eps) -> const SolverReport& {
    auto it = plain_cache.find(eps);
    if (it == plain_cache.end()) {
      it = plain_cache.emplace(eps, solve_bpdn({a, trial.observed, eps}, p.solver)).first;
    }
    return it->second;
  };
  const BpdnProblem scaled_problem{a, trial.observed, eps_r};
  const auto truth = trial.signal.values();

  switch (method) {
    case Method::kBpdn: {
      const SolverReport& r = plain(p.plain_epsilon_ratio * eps_q);
      return {nmse(r.solution, truth), r.converged};
    }
    case Method::kBpdnScale: {
      const SolverReport& r = plain(eps_r);
      Vector z = r.solution;
      for (double& v : z) v /= alpha;
      return {nmse(z, truth), r.converged};
    }
    case Method::kBpdnBeta: {
      const SolverReport& r = plain(p.epsilon_ratio * eps_r);
      Vector z = r.solution;
      const double beta = p.beta_ratio * alpha;
      for (double& v : z) v /= beta;
      return {nmse(z, truth), r.converged};
    }
    case Method::kBpdnPrescale: {
      const SolverReport r = solve_scaled_matrix(scaled_problem, alpha, p.solver);
      return {nmse(r.solution, truth), r.converged};
    }
    case Method::kBiht: {
      const Vector signs = sign_measurements(trial.observed);
      BihtProblem problem{a, signs, trial.signal.sparsity()};
      problem.max_iterations = p.biht_max_iterations;
      const SolverReport r = solve_biht(problem);
      return {nmse(r.solution, truth), r.converged};
    }
  }
  throw std::logic_error("run_method: unknown method");
}

// Runs `body(t)` for t in [0, count) across the worker pool and rethrows the
// first exception, if any.
template <typename Body>
void parallel_trials(std::size_t count, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    try {
      body(static_cast<std::size_t>(t));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

MethodStats summarize(Method method, std::vector<double> values, std::size_t nonconverged, bool retain) {
  MethodStats s;
  s.method = method;
  s.trials = values.size();
  s.mean_nmse = stats::mean(values);
  s.ci99 = stats::ci99_halfwidth(values);
  s.nonconverged = nonconverged;
  s.flagged = static_cast<double>(nonconverged) > 0.01 * static_cast<double>(values.size());
  if (retain) s.per_trial = std::move(values);
  return s;
}

void validate_grid_point(const GridPoint& gp) {
  if (gp.n == 0 || gp.m == 0 || gp.m > gp.n) throw std::invalid_argument("grid point: need 1 <= m <= n");
  if (gp.k == 0 || gp.k > gp.m) throw std::invalid_argument("grid point: need 1 <= k <= m");
}

QuantizerDesign design_of(NoiseMode mode) {
  return mode == NoiseMode::kUniform ? QuantizerDesign::kUniform : QuantizerDesign::kLloydMax;
}

ScalarQuantizer unit_quantizer(QuantizerDesign design, int bits) {
  return design == QuantizerDesign::kUniform ? design_uniform_mmse(bits, 1.0) : design_lloyd_max(bits, 1.0);
}

double fitted_alpha(const ScalarQuantizer& q, std::uint64_t seed, std::size_t samples) {
  Rng rng = make_stream(seed, {static_cast<std::uint64_t>(StreamTag::kGainFit),
                               static_cast<std::uint64_t>(q.bits())});
  return fit_gain_model(q, 1.0, samples, rng).alpha;
}

}  // namespace

std::string_view to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kArtificial: return "artificial-correlated";
    case NoiseMode::kLloydMax: return "lloyd-max-quantized";
    case NoiseMode::kUniform: return "uniform-quantized";
  }
  return "?";
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kBpdn: return "bpdn";
    case Method::kBpdnScale: return "bpdn-scale";
    case Method::kBpdnBeta: return "bpdn-beta";
    case Method::kBpdnPrescale: return "bpdn-prescale";
    case Method::kBiht: return "biht";
  }
  return "?";
}

std::string_view to_string(EpsilonMode mode) {
  return mode == EpsilonMode::kRule ? "rule-eq13" : "explicit";
}

NoiseMode parse_noise_mode(std::string_view s) {
  for (auto m : {NoiseMode::kArtificial, NoiseMode::kLloydMax, NoiseMode::kUniform}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown noise mode: " + std::string(s));
}

Method parse_method(std::string_view s) {
  for (auto m : {Method::kBpdn, Method::kBpdnScale, Method::kBpdnBeta, Method::kBpdnPrescale, Method::kBiht}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown method: " + std::string(s));
}

EpsilonMode parse_epsilon_mode(std::string_view s) {
  if (s == "rule-eq13") return EpsilonMode::kRule;
  if (s == "explicit") return EpsilonMode::kExplicit;
  throw std::invalid_argument("unknown epsilon mode: " + std::string(s));
}

std::optional<double> reference_alpha(QuantizerDesign design, int bits) {
  // Monte-Carlo estimates reported for Gaussian-designed quantizers.
  switch (bits) {
    case 1: return 0.636597595;
    case 3: return design == QuantizerDesign::kLloydMax ? 0.965461586 : 0.962583611;
    case 5: return design == QuantizerDesign::kLloydMax ? 0.997494182 : 0.996506750;
    default: return std::nullopt;
  }
}

void ExperimentConfig::validate() const {
  if (grid.empty()) throw std::invalid_argument("ExperimentConfig: empty grid");
  for (const auto& gp : grid) validate_grid_point(gp);
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("ExperimentConfig: no methods");
  if (bits < 1 || bits > 16) throw std::invalid_argument("ExperimentConfig: bits must be in [1, 16]");
  if (alpha && !(*alpha > 0.0 && *alpha <= 1.0)) throw std::invalid_argument("ExperimentConfig: alpha must be in (0, 1]");
  if (sigma_w_ratio && !(*sigma_w_ratio >= 0.0)) throw std::invalid_argument("ExperimentConfig: sigma_w_ratio must be >= 0");
  if (epsilon_mode == EpsilonMode::kExplicit && !(explicit_epsilon >= 0.0)) {
    throw std::invalid_argument("ExperimentConfig: explicit epsilon must be >= 0");
  }
  if (!(beta_ratio > 0.0) || !(epsilon_ratio >= 0.0)) throw std::invalid_argument("ExperimentConfig: bad beta/epsilon ratio");
}

const MethodStats& PointResult::at(Method m) const {
  for (const auto& s : methods) {
    if (s.method == m) return s;
  }
  throw std::out_of_range("PointResult: method not run");
}

bool ExperimentResult::flagged() const {
  return std::any_of(points.begin(), points.end(), [](const PointResult& p) {
    return std::any_of(p.methods.begin(), p.methods.end(), [](const MethodStats& s) { return s.flagged; });
  });
}

double nmse(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("nmse: length mismatch");
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    err += d * d;
    ref += truth[i] * truth[i];
  }
  if (!(ref > 0.0)) throw std::invalid_argument("nmse: truth has zero norm");
  return err / ref;
}

double improvement_db(double p_baseline, double p_method) {
  if (!(p_baseline > 0.0) || !(p_method > 0.0)) throw std::invalid_argument("improvement_db: inputs must be positive");
  return 10.0 * std::log10(p_baseline / p_method);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProgressFn& progress) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  const bool wants_biht = std::find(config.methods.begin(), config.methods.end(), Method::kBiht) != config.methods.end();
  NoiseSetup setup;
  setup.mode = config.noise_mode;
  setup.unit_norm = config.unit_norm_signals || wants_biht;
  setup.seed = config.master_seed;
  if (config.noise_mode == NoiseMode::kArtificial) {
    const auto a = config.alpha ? config.alpha : reference_alpha(QuantizerDesign::kLloydMax, config.bits);
    if (!a) throw std::invalid_argument("run_experiment: artificial mode needs alpha for this bit depth");
    setup.alpha = *a;
  } else {
    setup.unit_quantizer = unit_quantizer(design_of(config.noise_mode), config.bits);
    setup.alpha = config.alpha ? *config.alpha
                               : fitted_alpha(*setup.unit_quantizer, config.master_seed, config.gain_fit_samples);
  }
  setup.sigma_w_ratio = config.sigma_w_ratio.value_or(std::sqrt(setup.alpha * (1.0 - setup.alpha)));

  MethodParams params;
  params.alpha = setup.alpha;
  params.epsilon_mode = config.epsilon_mode;
  params.explicit_epsilon = config.explicit_epsilon;
  params.beta_ratio = config.beta_ratio;
  params.epsilon_ratio = config.epsilon_ratio;
  params.solver = config.solver;
  params.biht_max_iterations = config.biht_max_iterations;

  const std::size_t methods = config.methods.size();
  for (const GridPoint& gp : config.grid) {
    std::vector<std::vector<double>> values(methods, std::vector<double>(config.trials));
    std::vector<std::vector<char>> converged(methods, std::vector<char>(config.trials));
    parallel_trials(config.trials, [&](std::size_t t) {
      const Trial trial = make_trial(setup, gp, t);
      std::map<double, SolverReport> cache;
      for (std::size_t j = 0; j < methods; ++j) {
        const Outcome o = run_method(config.methods[j], trial, params, cache);
        values[j][t] = o.nmse;
        converged[j][t] = o.converged;
      }
    });

    PointResult point;
    point.point = gp;
    point.alpha = setup.alpha;
    for (std::size_t j = 0; j < methods; ++j) {
      const auto bad = static_cast<std::size_t>(std::count(converged[j].begin(), converged[j].end(), 0));
      point.methods.push_back(summarize(config.methods[j], std::move(values[j]), bad, config.retain_trials));
    }
    if (progress) progress(point);
    result.points.push_back(std::move(point));
  }
  return result;
}

void PhaseSweepConfig::validate() const {
  if (n < 1) throw std::invalid_argument("PhaseSweepConfig: n must be >= 1");
  if (!(delta_step > 0.0 && delta_step <= 1.0) || !(rho_step > 0.0 && rho_step <= 1.0)) {
    throw std::invalid_argument("PhaseSweepConfig: steps must be in (0, 1]");
  }
  if (trials < 1) throw std::invalid_argument("PhaseSweepConfig: trials must be >= 1");
  if (!(nmse_cutoff > 0.0)) throw std::invalid_argument("PhaseSweepConfig: cutoff must be > 0");
  if (methods.empty()) throw std::invalid_argument("PhaseSweepConfig: no methods");
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) throw std::invalid_argument("PhaseSweepConfig: delta must be in (0, 1]");
  }
}

const PhaseCell* PhaseSweepResult::find(double delta, double rho, Method method) const {
  for (const auto& c : cells) {
    if (std::abs(c.delta - delta) < 1e-9 && std::abs(c.rho - rho) < 1e-9 && c.stats.method == method) return &c;
  }
  return nullptr;
}

PhaseSweepResult run_phase_sweep(const PhaseSweepConfig& config,
                                 const std::function<void(const PhaseCell&)>& progress) {
  config.validate();
  PhaseSweepResult result;
  result.config = config;

  const ScalarQuantizer q = design_lloyd_max(config.bits, 1.0);
  result.alpha = fitted_alpha(q, config.master_seed, config.gain_fit_samples);

  std::vector<double> deltas = config.deltas;
  if (deltas.empty()) {
    const auto steps = static_cast<std::size_t>(std::floor(1.0 / config.delta_step + 1e-9));
    for (std::size_t i = 1; i <= steps; ++i) deltas.push_back(static_cast<double>(i) * config.delta_step);
  }
  const auto rho_steps = static_cast<std::size_t>(std::floor(config.rho_max / config.rho_step + 1e-9));

  for (double delta : deltas) {
    const auto m = static_cast<std::size_t>(std::lround(delta * static_cast<double>(config.n)));
    if (m == 0) continue;
    std::vector<Method> active = config.methods;
    for (std::size_t i = 1; i <= rho_steps && !active.empty(); ++i) {
      const double rho = static_cast<double>(i) * config.rho_step;
      if (rho * static_cast<double>(m) < 1.0) continue;
      const auto k = std::min(m, static_cast<std::size_t>(std::lround(rho * static_cast<double>(m))));

      ExperimentConfig ec;
      ec.grid = {{config.n, m, k}};
      ec.trials = config.trials;
      ec.noise_mode = NoiseMode::kLloydMax;
      ec.bits = config.bits;
      ec.alpha = result.alpha;
      ec.methods = active;
      ec.master_seed = config.master_seed;
      ec.unit_norm_signals = true;
      ec.biht_max_iterations = config.biht_max_iterations;
      const ExperimentResult er = run_experiment(ec);

      std::vector<Method> still;
      for (const MethodStats& s : er.points.front().methods) {
        PhaseCell cell{delta, rho, er.points.front().point, s};
        if (progress) progress(cell);
        result.cells.push_back(std::move(cell));
        if (s.mean_nmse <= config.nmse_cutoff) still.push_back(s.method);
      }
      active = std::move(still);
    }
  }
  return result;
}

ParameterStudy optimize_beta_epsilon(const ParameterStudyConfig& config) {
  validate_grid_point(config.point);
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) throw std::invalid_argument("optimize_beta_epsilon: alpha must be in (0, 1]");
  if (config.trials < 1) throw std::invalid_argument("optimize_beta_epsilon: trials must be >= 1");

  NoiseSetup setup;
  setup.mode = NoiseMode::kArtificial;
  setup.alpha = config.alpha;
  setup.sigma_w_ratio = std::sqrt(config.alpha * (1.0 - config.alpha));
  setup.seed = config.master_seed;

  const GridPoint gp = config.point;
  const std::size_t bytes = config.trials * gp.m * gp.n * sizeof(double);
  std::vector<Trial> cached;
  if (bytes <= kInstanceCacheBytes) {
    cached.reserve(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) cached.push_back(make_trial(setup, gp, t));
  }

  // Mean NMSE over the fixed trial set; identical inputs give identical output.
  auto average = [&](Method method, MethodParams params) {
    std::vector<double> values(config.trials);
    parallel_trials(config.trials, [&](std::size_t t) {
      std::map<double, SolverReport> cache;
      if (!cached.empty()) {
        values[t] = run_method(method, cached[t], params, cache).nmse;
      } else {
        values[t] = run_method(method, make_trial(setup, gp, t), params, cache).nmse;
      }
    });
    return stats::mean(values);
  };

  MethodParams base;
  base.alpha = config.alpha;

  ParameterStudy study;
  study.point = gp;
  study.alpha = config.alpha;
  study.trials = config.trials;
  study.p_alpha = average(Method::kBpdnScale, base);

  SimplexConfig simplex = config.simplex;
  if (simplex.init_point.empty()) simplex.init_point = {1.0, 1.0};
  simplex.lower_bounds = {0.0, 0.0};
  const SimplexResult scaled = minimize(
      [&](const std::vector<double>& p) {
        MethodParams mp = base;
        mp.beta_ratio = p[0];
        mp.epsilon_ratio = p[1];
        return average(Method::kBpdnBeta, mp);
      },
      simplex);
  study.beta2_ratio = scaled.point[0];
  study.epsilon2_ratio = scaled.point[1];
  study.p2 = scaled.value;
  study.evaluations = scaled.evaluations;
  study.converged = scaled.converged;

  if (config.optimize_plain) {
    SimplexConfig plain_simplex = config.simplex;
    plain_simplex.init_point = {1.0};
    plain_simplex.lower_bounds = {0.0};
    const SimplexResult plain = minimize(
        [&](const std::vector<double>& p) {
          MethodParams mp = base;
          mp.plain_epsilon_ratio = p[0];
          return average(Method::kBpdn, mp);
        },
        plain_simplex);
    study.epsilon1_ratio = plain.point[0];
    study.p1 = plain.value;
    study.evaluations += plain.evaluations;
    study.converged = study.converged && plain.converged;
  }
  return study;
}

}  // namespace corrcs
