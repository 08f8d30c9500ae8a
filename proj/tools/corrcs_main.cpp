// corrcs: command-line front end for the experiment harness.
//
// Exit codes: 0 success, 1 invalid input, 2 solver failure above threshold.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrcs/biht.hpp"
#include "corrcs/bpdn.hpp"
#include "corrcs/experiments.hpp"
#include "corrcs/io.hpp"
#include "corrcs/kernels.hpp"
#include "corrcs/quantizer.hpp"

namespace fs = std::filesystem;
using namespace corrcs;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kSolverFailure = 2;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 1;
  std::optional<std::size_t> trials;
  int workers = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--trials", c.trials, "Monte-Carlo trials per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", c.workers, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "Output directory");
}

void log_point(const PointResult& p) {
  std::cerr << "  (" << p.point.m << ", " << p.point.k << ")";
  for (const auto& s : p.methods) std::cerr << "  " << to_string(s.method) << " " << s.mean_nmse;
  std::cerr << '\n';
}

std::string csv_text(const std::vector<io::ResultRow>& rows) {
  std::ostringstream s;
  io::write_results_csv(s, rows);
  return s.str();
}

std::vector<std::string> method_names(const std::vector<Method>& methods) {
  std::vector<std::string> out;
  for (Method m : methods) out.emplace_back(to_string(m));
  return out;
}

// ---------------------------------------------------------------- reproduce

struct ReproduceArgs {
  Common common;
  std::string figure;
  std::string scale = "desk";
};

int write_experiments(const fs::path& out, const std::string& name, const std::string& title,
                      const std::vector<ExperimentResult>& results) {
  std::vector<io::ResultRow> rows;
  io::Json runs = io::Json::array();
  bool flagged = false;
  for (const auto& r : results) {
    const auto part = io::result_rows(r);
    rows.insert(rows.end(), part.begin(), part.end());
    runs.push_back(io::manifest(r));
    flagged = flagged || r.flagged();
  }
  const std::uint64_t seed = results.front().config.master_seed;
  io::write_file(out / (name + ".csv"), csv_text(rows));
  io::write_file(out / (name + "_manifest.json"),
                 io::manifest(name, seed, {{"figure", name}}, std::move(runs)).dump(2) + "\n");
  io::write_file(out / (name + ".gp"),
                 io::plot_script(name + ".csv", title, method_names(results.front().config.methods)));
  std::cerr << "wrote " << (out / (name + ".csv")).string() << '\n';
  if (flagged) {
    std::cerr << "error: more than 1% of trials did not converge at some grid point\n";
    return kSolverFailure;
  }
  return kOk;
}

int reproduce_bits_sweep(const ReproduceArgs& a, NoiseMode mode) {
  const bool paper = a.scale == "paper";
  std::vector<ExperimentResult> results;
  for (int bits : {1, 3, 5}) {
    ExperimentConfig c;
    c.grid = paper_grid();
    c.trials = a.common.trials.value_or(paper ? 1000 : 200);
    c.noise_mode = mode;
    c.bits = bits;
    c.methods = {Method::kBpdn, Method::kBpdnScale};
    c.master_seed = a.common.seed;
    std::cerr << a.figure << ": " << to_string(mode) << ", " << bits << " bit(s), T=" << c.trials << '\n';
    results.push_back(run_experiment(c, log_point));
  }
  const std::string title = std::string("mean NMSE, ") + std::string(to_string(mode));
  return write_experiments(a.common.out, a.figure, title, results);
}

int reproduce_table1(const ReproduceArgs& a) {
  io::Json rows = io::Json::array();
  for (QuantizerDesign design : {QuantizerDesign::kLloydMax, QuantizerDesign::kUniform}) {
    for (int bits : {1, 3, 5}) {
      const ScalarQuantizer q = design == QuantizerDesign::kLloydMax ? design_lloyd_max(bits, 1.0)
                                                                     : design_uniform_mmse(bits, 1.0);
      Rng rng = make_stream(a.common.seed, {static_cast<std::uint64_t>(StreamTag::kGainFit),
                                            static_cast<std::uint64_t>(bits)});
      const GainModelFit fit = fit_gain_model(q, 1.0, 1'000'000, rng);
      rows.push_back({{"design", design == QuantizerDesign::kLloydMax ? "lloyd-max" : "uniform"},
                      {"bits", bits},
                      {"alpha", fit.alpha},
                      {"reference_alpha", *reference_alpha(design, bits)}});
      std::cout << (design == QuantizerDesign::kLloydMax ? "lloyd-max" : "uniform  ") << "  " << bits
                << " bit(s)  alpha = " << io::format_double(fit.alpha) << '\n';
    }
  }
  const fs::path out = a.common.out;
  io::write_file(out / "table1.json",
                 io::manifest("table1", a.common.seed, {{"samples", 1'000'000}}, std::move(rows)).dump(2) + "\n");
  return kOk;
}

int reproduce_fig5(const ReproduceArgs& a) {
  PhaseSweepConfig c;
  if (a.scale == "paper") {
    c.n = 1000;
    c.delta_step = 0.01;
    c.rho_step = 0.01;
    c.trials = 1000;
  }
  if (a.common.trials) c.trials = *a.common.trials;
  c.master_seed = a.common.seed;
  std::cerr << "fig5: phase sweep N=" << c.n << ", T=" << c.trials << '\n';
  const PhaseSweepResult r = run_phase_sweep(c);
  const fs::path out = a.common.out;
  io::write_file(out / "fig5.csv", csv_text(io::result_rows(r)));
  io::write_file(out / "fig5_manifest.json", io::manifest(r).dump(2) + "\n");
  for (Method m : c.methods) {
    const std::string name = std::string(to_string(m));
    io::write_file(out / ("fig5_" + name + ".gp"), io::phase_plot_script("fig5.csv", name));
  }
  std::cerr << "wrote " << (out / "fig5.csv").string() << '\n';
  for (const auto& cell : r.cells) {
    if (cell.stats.flagged && cell.stats.method != Method::kBiht) return kSolverFailure;
  }
  return kOk;
}

int reproduce_tables(const ReproduceArgs& a) {
  const bool paper = a.scale == "paper";
  const auto grid = paper_grid();
  const std::vector<int> bit_depths = paper ? std::vector<int>{1, 3, 5} : std::vector<int>{1};
  const std::size_t points = paper ? grid.size() : 3;
  io::Json rows = io::Json::array();
  for (int bits : bit_depths) {
    for (std::size_t i = 0; i < points; ++i) {
      ParameterStudyConfig c;
      c.point = grid[i];
      c.alpha = *reference_alpha(QuantizerDesign::kLloydMax, bits);
      c.trials = a.common.trials.value_or(paper ? 1000 : 100);
      c.master_seed = a.common.seed;
      const ParameterStudy s = optimize_beta_epsilon(c);
      std::cerr << "tables: " << bits << " bit(s) (" << s.point.m << ", " << s.point.k << ")  P_alpha " << s.p_alpha
                << "  P1 " << s.p1 << "  P2 " << s.p2 << "  beta2/alpha " << s.beta2_ratio << "  eps2/eps "
                << s.epsilon2_ratio << '\n';
      io::Json row = io::to_json(s);
      row["bits"] = bits;
      rows.push_back(std::move(row));
    }
  }
  const fs::path out = a.common.out;
  io::write_file(out / "tables.json",
                 io::manifest("tables", a.common.seed, {{"scale", a.scale}}, std::move(rows)).dump(2) + "\n");
  return kOk;
}

int cmd_reproduce(const ReproduceArgs& a) {
  if (a.figure == "fig2") return reproduce_bits_sweep(a, NoiseMode::kArtificial);
  if (a.figure == "fig3") return reproduce_bits_sweep(a, NoiseMode::kLloydMax);
  if (a.figure == "fig4") return reproduce_bits_sweep(a, NoiseMode::kUniform);
  if (a.figure == "fig5") return reproduce_fig5(a);
  if (a.figure == "table1") return reproduce_table1(a);
  if (a.figure == "tables") return reproduce_tables(a);
  throw InvalidInput("unknown figure id: " + a.figure);
}

// -------------------------------------------------------------------- solve

struct SolveArgs {
  Common common;
  std::string matrix_file;
  std::string y_file;
  std::string method = "bpdn";
  std::optional<double> alpha;
  std::string epsilon = "auto";
  std::optional<double> sigma;
  std::optional<int> bits;
  std::optional<std::size_t> k;
};

Matrix load_matrix(const std::string& path) {
  std::istringstream in(io::read_file(path));
  return io::read_matrix_csv(in);
}

Vector load_vector(const std::string& path) {
  std::istringstream in(io::read_file(path));
  return io::read_vector_csv(in);
}

int cmd_solve(const SolveArgs& a) {
  const Method method = parse_method(a.method);
  if (method != Method::kBpdn && method != Method::kBpdnScale && method != Method::kBiht) {
    throw InvalidInput("solve supports bpdn, bpdn-scale and biht");
  }
  if (method == Method::kBpdnScale && !a.alpha) throw InvalidInput("bpdn-scale needs --alpha");
  if (a.alpha && !(*a.alpha > 0.0 && *a.alpha <= 1.0)) throw InvalidInput("--alpha must be in (0, 1]");
  if (a.bits && *a.bits < 1) throw InvalidInput("--bits must be >= 1");

  const Matrix A = load_matrix(a.matrix_file);
  const Vector y = load_vector(a.y_file);
  if (y.size() != A.rows()) {
    throw InvalidInput("y has " + std::to_string(y.size()) + " entries, matrix has " + std::to_string(A.rows()) +
                       " rows");
  }

  SolverReport report;
  double epsilon = 0.0;
  if (method == Method::kBiht) {
    if (!a.k) throw InvalidInput("biht needs --k");
    const Vector signs = sign_measurements(y);
    report = solve_biht(BihtProblem{A, signs, *a.k});
  } else {
    if (a.epsilon == "auto") {
      double sigma = 0.0;
      if (a.sigma) {
        sigma = *a.sigma;
      } else if (a.bits) {
        // Gain model of a Lloyd-Max quantizer with `bits`; the output power of
        // a centroid quantizer is alpha times its input power.
        const double alpha_q = reference_alpha(QuantizerDesign::kLloydMax, *a.bits).value_or(0.0);
        if (!(alpha_q > 0.0)) throw InvalidInput("--epsilon auto with --bits supports 1, 3 or 5 bits; pass --sigma");
        const double power = kernels::dot(y, y) / static_cast<double>(y.size()) / alpha_q;
        sigma = std::sqrt(method == Method::kBpdn ? (1.0 - alpha_q) * power : alpha_q * (1.0 - alpha_q) * power);
      } else {
        throw InvalidInput("--epsilon auto needs --sigma or --bits");
      }
      if (!(sigma >= 0.0)) throw InvalidInput("--sigma must be >= 0");
      epsilon = epsilon_rule(A.rows(), sigma);
    } else {
      try {
        std::size_t used = 0;
        epsilon = std::stod(a.epsilon, &used);
        if (used != a.epsilon.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw InvalidInput("--epsilon must be a number or 'auto'");
      }
    }
    const BpdnProblem problem{A, y, epsilon};
    report = method == Method::kBpdn ? solve_bpdn(problem) : solve_post_scaled(problem, *a.alpha);
  }

  const fs::path out = a.common.out;
  std::ostringstream sol;
  io::write_vector_csv(sol, report.solution);
  io::write_file(out / "solution.csv", sol.str());
  io::Json rj = io::to_json(report);
  rj["method"] = a.method;
  rj["epsilon"] = epsilon;
  io::write_file(out / "report.json", rj.dump(2) + "\n");
  std::cerr << "wrote " << (out / "solution.csv").string() << '\n';
  if (method != Method::kBiht && !report.converged) {
    std::cerr << "error: solver did not converge\n";
    return kSolverFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- quantizer

struct QuantizerArgs {
  Common common;
  std::string design = "lloyd-max";
  int bits = 1;
  double sigma = 1.0;
  std::size_t samples = 1'000'000;
};

int cmd_quantizer(const QuantizerArgs& a) {
  if (a.bits < 1 || a.bits > 16) throw InvalidInput("--bits must be in [1, 16]");
  if (!(a.sigma > 0.0)) throw InvalidInput("--sigma must be > 0");
  if (a.samples < 10'000) throw InvalidInput("--samples must be >= 10000");
  const ScalarQuantizer q = a.design == "lloyd-max" ? design_lloyd_max(a.bits, a.sigma)
                                                     : design_uniform_mmse(a.bits, a.sigma);
  Rng rng = make_stream(a.common.seed, {static_cast<std::uint64_t>(StreamTag::kGainFit),
                                        static_cast<std::uint64_t>(a.bits)});
  const GainModelFit fit = fit_gain_model(q, a.sigma * a.sigma, a.samples, rng);

  const fs::path out = a.common.out;
  io::write_file(out / "quantizer.json", io::to_json(q).dump(2) + "\n");
  io::write_file(out / "gain_fit.json", io::to_json(fit).dump(2) + "\n");
  std::cout << "levels:";
  for (double l : q.levels()) std::cout << ' ' << io::format_double(l);
  std::cout << "\nalpha: " << io::format_double(fit.alpha) << '\n';
  return kOk;
}

// -------------------------------------------------------------- phase-sweep

struct PhaseArgs {
  Common common;
  PhaseSweepConfig config;
  std::vector<std::string> methods{"bpdn-scale", "biht"};
};

int cmd_phase_sweep(PhaseArgs a) {
  a.config.methods.clear();
  for (const auto& m : a.methods) a.config.methods.push_back(parse_method(m));
  if (a.common.trials) a.config.trials = *a.common.trials;
  a.config.master_seed = a.common.seed;
  const PhaseSweepResult r = run_phase_sweep(a.config, [](const PhaseCell& c) {
    std::cerr << "  delta " << c.delta << " rho " << c.rho << "  " << to_string(c.stats.method) << " "
              << c.stats.mean_nmse << '\n';
  });
  const fs::path out = a.common.out;
  io::write_file(out / "phase.csv", csv_text(io::result_rows(r)));
  io::write_file(out / "phase_manifest.json", io::manifest(r).dump(2) + "\n");
  for (Method m : a.config.methods) {
    const std::string name = std::string(to_string(m));
    io::write_file(out / ("phase_" + name + ".gp"), io::phase_plot_script("phase.csv", name));
  }
  return kOk;
}

// ---------------------------------------------------- optimize-beta-epsilon

struct OptimizeArgs {
  Common common;
  std::size_t n = 1000, m = 200, k = 1;
  std::optional<double> alpha;
  int bits = 1;
};

int cmd_optimize(const OptimizeArgs& a) {
  ParameterStudyConfig c;
  c.point = {a.n, a.m, a.k};
  if (a.alpha) {
    c.alpha = *a.alpha;
  } else if (auto r = reference_alpha(QuantizerDesign::kLloydMax, a.bits)) {
    c.alpha = *r;
  } else {
    throw InvalidInput("--bits must be 1, 3 or 5 unless --alpha is given");
  }
  c.trials = a.common.trials.value_or(100);
  c.master_seed = a.common.seed;
  const ParameterStudy s = optimize_beta_epsilon(c);
  io::Json j = io::to_json(s);
  std::cout << j.dump(2) << '\n';
  const fs::path out = a.common.out;
  io::write_file(out / "optimize.json",
                 io::manifest("optimize-beta-epsilon", a.common.seed, {{"bits", a.bits}}, std::move(j)).dump(2) +
                     "\n");
  return s.converged ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed sensing with correlated measurement noise"};
  app.require_subcommand(1);

  ReproduceArgs rep;
  auto* c_rep = app.add_subcommand("reproduce", "Run a stored experiment recipe");
  add_common(c_rep, rep.common);
  c_rep->add_option("--figure", rep.figure, "fig2 | fig3 | fig4 | fig5 | table1 | tables")->required();
  c_rep->add_option("--scale", rep.scale, "paper | desk")->check(CLI::IsMember({"paper", "desk"}));

  SolveArgs sol;
  auto* c_sol = app.add_subcommand("solve", "Reconstruct one signal from files");
  add_common(c_sol, sol.common);
  c_sol->add_option("--matrix", sol.matrix_file, "System matrix CSV")->required();
  c_sol->add_option("--y", sol.y_file, "Measurement vector CSV")->required();
  c_sol->add_option("--method", sol.method, "bpdn | bpdn-scale | biht");
  c_sol->add_option("--alpha", sol.alpha, "Correlation gain");
  c_sol->add_option("--epsilon", sol.epsilon, "Fidelity radius or 'auto'");
  c_sol->add_option("--sigma", sol.sigma, "Noise standard deviation for --epsilon auto");
  c_sol->add_option("--bits", sol.bits, "Quantizer depth for --epsilon auto without --sigma");
  c_sol->add_option("--k", sol.k, "Sparsity (biht)");

  QuantizerArgs qa;
  auto* c_q = app.add_subcommand("quantizer", "Design a quantizer and fit its gain model");
  add_common(c_q, qa.common);
  c_q->add_option("--design", qa.design, "lloyd-max | uniform")->check(CLI::IsMember({"lloyd-max", "uniform"}));
  c_q->add_option("--bits", qa.bits, "Bit depth");
  c_q->add_option("--sigma", qa.sigma, "Input standard deviation");
  c_q->add_option("--samples", qa.samples, "Monte-Carlo samples for the gain fit");

  PhaseArgs pa;
  auto* c_p = app.add_subcommand("phase-sweep", "Sweep the (delta, rho) phase space");
  add_common(c_p, pa.common);
  c_p->add_option("--n", pa.config.n, "Signal length");
  c_p->add_option("--delta-step", pa.config.delta_step, "Spacing of the M/N columns");
  c_p->add_option("--rho-step", pa.config.rho_step, "Spacing of the K/M rows");
  c_p->add_option("--deltas", pa.config.deltas, "Explicit delta columns");
  c_p->add_option("--rho-max", pa.config.rho_max, "Largest K/M");
  c_p->add_option("--cutoff", pa.config.nmse_cutoff, "Stop a column once mean NMSE exceeds this");
  c_p->add_option("--bits", pa.config.bits, "Equivalent quantizer depth of the noise");
  c_p->add_option("--methods", pa.methods, "Methods to sweep");

  OptimizeArgs oa;
  auto* c_o = app.add_subcommand("optimize-beta-epsilon", "Simplex search over scale factor and radius");
  add_common(c_o, oa.common);
  c_o->add_option("--n", oa.n, "Signal length");
  c_o->add_option("--m", oa.m, "Measurements");
  c_o->add_option("--k", oa.k, "Sparsity");
  c_o->add_option("--alpha", oa.alpha, "Correlation gain");
  c_o->add_option("--bits", oa.bits, "Selects the reference alpha when --alpha is absent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kInvalid;
  }

  auto run = [&](const Common& common, auto&& body) -> int {
    if (common.workers > 0) kernels::set_threads(common.workers);
    try {
      return body();
    } catch (const InvalidInput& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalid;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalid;
    } catch (const io::ParseError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInvalid;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kSolverFailure;
    }
  };

  if (*c_rep) return run(rep.common, [&] { return cmd_reproduce(rep); });
  if (*c_sol) return run(sol.common, [&] { return cmd_solve(sol); });
  if (*c_q) return run(qa.common, [&] { return cmd_quantizer(qa); });
  if (*c_p) return run(pa.common, [&] { return cmd_phase_sweep(pa); });
  if (*c_o) return run(oa.common, [&] { return cmd_optimize(oa); });
  return kInvalid;
}
