#include "corrcs/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace corrcs::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + t + "'");
  }
  if (used != t.size()) throw ParseError("not a number: '" + t + "'");
  return v;
}

std::size_t parse_size(const std::string& s) {
  const std::string t = trim(s);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(t, &used);
  } catch (const std::exception&) {
    throw ParseError("not an integer: '" + t + "'");
  }
  if (used != t.size() || t.front() == '-') throw ParseError("not an integer: '" + t + "'");
  return static_cast<std::size_t>(v);
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key: ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value for ") + key + ": " + e.what());
  }
}

Json grid_json(const std::vector<GridPoint>& grid) {
  Json g = Json::array();
  for (const auto& p : grid) g.push_back({{"n", p.n}, {"m", p.m}, {"k", p.k}});
  return g;
}

Json methods_json(const std::vector<Method>& methods) {
  Json a = Json::array();
  for (Method m : methods) a.push_back(std::string(to_string(m)));
  return a;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<ResultRow> result_rows(const ExperimentResult& result) {
  std::vector<ResultRow> rows;
  for (const PointResult& p : result.points) {
    for (const MethodStats& s : p.methods) {
      ResultRow r;
      r.n = p.point.n;
      r.m = p.point.m;
      r.k = p.point.k;
      r.delta = static_cast<double>(p.point.m) / static_cast<double>(p.point.n);
      r.rho = static_cast<double>(p.point.k) / static_cast<double>(p.point.m);
      r.method = to_string(s.method);
      r.noise_mode = to_string(result.config.noise_mode);
      r.bits = result.config.bits;
      r.trials = s.trials;
      r.mean_nmse = s.mean_nmse;
      r.ci99 = s.ci99;
      r.nonconverged = s.nonconverged;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<ResultRow> result_rows(const PhaseSweepResult& result) {
  std::vector<ResultRow> rows;
  for (const PhaseCell& c : result.cells) {
    ResultRow r;
    r.n = c.point.n;
    r.m = c.point.m;
    r.k = c.point.k;
    r.delta = c.delta;
    r.rho = c.rho;
    r.method = to_string(c.stats.method);
    r.noise_mode = c.stats.method == Method::kBiht ? "one-bit-signs" : to_string(NoiseMode::kLloydMax);
    r.bits = result.config.bits;
    r.trials = c.stats.trials;
    r.mean_nmse = c.stats.mean_nmse;
    r.ci99 = c.stats.ci99;
    r.nonconverged = c.stats.nonconverged;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.n << ',' << r.m << ',' << r.k << ',' << format_double(r.delta) << ',' << format_double(r.rho) << ','
        << r.method << ',' << r.noise_mode << ',' << r.bits << ',' << r.trials << ',' << format_double(r.mean_nmse)
        << ',' << format_double(r.ci99) << ',' << r.nonconverged << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultHeader) throw ParseError("result CSV: bad header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto c = split(trim(line), ',');
    if (c.size() != 12) throw ParseError("result CSV: expected 12 columns, got " + std::to_string(c.size()));
    ResultRow r;
    r.n = parse_size(c[0]);
    r.m = parse_size(c[1]);
    r.k = parse_size(c[2]);
    r.delta = parse_double(c[3]);
    r.rho = parse_double(c[4]);
    r.method = c[5];
    r.noise_mode = c[6];
    r.bits = static_cast<int>(parse_size(c[7]));
    r.trials = parse_size(c[8]);
    r.mean_nmse = parse_double(c[9]);
    r.ci99 = parse_double(c[10]);
    r.nonconverged = parse_size(c[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["grid"] = grid_json(c.grid);
  j["trials"] = c.trials;
  j["noise_mode"] = to_string(c.noise_mode);
  j["bits"] = c.bits;
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
  j["sigma_w_ratio"] = c.sigma_w_ratio ? Json(*c.sigma_w_ratio) : Json(nullptr);
  j["methods"] = methods_json(c.methods);
  j["master_seed"] = c.master_seed;
  j["epsilon_mode"] = to_string(c.epsilon_mode);
  j["explicit_epsilon"] = c.explicit_epsilon;
  j["beta_ratio"] = c.beta_ratio;
  j["epsilon_ratio"] = c.epsilon_ratio;
  j["unit_norm_signals"] = c.unit_norm_signals;
  j["gain_fit_samples"] = c.gain_fit_samples;
  j["biht_max_iterations"] = c.biht_max_iterations;
  j["solver"] = {{"root_tolerance", c.solver.root_tolerance},
                 {"gap_tolerance", c.solver.gap_tolerance},
                 {"max_matvecs", c.solver.max_matvecs}};
  return j;
}

Json to_json(const PhaseSweepConfig& c) {
  Json j;
  j["n"] = c.n;
  j["delta_step"] = c.delta_step;
  j["rho_step"] = c.rho_step;
  j["trials"] = c.trials;
  j["methods"] = methods_json(c.methods);
  j["nmse_cutoff"] = c.nmse_cutoff;
  j["master_seed"] = c.master_seed;
  j["bits"] = c.bits;
  j["deltas"] = c.deltas;
  j["rho_max"] = c.rho_max;
  j["gain_fit_samples"] = c.gain_fit_samples;
  j["biht_max_iterations"] = c.biht_max_iterations;
  return j;
}

Json to_json(const MethodStats& s) {
  Json j;
  j["method"] = to_string(s.method);
  j["mean_nmse"] = s.mean_nmse;
  j["ci99"] = s.ci99;
  j["trials"] = s.trials;
  j["nonconverged"] = s.nonconverged;
  j["flagged"] = s.flagged;
  if (!s.per_trial.empty()) j["per_trial"] = s.per_trial;
  return j;
}

Json to_json(const ScalarQuantizer& q) {
  return {{"bits", q.bits()}, {"thresholds", q.thresholds()}, {"levels", q.levels()}};
}

Json to_json(const GainModelFit& f) {
  return {{"alpha", f.alpha},
          {"sigma_q_sq", f.sigma_q_sq},
          {"sigma_r_sq", f.sigma_r_sq},
          {"sigma_ybar_sq", f.sigma_ybar_sq},
          {"sample_count", f.sample_count}};
}

Json to_json(const SolverReport& r) {
  return {{"residual_norm", r.residual_norm},
          {"l1_norm", r.l1_norm},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"constraint_residual", r.constraint_residual},
          {"tau", r.tau},
          {"relative_gap", r.relative_gap},
          {"matvecs", r.matvecs},
          {"newton_steps", r.newton_steps},
          {"solution", r.solution}};
}

Json to_json(const ParameterStudy& s) {
  return {{"point", {{"n", s.point.n}, {"m", s.point.m}, {"k", s.point.k}}},
          {"alpha", s.alpha},
          {"trials", s.trials},
          {"p_alpha", s.p_alpha},
          {"epsilon1_ratio", s.epsilon1_ratio},
          {"p1", s.p1},
          {"beta2_ratio", s.beta2_ratio},
          {"epsilon2_ratio", s.epsilon2_ratio},
          {"p2", s.p2},
          {"evaluations", s.evaluations},
          {"converged", s.converged}};
}

ScalarQuantizer quantizer_from_json(const Json& j) {
  try {
    return ScalarQuantizer(field<int>(j, "bits"), field<std::vector<double>>(j, "thresholds"),
                           field<std::vector<double>>(j, "levels"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("quantizer JSON: ") + e.what());
  }
}

GainModelFit gain_fit_from_json(const Json& j) {
  GainModelFit f;
  f.alpha = field<double>(j, "alpha");
  f.sigma_q_sq = field<double>(j, "sigma_q_sq");
  f.sigma_r_sq = field<double>(j, "sigma_r_sq");
  f.sigma_ybar_sq = field<double>(j, "sigma_ybar_sq");
  f.sample_count = field<std::size_t>(j, "sample_count");
  return f;
}

SolverReport report_from_json(const Json& j) {
  SolverReport r;
  r.residual_norm = field<double>(j, "residual_norm");
  r.l1_norm = field<double>(j, "l1_norm");
  r.iterations = field<int>(j, "iterations");
  r.converged = field<bool>(j, "converged");
  r.constraint_residual = field<double>(j, "constraint_residual");
  r.tau = field<double>(j, "tau");
  r.relative_gap = field<double>(j, "relative_gap");
  r.matvecs = field<int>(j, "matvecs");
  r.newton_steps = field<int>(j, "newton_steps");
  r.solution = field<std::vector<double>>(j, "solution");
  return r;
}

Json manifest(std::string_view kind, std::uint64_t master_seed, Json config, Json results) {
  Json j;
  j["schema"] = kManifestSchema;
  j["version"] = kVersion;
  j["kind"] = kind;
  j["master_seed"] = master_seed;
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  return j;
}

Json manifest(const ExperimentResult& result) {
  Json points = Json::array();
  for (const PointResult& p : result.points) {
    Json methods = Json::array();
    for (const MethodStats& s : p.methods) methods.push_back(to_json(s));
    points.push_back({{"n", p.point.n}, {"m", p.point.m}, {"k", p.point.k}, {"alpha", p.alpha}, {"methods", methods}});
  }
  return manifest("experiment", result.config.master_seed, to_json(result.config), std::move(points));
}

Json manifest(const PhaseSweepResult& result) {
  Json cells = Json::array();
  for (const PhaseCell& c : result.cells) {
    cells.push_back({{"delta", c.delta},
                     {"rho", c.rho},
                     {"n", c.point.n},
                     {"m", c.point.m},
                     {"k", c.point.k},
                     {"stats", to_json(c.stats)}});
  }
  Json results = {{"alpha", result.alpha}, {"cells", std::move(cells)}};
  return manifest("phase-sweep", result.config.master_seed, to_json(result.config), std::move(results));
}

void validate_manifest(const Json& j) {
  if (!j.is_object()) throw ParseError("manifest: not an object");
  if (field<std::string>(j, "schema") != kManifestSchema) throw ParseError("manifest: unknown schema");
  field<std::string>(j, "version");
  field<std::string>(j, "kind");
  field<std::uint64_t>(j, "master_seed");
  if (!j.contains("config") || !j.contains("results")) throw ParseError("manifest: missing config or results");
}

void write_matrix_csv(std::ostream& out, const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if (c) out << ',';
      out << format_double(a(i, c));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (rows == 0) {
      cols = cells.size();
    } else if (cells.size() != cols) {
      throw ParseError("matrix CSV: row " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(cols));
    }
    for (const auto& c : cells) data.push_back(parse_double(c));
    ++rows;
  }
  if (rows == 0) throw ParseError("matrix CSV: empty");
  return Matrix(rows, cols, std::move(data));
}

void write_vector_csv(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << format_double(x) << '\n';
}

Vector read_vector_csv(std::istream& in) {
  Vector v;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    // A single-row vector is accepted too.
    for (const auto& c : split(t, ',')) v.push_back(parse_double(c));
  }
  if (v.empty()) throw ParseError("vector CSV: empty");
  return v;
}

std::string plot_script(std::string_view csv_name, std::string_view title, const std::vector<std::string>& methods) {
  std::ostringstream s;
  s << "# columns: " << kResultHeader << "\n";
  s << "set datafile separator ','\n";
  s << "set title '" << title << "'\n";
  s << "set xlabel 'grid point (M, K)'\n";
  s << "set ylabel 'mean NMSE'\n";
  s << "set logscale y\n";
  s << "set key top left\n";
  s << "plot ";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i) s << ", \\\n     ";
    s << "'" << csv_name << "' every ::1 using ($0):(strcol(6) eq '" << methods[i]
      << "' ? $10 : NaN):11 with yerrorlines title '" << methods[i] << "'";
  }
  s << "\n";
  return s.str();
}

std::string phase_plot_script(std::string_view csv_name, std::string_view method) {
  std::ostringstream s;
  s << "# columns: " << kResultHeader << "\n";
  s << "set datafile separator ','\n";
  s << "set title 'mean NMSE, " << method << "'\n";
  s << "set xlabel 'delta = M/N'\n";
  s << "set ylabel 'rho = K/M'\n";
  s << "set logscale cb\n";
  s << "plot '" << csv_name << "' every ::1 using 4:5:(strcol(6) eq '" << method
    << "' ? $10 : NaN) with points pt 5 palette notitle\n";
  return s.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace corrcs::io
