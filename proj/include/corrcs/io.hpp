#pragma once

// File formats: result CSV, run manifest JSON, quantizer and gain-model JSON,
// dense matrix/vector CSV, solver report JSON and plot scripts.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "corrcs/bpdn.hpp"
#include "corrcs/experiments.hpp"
#include "corrcs/matrix.hpp"
#include "corrcs/quantizer.hpp"

namespace corrcs::io {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kManifestSchema = "corrcs-manifest/1";
inline constexpr std::string_view kResultHeader =
    "n,m,k,delta,rho,method,noise_mode,bits,trials,mean_nmse,ci99,nonconverged";

using Json = nlohmann::ordered_json;

/// Thrown on malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g.
std::string format_double(double v);

struct ResultRow {
  std::size_t n = 0, m = 0, k = 0;
  double delta = 0.0, rho = 0.0;
  std::string method;
  std::string noise_mode;
  int bits = 0;
  std::size_t trials = 0;
  double mean_nmse = 0.0;
  double ci99 = 0.0;
  std::size_t nonconverged = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

std::vector<ResultRow> result_rows(const ExperimentResult& result);
std::vector<ResultRow> result_rows(const PhaseSweepResult& result);

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

Json to_json(const ExperimentConfig& config);
Json to_json(const PhaseSweepConfig& config);
Json to_json(const MethodStats& stats);
Json to_json(const ScalarQuantizer& q);
Json to_json(const GainModelFit& fit);
Json to_json(const SolverReport& report);
Json to_json(const ParameterStudy& study);

ScalarQuantizer quantizer_from_json(const Json& j);
GainModelFit gain_fit_from_json(const Json& j);
SolverReport report_from_json(const Json& j);

/// {schema, version, kind, master_seed, config, results}.
Json manifest(const ExperimentResult& result);
Json manifest(const PhaseSweepResult& result);
Json manifest(std::string_view kind, std::uint64_t master_seed, Json config, Json results);
/// Throws ParseError unless `j` carries the manifest schema and required keys.
void validate_manifest(const Json& j);

void write_matrix_csv(std::ostream& out, const Matrix& a);
Matrix read_matrix_csv(std::istream& in);
/// One value per line.
void write_vector_csv(std::ostream& out, std::span<const double> v);
Vector read_vector_csv(std::istream& in);

/// gnuplot script plotting mean_nmse (with ci99 error bars) of the result
/// CSV against the grid point index, one curve per method.
std::string plot_script(std::string_view csv_name, std::string_view title,
                        const std::vector<std::string>& methods);
/// Heat map of a phase sweep CSV for one method.
std::string phase_plot_script(std::string_view csv_name, std::string_view method);

void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace corrcs::io
