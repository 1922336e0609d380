#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsat/analysis.hpp"
#include "fsat/config.hpp"

namespace fsat {

/// One row of results.csv.
struct ResultRow {
  std::string ensemble;
  Index dim = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  SaturationEstimator estimator = SaturationEstimator::Ipr;
  double f_inf_mean = 0.0;
  double f_inf_stderr = 0.0;
  Index n_eigenstates = 0;
};

inline constexpr const char* kResultsHeader =
    "ensemble,N,seed,delta,estimator,f_inf_mean,f_inf_stderr,n_eigenstates";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

/// Eigenstate-averaged decay and LDOS kept for figures, first seed only.
struct CellArtifacts {
  double delta = 0.0;
  FidelitySeries series;
  LdosHistogram ldos;
};

struct NamedFit {
  std::string name;
  FitResult fit;
};

struct ExperimentResult {
  std::string ensemble;
  Index dim = 0;
  int beta = 2;
  double lambda_sq = 0.0;
  std::vector<ResultRow> rows;
  std::vector<CellArtifacts> artifacts;
  std::vector<NamedFit> fits;
  std::vector<std::string> notes;  // skipped fits and similar
  SaturationCurve mean_curve;
  std::vector<SaturationCurve> seed_curves;
  std::optional<DeltaWindow> fgr_window;
  std::vector<double> seed_constants;  // pinned C per seed over the window
  std::optional<double> ratio;         // against ratio_reference
  std::optional<double> floor_ratio;   // F_inf / ((4 - beta)/N) at the largest delta
  std::string config_hash;
  std::string tool_version;
  std::string timestamp;
};

std::string tool_version();

/// The unperturbed map for one realization.
UnitaryOperator build_map(const ExperimentConfig& config, std::uint64_t seed);

/// Eigenstate indices used by the config for a map of dimension config.dim.
std::vector<Index> select_eigenstates(const ExperimentConfig& config);

struct RunOptions {
  int workers = 0;  // 0: take the config value
  bool resume = false;
  std::optional<std::filesystem::path> output_dir;
  bool write_files = true;
  std::function<void(const std::string&)> log;
};

/// Runs the sweep: one decomposition per seed, one per (seed, delta) cell,
/// estimators over the selected eigenstates, then fits. With write_files the
/// output directory receives results.csv, fits.json, manifest.json and the
/// per-delta series/ and ldos/ tables. An existing run is resumed only with
/// `resume` and a matching config hash, otherwise refused. On failure the
/// completed rows are flushed before the error propagates.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Recomputes fits and curves from rows and artifacts.
void summarize(const ExperimentConfig& config, ExperimentResult& result);

/// Mean over seeds of f_inf_mean for one estimator, as a curve.
SaturationCurve curve_from_rows(const std::vector<ResultRow>& rows, SaturationEstimator estimator,
                                double lambda_sq, std::optional<std::uint64_t> seed = std::nullopt);

/// Loads a finished run from its results.csv and sibling files.
ExperimentResult load_result(const std::filesystem::path& results_csv);

FidelitySeries read_series_csv(const std::filesystem::path& path);
LdosHistogram read_ldos_csv(const std::filesystem::path& path);

}  // namespace fsat
