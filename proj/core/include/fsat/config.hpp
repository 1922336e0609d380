#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsat/analysis.hpp"
#include "fsat/ensembles.hpp"
#include "fsat/fidelity.hpp"

namespace fsat {

enum class Ensemble { CUE, COE, QKT, QKTOdd };
std::string_view to_string(Ensemble e) noexcept;

/// Symmetry class index: 2 for CUE, 1 for the orthogonal-class maps.
int beta_of(Ensemble e) noexcept;

enum class EstimatorChoice { Ipr, TimeAverage, Both };
std::string_view to_string(EstimatorChoice e) noexcept;

struct EigenstateSelection {
  bool all = true;
  Index count = 0;
  std::uint64_t seed = 0;
};

/// A parsed and validated experiment description. The text grammar is
/// documented in README.md.
struct ExperimentConfig {
  Ensemble ensemble = Ensemble::CUE;
  /// Dimension of the map whose eigenstates are studied. For QKT-oe this is
  /// the odd-subspace dimension.
  Index dim = 0;
  /// Spin of the kicked top (QKT, QKT-oe).
  std::optional<Spin> j;
  double k = 12.0;
  PerturbationForm perturbation = PerturbationForm::QubitCollectiveZ;
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds;
  EigenstateSelection eigenstates;
  TimeWindow window;
  EstimatorChoice estimator = EstimatorChoice::Both;
  int bins = kDefaultLdosBins;
  std::filesystem::path output_dir = "results";
  std::optional<DeltaWindow> fit_window;
  Index series_length = 200;
  std::optional<std::filesystem::path> ratio_reference;
  int workers = 1;

  /// Normalized key = value text of every field that affects results
  /// (output_dir and workers excluded). Hashing this identifies a run.
  std::string canonical_text() const;
  std::string hash() const;

  /// The perturbation for strength delta matching this config.
  PerturbationSpec perturbation_spec(double delta) const;
  std::vector<SaturationEstimator> estimators() const;
};

/// Parses the key = value format and applies defaults. Throws
/// Error(ParseError) with the offending line, or Error(SemanticError).
ExperimentConfig validate_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Odd-subspace dimension of exp(-i pi J_y) for spin j (0 for half-integer j).
Index odd_subspace_dim(Spin j) noexcept;

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);

}  // namespace fsat
