#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsat/linalg.hpp"

namespace fsat {

enum class FidelityMethod { DirectPower, Spectral };
std::string_view to_string(FidelityMethod m) noexcept;

/// Which initial state a series was started from.
struct InitialState {
  enum class Kind { Eigenstate, Random, Explicit };
  Kind kind = Kind::Explicit;
  Index eigenstate = -1;     // Kind::Eigenstate
  std::uint64_t seed = 0;    // Kind::Random
  Index averaged_over = 0;   // > 0 when the series is an average over eigenstates
};

/// F(n) for n = 0..n_max.
struct FidelitySeries {
  std::vector<double> values;
  FidelityMethod method = FidelityMethod::Spectral;
  InitialState initial_state;

  Index n_max() const noexcept { return static_cast<Index>(values.size()) - 1; }
};

/// Reference path: keeps U^n psi0 and (U_p U)^n psi0 and emits their squared
/// overlap. O(N^2) per step. Throws DimensionMismatch / NotNormalized.
FidelitySeries fidelity_direct(const UnitaryOperator& u, const UnitaryOperator& up,
                               const ComplexVector& psi0, Index n_max);

/// F(n) = |sum_l |a_lm|^2 exp(-i n phi'_l)|^2 for the unperturbed eigenstate m.
FidelitySeries fidelity_spectral(const OverlapMatrix& overlaps, Index m, Index n_max);

/// F_m(n) for every column m and n in [start, start + count), as a
/// count x N matrix. Evaluated blockwise as a dense product.
RealMatrix eigenstate_fidelity_window(const OverlapMatrix& overlaps, Index start, Index count);

/// Mean of F_m(n) over the given eigenstates (all when `states` is empty), n = 0..n_max.
FidelitySeries averaged_eigenstate_fidelity(const OverlapMatrix& overlaps, Index n_max,
                                            std::span<const Index> states = {});

/// Expansion coefficients c = V^dagger psi in an eigenbasis.
ComplexVector eigenbasis_coefficients(const SpectralDecomposition& d, const ComplexVector& psi);

/// F(n) for an arbitrary initial state given by its unperturbed-eigenbasis
/// coefficients, n in [start, start + count).
std::vector<double> state_fidelity_window(const OverlapMatrix& overlaps,
                                          const ComplexVector& coefficients, Index start,
                                          Index count);

/// Haar-random unit vector (normalized complex Gaussian).
ComplexVector haar_random_state(Index dim, std::uint64_t seed);

enum class SaturationEstimator { TimeAverage, Ipr, RandomStateSum };
std::string_view to_string(SaturationEstimator e) noexcept;

struct TimeWindow {
  Index start = 2000;
  Index count = 2000;
};

struct SaturationEstimate {
  double value = 0.0;
  SaturationEstimator estimator = SaturationEstimator::Ipr;
  std::optional<TimeWindow> window;
  double statistical_error = 0.0;
};

/// Window mean; error is the sample standard deviation over sqrt(count).
/// Throws WindowOutOfRange when the window leaves the series.
SaturationEstimate saturation_time_average(std::span<const double> values, TimeWindow window);
SaturationEstimate saturation_time_average(const FidelitySeries& series, TimeWindow window);

/// sum_l |a_lm|^4. Throws IndexOutOfRange.
SaturationEstimate saturation_ipr(const OverlapMatrix& overlaps, Index m);

/// (1/N^2) sum_l (sum_m |a_lm|^2)(sum_j |a_lj|^2), evaluated as written.
SaturationEstimate saturation_random_state(const OverlapMatrix& overlaps);

/// Time-average estimate for the given eigenstates (all when empty), in order.
std::vector<SaturationEstimate> time_average_all_eigenstates(const OverlapMatrix& overlaps,
                                                             TimeWindow window,
                                                             std::span<const Index> states = {});

struct LdosHistogram {
  std::vector<double> bin_edges;  // bins + 1 uniform edges spanning [-pi, pi]
  std::vector<double> weights;
  std::optional<Index> source_eigenstate;  // empty for the eigenstate average
  std::optional<double> fitted_width;

  std::vector<double> bin_centers() const;
  double bin_width() const { return bin_edges[1] - bin_edges[0]; }
  double total_weight() const;
};

inline constexpr int kDefaultLdosBins = 101;

/// Weights |a_lm|^2 binned against wrap(phi'_l - phi_m). With no eigenstate
/// the per-state histograms are averaged uniformly. Needs bins >= 8.
LdosHistogram ldos(const OverlapMatrix& overlaps, std::optional<Index> m,
                   int bins = kDefaultLdosBins);

/// Decay rate delta^2 * lambda_sq.
double gamma_theory(double delta, double lambda_sq);
/// Typical squared coupling sigma^2 = delta^2 lambda_sq / N.
double coupling_sq_theory(double delta, double lambda_sq, Index dim);
/// Mean eigenphase spacing 2 pi / N.
double mean_level_spacing(Index dim);
/// Golden-rule width 2 pi sigma^2 / spacing.
double golden_rule_width(double sigma_sq, double spacing);

/// Mean over l != m of |delta V_lm|^2 with V expressed in the eigenbasis of `d`.
double measured_coupling_sq(const SpectralDecomposition& d, const RealVector& generator_diagonal,
                            double delta);

/// Provenance written as comment lines above exported CSV tables.
struct CsvProvenance {
  std::string ensemble;
  Index dim = 0;
  double delta = 0.0;
  std::optional<std::uint64_t> seed;
  std::string method;
};

void write_series_csv(std::ostream& out, const FidelitySeries& series, const CsvProvenance& p);
void write_ldos_csv(std::ostream& out, const LdosHistogram& h, const CsvProvenance& p);

}  // namespace fsat
