#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsat/fidelity.hpp"

namespace fsat {

enum class FitModel { ExponentialDecay, Lorentzian, PowerLaw };
std::string_view to_string(FitModel m) noexcept;

struct FitResult {
  FitModel model = FitModel::PowerLaw;
  std::map<std::string, double> params;
  double residual = 0.0;  // RMS in fit space
  std::string window;
};

std::string to_json(const FitResult& fit);

/// F_inf against delta for one ensemble, dimension and perturbation generator.
struct SaturationCurve {
  std::vector<double> deltas;  // strictly increasing
  std::vector<double> f_inf;   // each in (0, 1]
  std::string ensemble;
  Index dim = 0;
  double lambda_sq = 0.0;
  bool eigenstate_averaged = true;

  /// Throws SemanticError if the invariants do not hold.
  void validate() const;
};

/// Geometric midpoint between 1 and the saturation level: sqrt(f_inf).
double default_fit_floor(double f_inf);

/// Line fit of ln F(n) against n over the leading run with F(n) > fit_floor.
/// Throws InsufficientDecay if fewer than 5 points qualify.
FitResult fit_exponential_decay(const FidelitySeries& series, double fit_floor);

/// Probability mass of a Lorentzian of full width `width` wrapped onto the
/// circle, over the phase interval [lo, hi] within [-pi, pi].
double wrapped_lorentzian_mass(double width, double lo, double hi);

/// One-parameter least-squares fit (centre 0, unit mass) of a wrapped
/// Lorentzian to the histogram weights. A width below one bin is reported
/// with params["degenerate"] = 1. Throws FitDiverged when no finite optimum
/// exists inside the search bracket.
FitResult fit_lorentzian(const LdosHistogram& h);

/// Line fit on (ln delta, ln F_inf) over [delta_min, delta_max]; also reports
/// the window-averaged C = F_inf delta^2 lambda_sq N. Needs 4 points.
FitResult fit_power_law(const SaturationCurve& curve, double delta_min, double delta_max);

/// Window mean of F_inf delta^2 lambda_sq N.
double pinned_constant(const SaturationCurve& curve, double delta_min, double delta_max);

/// (4 - beta) / N. Throws SemanticError unless beta is 1 or 2.
double strong_perturbation_floor(int beta, Index dim);

/// Mean of F_coe / F_cue over grid points inside [delta_min, delta_max].
/// Throws GridMismatch when grids or dimensions differ.
double ensemble_ratio(const SaturationCurve& curve_coe, const SaturationCurve& curve_cue,
                      double delta_min, double delta_max);

struct DeltaWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// Grid points where delta^2 lambda_sq > 2 * (2 pi / N) and F_inf exceeds
/// floor_multiple times the strong-perturbation floor. Empty when none do.
std::optional<DeltaWindow> fgr_window(const SaturationCurve& curve, int beta,
                                      double floor_multiple = 3.0);

/// Histogram of the circle density whose Fourier coefficients are the
/// amplitudes sqrt(F(|n|)), i.e. the LDOS implied by an eigenstate fidelity
/// series. Bin masses are integrated exactly from the truncated series.
LdosHistogram ldos_from_fidelity(std::span<const double> fidelity, int bins = kDefaultLdosBins);

/// RMS distance between ln F curves plotted against delta^2 n, over the
/// common range of their first `points_a` / `points_b` samples.
double collapse_distance(std::span<const double> f_a, double delta_a, Index points_a,
                         std::span<const double> f_b, double delta_b, Index points_b);

/// Number of leading samples with F(n) > floor.
Index leading_run_above(std::span<const double> values, double floor);

}  // namespace fsat
