#pragma once

#include <span>
#include <vector>

#include "fsat/linalg.hpp"

namespace fsat {

enum class SpacingModel { Poisson, COE, CUE };

/// Wigner surmise densities with unit mean: Poisson e^{-s},
/// COE (pi/2) s e^{-pi s^2/4}, CUE (32/pi^2) s^2 e^{-4 s^2/pi}.
double surmise_pdf(SpacingModel model, double s);
double surmise_cdf(SpacingModel model, double s);

/// Nearest-neighbour spacings of eigenphases on the circle (including the
/// wrap-around gap), in units of the mean spacing 2 pi / N.
std::vector<double> circular_spacings(const RealVector& phases);

struct SpacingHistogram {
  double bin_width = 0.0;
  std::vector<double> mass;  // fraction of spacings per bin on [0, s_max)
  double overflow = 0.0;     // fraction beyond s_max
};

SpacingHistogram spacing_histogram(std::span<const double> spacings, int bins, double s_max);

/// sum_i |h_i - P(bin_i)| + |overflow - P(s >= s_max)|.
double l1_distance(const SpacingHistogram& h, SpacingModel model);

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace fsat
