#include "fsat/level_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsat/error.hpp"

namespace fsat {

using std::numbers::pi;

double surmise_pdf(SpacingModel model, double s) {
  if (s < 0.0) return 0.0;
  switch (model) {
    case SpacingModel::Poisson: return std::exp(-s);
    case SpacingModel::COE: return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
    case SpacingModel::CUE: return 32.0 / (pi * pi) * s * s * std::exp(-4.0 * s * s / pi);
  }
  return 0.0;
}

double surmise_cdf(SpacingModel model, double s) {
  if (s <= 0.0) return 0.0;
  switch (model) {
    case SpacingModel::Poisson: return 1.0 - std::exp(-s);
    case SpacingModel::COE: return 1.0 - std::exp(-0.25 * pi * s * s);
    case SpacingModel::CUE:
      return std::erf(2.0 * s / std::sqrt(pi)) - 4.0 * s / pi * std::exp(-4.0 * s * s / pi);
  }
  return 0.0;
}

std::vector<double> circular_spacings(const RealVector& phases) {
  const Index n = phases.size();
  if (n < 2) return {};
  std::vector<double> sorted(phases.data(), phases.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const double mean = 2.0 * pi / static_cast<double>(n);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 1; i < sorted.size(); ++i) out.push_back((sorted[i] - sorted[i - 1]) / mean);
  out.push_back((sorted.front() + 2.0 * pi - sorted.back()) / mean);
  return out;
}

SpacingHistogram spacing_histogram(std::span<const double> spacings, int bins, double s_max) {
  if (bins < 1 || !(s_max > 0.0) || spacings.empty()) {
    throw Error(ErrorKind::SemanticError, "spacing_histogram: need bins >= 1, s_max > 0 and data");
  }
  SpacingHistogram h;
  h.bin_width = s_max / bins;
  h.mass.assign(static_cast<std::size_t>(bins), 0.0);
  const double unit = 1.0 / static_cast<double>(spacings.size());
  for (double s : spacings) {
    if (s >= s_max) {
      h.overflow += unit;
      continue;
    }
    const auto b = std::min<std::size_t>(static_cast<std::size_t>(s / h.bin_width), h.mass.size() - 1);
    h.mass[b] += unit;
  }
  return h;
}

double l1_distance(const SpacingHistogram& h, SpacingModel model) {
  double d = 0.0;
  for (std::size_t i = 0; i < h.mass.size(); ++i) {
    const double lo = h.bin_width * static_cast<double>(i);
    const double p = surmise_cdf(model, lo + h.bin_width) - surmise_cdf(model, lo);
    d += std::abs(h.mass[i] - p);
  }
  const double tail = 1.0 - surmise_cdf(model, h.bin_width * static_cast<double>(h.mass.size()));
  return d + std::abs(h.overflow - tail);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::SemanticError, "ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double d = 0.0;
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] <= x) ++i;
    while (k < b.size() && b[k] <= x) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
  }
  return d;
}

}  // namespace fsat
