#include "fsat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "fsat/error.hpp"

namespace fsat {

using std::numbers::pi;

std::string_view to_string(FitModel m) noexcept {
  switch (m) {
    case FitModel::ExponentialDecay: return "exponential-decay";
    case FitModel::Lorentzian: return "lorentzian";
    case FitModel::PowerLaw: return "power-law";
  }
  return "unknown";
}

std::string to_json(const FitResult& fit) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : fit.params) params[k] = v;
  nlohmann::json j{{"model", to_string(fit.model)},
                   {"params", std::move(params)},
                   {"residual", fit.residual},
                   {"window", fit.window}};
  return j.dump();
}

void SaturationCurve::validate() const {
  if (deltas.size() != f_inf.size() || deltas.empty()) {
    throw Error(ErrorKind::SemanticError, "SaturationCurve: deltas and f_inf must be non-empty and equal length");
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i > 0 && !(deltas[i] > deltas[i - 1])) {
      throw Error(ErrorKind::SemanticError, "SaturationCurve: deltas must be strictly increasing");
    }
    if (!(f_inf[i] > 0.0) || f_inf[i] > 1.0 + 1e-9) {
      throw Error(ErrorKind::SemanticError, "SaturationCurve: f_inf values must lie in (0, 1]");
    }
  }
}

namespace {

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

Line least_squares_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    ss += r * r;
  }
  line.rms = std::sqrt(ss / n);
  return line;
}

std::string delta_window_text(double lo, double hi, std::size_t points) {
  std::ostringstream os;
  os << "delta in [" << lo << ", " << hi << "], " << points << " points";
  return os.str();
}

}  // namespace

double default_fit_floor(double f_inf) { return std::sqrt(f_inf); }

Index leading_run_above(std::span<const double> values, double floor) {
  Index k = 0;
  while (k < static_cast<Index>(values.size()) && values[static_cast<std::size_t>(k)] > floor) ++k;
  return k;
}

FitResult fit_exponential_decay(const FidelitySeries& series, double fit_floor) {
  const Index k = leading_run_above(series.values, fit_floor);
  if (k < 5) {
    std::ostringstream os;
    os << "fit_exponential_decay: only " << k << " points above floor " << fit_floor;
    throw Error(ErrorKind::InsufficientDecay, os.str());
  }
  std::vector<double> x(static_cast<std::size_t>(k)), y(static_cast<std::size_t>(k));
  for (Index n = 0; n < k; ++n) {
    x[static_cast<std::size_t>(n)] = static_cast<double>(n);
    y[static_cast<std::size_t>(n)] = std::log(series.values[static_cast<std::size_t>(n)]);
  }
  const Line line = least_squares_line(x, y);
  FitResult fit;
  fit.model = FitModel::ExponentialDecay;
  fit.params = {{"rate", -line.slope}, {"intercept", line.intercept}, {"fit_floor", fit_floor}};
  fit.residual = line.rms;
  std::ostringstream os;
  os << "n in [0, " << k - 1 << "], F > " << fit_floor;
  fit.window = os.str();
  return fit;
}

double wrapped_lorentzian_mass(double width, double lo, double hi) {
  // Wrapped Cauchy with r = exp(-width/2): CDF(t) = atan(coth(width/4) tan(t/2)) / pi.
  const double c = 1.0 / std::tanh(0.25 * width);
  // tan(t/2) flips sign just past +-pi, so clamp edges that carry rounding.
  auto cdf = [c](double t) {
    if (t >= pi) return 0.5;
    if (t <= -pi) return -0.5;
    return std::atan(c * std::tan(0.5 * t)) / pi;
  };
  return cdf(hi) - cdf(lo);
}

FitResult fit_lorentzian(const LdosHistogram& h) {
  const double bin = h.bin_width();
  auto sse = [&](double log_width) {
    const double width = std::exp(log_width);
    double s = 0.0;
    for (std::size_t i = 0; i < h.weights.size(); ++i) {
      const double r = h.weights[i] - wrapped_lorentzian_mass(width, h.bin_edges[i], h.bin_edges[i + 1]);
      s += r * r;
    }
    return s;
  };
  const double lo = std::log(bin * 1e-3);
  const double hi = std::log(4.0 * pi);
  // Coarse scan first: the objective can be flat below one bin.
  constexpr int kScan = 200;
  int best = 0;
  double best_val = sse(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double v = sse(lo + (hi - lo) * i / kScan);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double step = (hi - lo) / kScan;
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(kScan, best + 1) * step;
  const auto [log_width, value] = boost::math::tools::brent_find_minima(sse, a, b, 50);
  const double width = std::exp(log_width);
  if (!std::isfinite(width) || !std::isfinite(value) || best == kScan) {
    throw Error(ErrorKind::FitDiverged, "fit_lorentzian: no interior optimum for the width");
  }
  FitResult fit;
  fit.model = FitModel::Lorentzian;
  fit.params = {{"width", width}, {"degenerate", width < bin ? 1.0 : 0.0}};
  fit.residual = std::sqrt(value / static_cast<double>(h.weights.size()));
  std::ostringstream os;
  os << h.weights.size() << " bins over (-pi, pi], centre fixed at 0";
  fit.window = os.str();
  return fit;
}

FitResult fit_power_law(const SaturationCurve& curve, double delta_min, double delta_max) {
  curve.validate();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
    if (curve.deltas[i] >= delta_min && curve.deltas[i] <= delta_max && curve.deltas[i] > 0.0) {
      x.push_back(std::log(curve.deltas[i]));
      y.push_back(std::log(curve.f_inf[i]));
    }
  }
  if (x.size() < 4) {
    std::ostringstream os;
    os << "fit_power_law: " << x.size() << " points in [" << delta_min << ", " << delta_max
       << "], need 4";
    throw Error(ErrorKind::InsufficientPoints, os.str());
  }
  const Line line = least_squares_line(x, y);
  FitResult fit;
  fit.model = FitModel::PowerLaw;
  fit.params = {{"exponent", line.slope},
                {"amplitude", std::exp(line.intercept)},
                {"C_pinned", pinned_constant(curve, delta_min, delta_max)}};
  fit.residual = line.rms;
  fit.window = delta_window_text(delta_min, delta_max, x.size());
  return fit;
}

double pinned_constant(const SaturationCurve& curve, double delta_min, double delta_max) {
  double acc = 0.0;
  int count = 0;
  const double n = static_cast<double>(curve.dim);
  for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
    const double d = curve.deltas[i];
    if (d >= delta_min && d <= delta_max) {
      acc += curve.f_inf[i] * d * d * curve.lambda_sq * n;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::InsufficientPoints, "pinned_constant: empty window");
  return acc / count;
}

double strong_perturbation_floor(int beta, Index dim) {
  if (beta != 1 && beta != 2) {
    throw Error(ErrorKind::SemanticError, "strong_perturbation_floor: beta must be 1 or 2");
  }
  return static_cast<double>(4 - beta) / static_cast<double>(dim);
}

double ensemble_ratio(const SaturationCurve& curve_coe, const SaturationCurve& curve_cue,
                      double delta_min, double delta_max) {
  if (curve_coe.dim != curve_cue.dim || curve_coe.deltas.size() != curve_cue.deltas.size()) {
    throw Error(ErrorKind::GridMismatch, "ensemble_ratio: curves differ in dimension or grid size");
  }
  double acc = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < curve_coe.deltas.size(); ++i) {
    if (std::abs(curve_coe.deltas[i] - curve_cue.deltas[i]) > 1e-12) {
      throw Error(ErrorKind::GridMismatch, "ensemble_ratio: delta grids differ");
    }
    const double d = curve_coe.deltas[i];
    if (d >= delta_min && d <= delta_max) {
      acc += curve_coe.f_inf[i] / curve_cue.f_inf[i];
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorKind::InsufficientPoints, "ensemble_ratio: empty window");
  return acc / count;
}

std::optional<DeltaWindow> fgr_window(const SaturationCurve& curve, int beta, double floor_multiple) {
  const double spacing = mean_level_spacing(curve.dim);
  const double floor = strong_perturbation_floor(beta, curve.dim);
  std::optional<DeltaWindow> w;
  for (std::size_t i = 0; i < curve.deltas.size(); ++i) {
    const double d = curve.deltas[i];
    if (gamma_theory(d, curve.lambda_sq) > 2.0 * spacing && curve.f_inf[i] > floor_multiple * floor) {
      if (!w) w = DeltaWindow{d, d};
      w->hi = d;
    }
  }
  return w;
}

LdosHistogram ldos_from_fidelity(std::span<const double> fidelity, int bins) {
  if (bins < 8) throw Error(ErrorKind::SemanticError, "ldos_from_fidelity: at least 8 bins are required");
  LdosHistogram h;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) h.bin_edges[static_cast<std::size_t>(k)] = -pi + 2.0 * pi * k / bins;
  h.weights.assign(static_cast<std::size_t>(bins), 0.0);
  // density(t) = (1/2pi) [A_0 + 2 sum_{n>=1} A_n cos(n t)],  A_n = sqrt(F(n)).
  for (int b = 0; b < bins; ++b) {
    const double lo = h.bin_edges[static_cast<std::size_t>(b)];
    const double hi = h.bin_edges[static_cast<std::size_t>(b) + 1];
    double mass = std::sqrt(fidelity[0]) * (hi - lo);
    for (std::size_t n = 1; n < fidelity.size(); ++n) {
      const double dn = static_cast<double>(n);
      mass += 2.0 * std::sqrt(fidelity[n]) * (std::sin(dn * hi) - std::sin(dn * lo)) / dn;
    }
    h.weights[static_cast<std::size_t>(b)] = mass / (2.0 * pi);
  }
  return h;
}

double collapse_distance(std::span<const double> f_a, double delta_a, Index points_a,
                         std::span<const double> f_b, double delta_b, Index points_b) {
  const double sa = delta_a * delta_a;
  const double sb = delta_b * delta_b;
  const double x_max = std::min(sa * static_cast<double>(points_a - 1),
                                sb * static_cast<double>(points_b - 1));
  // Linear interpolation of ln F on the rescaled time axis.
  auto interp = [](std::span<const double> f, double scale, double x) {
    const double pos = x / scale;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= f.size()) return std::log(f.back());
    const double t = pos - static_cast<double>(i);
    return (1.0 - t) * std::log(f[i]) + t * std::log(f[i + 1]);
  };
  double ss = 0.0;
  int count = 0;
  auto sample = [&](double scale, Index points) {
    for (Index n = 0; n < points; ++n) {
      const double x = scale * static_cast<double>(n);
      if (x > x_max) break;
      const double d = interp(f_a, sa, x) - interp(f_b, sb, x);
      ss += d * d;
      ++count;
    }
  };
  sample(sa, points_a);
  sample(sb, points_b);
  if (count == 0) return 0.0;
  return std::sqrt(ss / count);
}

}  // namespace fsat
