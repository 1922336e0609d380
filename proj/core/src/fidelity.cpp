#include "fsat/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fsat/error.hpp"
#include "fsat/rng.hpp"

namespace fsat {

std::string_view to_string(FidelityMethod m) noexcept {
  return m == FidelityMethod::DirectPower ? "direct-power" : "spectral";
}

std::string_view to_string(SaturationEstimator e) noexcept {
  switch (e) {
    case SaturationEstimator::TimeAverage: return "time-average";
    case SaturationEstimator::Ipr: return "ipr";
    case SaturationEstimator::RandomStateSum: return "random-state-sum";
  }
  return "unknown";
}

namespace {

// Time steps per block in the windowed products; bounds the phasor buffer.
constexpr Index kBlock = 256;

void check_index(const OverlapMatrix& overlaps, Index m, const char* who) {
  if (m < 0 || m >= overlaps.dim()) {
    std::ostringstream os;
    os << who << ": eigenstate index " << m << " outside [0, " << overlaps.dim() << ")";
    throw Error(ErrorKind::IndexOutOfRange, os.str());
  }
}

// Real and imaginary parts of exp(-i n phi_l) for n in [n0, n0 + rows).
void fill_phasors(const RealVector& phases, Index n0, Index rows, RealMatrix& re, RealMatrix& im) {
  re.resize(rows, phases.size());
  im.resize(rows, phases.size());
  for (Index l = 0; l < phases.size(); ++l) {
    for (Index t = 0; t < rows; ++t) {
      const double angle = -static_cast<double>(n0 + t) * phases(l);
      re(t, l) = std::cos(angle);
      im(t, l) = std::sin(angle);
    }
  }
}

}  // namespace

FidelitySeries fidelity_direct(const UnitaryOperator& u, const UnitaryOperator& up,
                               const ComplexVector& psi0, Index n_max) {
  if (u.dim() != up.dim() || psi0.size() != u.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "fidelity_direct: operator and state dimensions differ");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotNormalized, "fidelity_direct: initial state is not normalized");
  }
  const ComplexMatrix perturbed = up.matrix() * u.matrix();
  ComplexVector a = psi0;
  ComplexVector b = psi0;
  FidelitySeries s;
  s.method = FidelityMethod::DirectPower;
  s.values.reserve(static_cast<std::size_t>(n_max + 1));
  s.values.push_back(std::norm(a.dot(b)));
  for (Index n = 1; n <= n_max; ++n) {
    a = u.matrix() * a;
    b = perturbed * b;
    s.values.push_back(std::norm(a.dot(b)));
  }
  return s;
}

FidelitySeries fidelity_spectral(const OverlapMatrix& overlaps, Index m, Index n_max) {
  check_index(overlaps, m, "fidelity_spectral");
  const RealVector w = overlaps.weights().col(m);
  const RealVector& phases = overlaps.phases_perturbed();
  FidelitySeries s;
  s.method = FidelityMethod::Spectral;
  s.initial_state.kind = InitialState::Kind::Eigenstate;
  s.initial_state.eigenstate = m;
  s.values.resize(static_cast<std::size_t>(n_max + 1));
  for (Index n = 0; n <= n_max; ++n) {
    Complex amp(0.0, 0.0);
    for (Index l = 0; l < w.size(); ++l) amp += w(l) * std::polar(1.0, -static_cast<double>(n) * phases(l));
    s.values[static_cast<std::size_t>(n)] = std::norm(amp);
  }
  return s;
}

RealMatrix eigenstate_fidelity_window(const OverlapMatrix& overlaps, Index start, Index count) {
  const RealMatrix& w = overlaps.weights();
  RealMatrix out(count, overlaps.dim());
  RealMatrix re, im;
  for (Index t0 = 0; t0 < count; t0 += kBlock) {
    const Index rows = std::min(kBlock, count - t0);
    fill_phasors(overlaps.phases_perturbed(), start + t0, rows, re, im);
    const RealMatrix amp_re = re * w;
    const RealMatrix amp_im = im * w;
    out.middleRows(t0, rows) = amp_re.cwiseAbs2() + amp_im.cwiseAbs2();
  }
  return out;
}

FidelitySeries averaged_eigenstate_fidelity(const OverlapMatrix& overlaps, Index n_max,
                                            std::span<const Index> states) {
  const RealMatrix f = eigenstate_fidelity_window(overlaps, 0, n_max + 1);
  FidelitySeries s;
  s.method = FidelityMethod::Spectral;
  s.initial_state.kind = InitialState::Kind::Eigenstate;
  s.values.resize(static_cast<std::size_t>(n_max + 1));
  if (states.empty()) {
    s.initial_state.averaged_over = overlaps.dim();
    const RealVector mean = f.rowwise().mean();
    for (Index n = 0; n <= n_max; ++n) s.values[static_cast<std::size_t>(n)] = mean(n);
  } else {
    s.initial_state.averaged_over = static_cast<Index>(states.size());
    for (Index m : states) check_index(overlaps, m, "averaged_eigenstate_fidelity");
    for (Index n = 0; n <= n_max; ++n) {
      double acc = 0.0;
      for (Index m : states) acc += f(n, m);
      s.values[static_cast<std::size_t>(n)] = acc / static_cast<double>(states.size());
    }
  }
  return s;
}

ComplexVector eigenbasis_coefficients(const SpectralDecomposition& d, const ComplexVector& psi) {
  if (psi.size() != d.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "eigenbasis_coefficients: state dimension differs");
  }
  return d.vectors.adjoint() * psi;
}

std::vector<double> state_fidelity_window(const OverlapMatrix& overlaps,
                                          const ComplexVector& coefficients, Index start,
                                          Index count) {
  // amp(n) = sum_l d_l e^{-i n phi'_l} conj(g_l(n)),  g(n) = A (c o e^{-i n phi}),  d = A c.
  const Index n = overlaps.dim();
  if (coefficients.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "state_fidelity_window: coefficient dimension differs");
  }
  const ComplexMatrix& a = overlaps.amplitudes();
  const ComplexVector d = a * coefficients;
  std::vector<double> out(static_cast<std::size_t>(count));
  ComplexMatrix evolved(n, kBlock);
  for (Index t0 = 0; t0 < count; t0 += kBlock) {
    const Index cols = std::min(kBlock, count - t0);
    evolved.resize(n, cols);
    for (Index t = 0; t < cols; ++t) {
      const double steps = static_cast<double>(start + t0 + t);
      for (Index m = 0; m < n; ++m) {
        evolved(m, t) = coefficients(m) * std::polar(1.0, -steps * overlaps.phases_unperturbed()(m));
      }
    }
    const ComplexMatrix g = a * evolved;
    for (Index t = 0; t < cols; ++t) {
      const double steps = static_cast<double>(start + t0 + t);
      Complex amp(0.0, 0.0);
      for (Index l = 0; l < n; ++l) {
        amp += d(l) * std::polar(1.0, -steps * overlaps.phases_perturbed()(l)) * std::conj(g(l, t));
      }
      out[static_cast<std::size_t>(t0 + t)] = std::norm(amp);
    }
  }
  return out;
}

ComplexVector haar_random_state(Index dim, std::uint64_t seed) {
  Rng rng(seed, /*stream=*/0x5354415445ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector psi(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    psi(i) = Complex(re, im);
  }
  psi.normalize();
  return psi;
}

SaturationEstimate saturation_time_average(std::span<const double> values, TimeWindow window) {
  const auto size = static_cast<Index>(values.size());
  if (window.start < 0 || window.count < 1 || window.start + window.count > size) {
    std::ostringstream os;
    os << "saturation_time_average: window (" << window.start << ", " << window.count
       << ") exceeds series of length " << size;
    throw Error(ErrorKind::WindowOutOfRange, os.str());
  }
  const auto first = values.begin() + window.start;
  const auto last = first + window.count;
  const double count = static_cast<double>(window.count);
  double mean = 0.0;
  for (auto it = first; it != last; ++it) mean += *it;
  mean /= count;
  double ss = 0.0;
  for (auto it = first; it != last; ++it) ss += (*it - mean) * (*it - mean);
  const double sd = window.count > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  return {mean, SaturationEstimator::TimeAverage, window, sd / std::sqrt(count)};
}

SaturationEstimate saturation_time_average(const FidelitySeries& series, TimeWindow window) {
  return saturation_time_average(std::span<const double>(series.values), window);
}

SaturationEstimate saturation_ipr(const OverlapMatrix& overlaps, Index m) {
  check_index(overlaps, m, "saturation_ipr");
  return {overlaps.weights().col(m).squaredNorm(), SaturationEstimator::Ipr, std::nullopt, 0.0};
}

SaturationEstimate saturation_random_state(const OverlapMatrix& overlaps) {
  const RealMatrix& w = overlaps.weights();
  const Index n = overlaps.dim();
  double total = 0.0;
  for (Index l = 0; l < n; ++l) {
    double row_m = 0.0;
    for (Index m = 0; m < n; ++m) row_m += w(l, m);
    double row_j = 0.0;
    for (Index j = 0; j < n; ++j) row_j += w(l, j);
    total += row_m * row_j;
  }
  const double nn = static_cast<double>(n);
  return {total / (nn * nn), SaturationEstimator::RandomStateSum, std::nullopt, 0.0};
}

std::vector<SaturationEstimate> time_average_all_eigenstates(const OverlapMatrix& overlaps,
                                                             TimeWindow window,
                                                             std::span<const Index> states) {
  if (window.start < 0 || window.count < 1) {
    throw Error(ErrorKind::WindowOutOfRange, "time_average_all_eigenstates: empty window");
  }
  for (Index m : states) check_index(overlaps, m, "time_average_all_eigenstates");
  const Index cols = states.empty() ? overlaps.dim() : static_cast<Index>(states.size());
  RealMatrix w(overlaps.dim(), cols);
  for (Index c = 0; c < cols; ++c) {
    w.col(c) = overlaps.weights().col(states.empty() ? c : states[static_cast<std::size_t>(c)]);
  }
  RealMatrix re, im;
  std::vector<double> sum(static_cast<std::size_t>(cols), 0.0), sum_sq(static_cast<std::size_t>(cols), 0.0);
  for (Index t0 = 0; t0 < window.count; t0 += kBlock) {
    const Index rows = std::min(kBlock, window.count - t0);
    fill_phasors(overlaps.phases_perturbed(), window.start + t0, rows, re, im);
    const RealMatrix f = (re * w).cwiseAbs2() + (im * w).cwiseAbs2();
    for (Index c = 0; c < cols; ++c) {
      sum[static_cast<std::size_t>(c)] += f.col(c).sum();
      sum_sq[static_cast<std::size_t>(c)] += f.col(c).squaredNorm();
    }
  }
  const double count = static_cast<double>(window.count);
  std::vector<SaturationEstimate> out;
  out.reserve(static_cast<std::size_t>(cols));
  for (Index c = 0; c < cols; ++c) {
    const double mean = sum[static_cast<std::size_t>(c)] / count;
    const double var = window.count > 1
        ? std::max(0.0, (sum_sq[static_cast<std::size_t>(c)] - count * mean * mean) / (count - 1.0))
        : 0.0;
    out.push_back({mean, SaturationEstimator::TimeAverage, window, std::sqrt(var / count)});
  }
  return out;
}

std::vector<double> LdosHistogram::bin_centers() const {
  std::vector<double> c;
  c.reserve(weights.size());
  for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) c.push_back(0.5 * (bin_edges[i] + bin_edges[i + 1]));
  return c;
}

double LdosHistogram::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

LdosHistogram ldos(const OverlapMatrix& overlaps, std::optional<Index> m, int bins) {
  if (bins < 8) throw Error(ErrorKind::SemanticError, "ldos: at least 8 bins are required");
  if (m) check_index(overlaps, *m, "ldos");
  constexpr double pi = std::numbers::pi;
  LdosHistogram h;
  h.source_eigenstate = m;
  h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) h.bin_edges[static_cast<std::size_t>(k)] = -pi + 2.0 * pi * k / bins;
  h.weights.assign(static_cast<std::size_t>(bins), 0.0);
  const double width = 2.0 * pi / bins;

  const Index first = m ? *m : 0;
  const Index last = m ? *m + 1 : overlaps.dim();
  const double scale = 1.0 / static_cast<double>(last - first);
  const RealMatrix& w = overlaps.weights();
  for (Index col = first; col < last; ++col) {
    const double phi = overlaps.phases_unperturbed()(col);
    for (Index l = 0; l < overlaps.dim(); ++l) {
      const double x = wrap_phase(overlaps.phases_perturbed()(l) - phi);
      const auto b = std::clamp(static_cast<int>(std::floor((x + pi) / width)), 0, bins - 1);
      h.weights[static_cast<std::size_t>(b)] += scale * w(l, col);
    }
  }
  return h;
}

double gamma_theory(double delta, double lambda_sq) { return delta * delta * lambda_sq; }

double coupling_sq_theory(double delta, double lambda_sq, Index dim) {
  return delta * delta * lambda_sq / static_cast<double>(dim);
}

double mean_level_spacing(Index dim) { return 2.0 * std::numbers::pi / static_cast<double>(dim); }

double golden_rule_width(double sigma_sq, double spacing) {
  return 2.0 * std::numbers::pi * sigma_sq / spacing;
}

double measured_coupling_sq(const SpectralDecomposition& d, const RealVector& generator_diagonal,
                            double delta) {
  if (generator_diagonal.size() != d.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "measured_coupling_sq: generator dimension differs");
  }
  const ComplexMatrix v = d.vectors.adjoint() * generator_diagonal.asDiagonal() * d.vectors;
  const RealMatrix mod2 = v.cwiseAbs2();
  const double off = mod2.sum() - mod2.diagonal().sum();
  const double pairs = static_cast<double>(d.dim()) * static_cast<double>(d.dim() - 1);
  return delta * delta * off / pairs;
}

namespace {

void write_provenance(std::ostream& out, const CsvProvenance& p) {
  out << "# ensemble=" << p.ensemble << "\n";
  out << "# N=" << p.dim << "\n";
  out << "# delta=" << std::setprecision(17) << p.delta << "\n";
  out << "# seed=";
  if (p.seed) out << *p.seed;
  out << "\n# method=" << p.method << "\n";
}

}  // namespace

void write_series_csv(std::ostream& out, const FidelitySeries& series, const CsvProvenance& p) {
  write_provenance(out, p);
  out << "n,F\n" << std::setprecision(17);
  for (std::size_t n = 0; n < series.values.size(); ++n) out << n << ',' << series.values[n] << '\n';
}

void write_ldos_csv(std::ostream& out, const LdosHistogram& h, const CsvProvenance& p) {
  write_provenance(out, p);
  out << "bin_center,weight\n" << std::setprecision(17);
  const auto centers = h.bin_centers();
  for (std::size_t i = 0; i < centers.size(); ++i) out << centers[i] << ',' << h.weights[i] << '\n';
}

}  // namespace fsat
