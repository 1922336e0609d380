#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fsat/ensembles.hpp"
#include "fsat/error.hpp"
#include "fsat/fidelity.hpp"

using namespace fsat;

namespace {

constexpr double pi = std::numbers::pi;

struct Setup {
  UnitaryOperator u;
  UnitaryOperator up;
  SpectralDecomposition unperturbed;
  OverlapMatrix overlaps;
};

Setup cue_setup(int n_qubits, double delta, std::uint64_t seed) {
  UnitaryOperator u = sample_cue(Index{1} << n_qubits, seed);
  UnitaryOperator up = perturbation_unitary(PerturbationSpec::qubit(n_qubits, delta));
  SpectralDecomposition d = spectral_decompose(u);
  OverlapMatrix ov = overlap_matrix(d, spectral_decompose(perturbed_map(up, u)));
  return {std::move(u), std::move(up), std::move(d), std::move(ov)};
}

OverlapMatrix identity_overlaps(Index n) {
  RealVector phases = RealVector::LinSpaced(n, -1.0, 1.0);
  return OverlapMatrix(ComplexMatrix::Identity(n, n), phases, phases);
}

}  // namespace

TEST_CASE("direct fidelity without perturbation is one") {
  const UnitaryOperator u = sample_cue(6, 1);
  const UnitaryOperator id = certify_unitary(ComplexMatrix::Identity(6, 6), 1e-12);
  const auto s = fidelity_direct(u, id, haar_random_state(6, 3), 40);
  for (double f : s.values) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("common eigenbasis keeps fidelity at one") {
  ComplexMatrix u = ComplexMatrix::Zero(2, 2), up = ComplexMatrix::Zero(2, 2);
  u(0, 0) = std::polar(1.0, -0.7);
  u(1, 1) = std::polar(1.0, -1.9);
  up(0, 0) = std::polar(1.0, -0.1);
  up(1, 1) = std::polar(1.0, 0.1);
  ComplexVector psi(2);
  psi << 1.0, 0.0;
  const auto s = fidelity_direct(certify_unitary(u, 1e-12), certify_unitary(up, 1e-12), psi, 30);
  for (double f : s.values) CHECK(f == doctest::Approx(1.0));
}

TEST_CASE("direct and spectral paths agree at N = 8") {
  const Setup s = cue_setup(3, 0.3, 5);
  const ComplexVector psi = s.unperturbed.vectors.col(0);
  const auto direct = fidelity_direct(s.u, s.up, psi, 50);
  const auto spectral = fidelity_spectral(s.overlaps, 0, 50);
  for (std::size_t n = 0; n <= 50; ++n) CHECK(std::abs(direct.values[n] - spectral.values[n]) < 1e-8);
}

TEST_CASE("direct and spectral paths agree at N = 16 for every eigenstate") {
  const Setup s = cue_setup(4, 0.25, 6);
  const RealMatrix window = eigenstate_fidelity_window(s.overlaps, 0, 101);
  for (Index m = 0; m < 16; ++m) {
    const auto direct = fidelity_direct(s.u, s.up, s.unperturbed.vectors.col(m), 100);
    const auto spectral = fidelity_spectral(s.overlaps, m, 100);
    double worst = 0.0;
    for (std::size_t n = 0; n <= 100; ++n) {
      worst = std::max(worst, std::abs(direct.values[n] - spectral.values[n]));
      worst = std::max(worst, std::abs(window(static_cast<Index>(n), m) - spectral.values[n]));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("spectral fidelity with identity overlaps is one") {
  const auto s = fidelity_spectral(identity_overlaps(5), 2, 20);
  for (double f : s.values) CHECK(f == doctest::Approx(1.0));
}

TEST_CASE("two-level beat alternates between one and zero") {
  ComplexMatrix a(2, 2);
  a << 1, 1, 1, -1;
  a /= std::sqrt(2.0);
  RealVector unp(2), pert(2);
  unp << 0.0, 0.0;
  pert << 0.0, pi;
  const auto s = fidelity_spectral(OverlapMatrix(a, unp, pert), 0, 7);
  for (std::size_t n = 0; n <= 7; ++n) CHECK(s.values[n] == doctest::Approx(n % 2 == 0 ? 1.0 : 0.0));
}

TEST_CASE("time average of a constant series") {
  const std::vector<double> c(50, 0.37);
  const auto e = saturation_time_average(std::span<const double>(c), {10, 20});
  CHECK(e.value == doctest::Approx(0.37));
  CHECK(e.statistical_error == doctest::Approx(0.0));
  CHECK(e.estimator == SaturationEstimator::TimeAverage);
}

TEST_CASE("time average at zero perturbation is one") {
  const Setup s = cue_setup(3, 0.0, 2);
  for (const auto& e : time_average_all_eigenstates(s.overlaps, {2000, 2000})) CHECK(e.value == doctest::Approx(1.0));
}

TEST_CASE("time average window is checked") {
  const std::vector<double> c(10, 1.0);
  CHECK_THROWS_AS(saturation_time_average(std::span<const double>(c), {5, 6}), Error);
  CHECK_THROWS_AS(saturation_time_average(std::span<const double>(c), {0, 0}), Error);
}

TEST_CASE("IPR equals the long-time average of the eigenstate fidelity") {
  const Setup s = cue_setup(4, 0.25, 7);
  const auto averages = time_average_all_eigenstates(s.overlaps, {2000, 2000});
  int agree = 0;
  for (Index m = 0; m < 16; ++m) {
    const double ipr = saturation_ipr(s.overlaps, m).value;
    const auto& t = averages[static_cast<std::size_t>(m)];
    if (std::abs(t.value - ipr) <= 4.0 * t.statistical_error) ++agree;
    // a much longer window pins it down regardless of correlations
    const auto series = fidelity_spectral(s.overlaps, m, 60000);
    CHECK(saturation_time_average(series, {0, 60001}).value == doctest::Approx(ipr).epsilon(0.05));
  }
  CHECK(agree >= 15);
}

TEST_CASE("sampled time averages match the full evaluation") {
  const Setup s = cue_setup(4, 0.25, 8);
  const std::vector<Index> states{3, 9, 12};
  const auto all = time_average_all_eigenstates(s.overlaps, {100, 300});
  const auto some = time_average_all_eigenstates(s.overlaps, {100, 300}, states);
  REQUIRE(some.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(some[i].value == doctest::Approx(all[static_cast<std::size_t>(states[i])].value).epsilon(1e-12));
  }
}

TEST_CASE("IPR: identity gives one, uniform spreading gives 1/N") {
  CHECK(saturation_ipr(identity_overlaps(4), 1).value == 1.0);
  const Index n = 8;
  ComplexMatrix dft(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index m = 0; m < n; ++m) dft(l, m) = std::polar(1.0 / std::sqrt(8.0), 2 * pi * l * m / n);
  const OverlapMatrix ov(dft, RealVector::Zero(n), RealVector::Zero(n));
  CHECK(saturation_ipr(ov, 3).value == doctest::Approx(1.0 / 8.0));
  CHECK_THROWS_AS(saturation_ipr(ov, 8), Error);
}

TEST_CASE("IPR is bounded by 1/N and 1") {
  const Setup s = cue_setup(5, 0.4, 9);
  for (Index m = 0; m < 32; ++m) {
    const double f = saturation_ipr(s.overlaps, m).value;
    CHECK(f >= 1.0 / 32 - 1e-12);
    CHECK(f <= 1.0 + 1e-12);
  }
}

TEST_CASE("weak perturbation keeps the IPR near one") {
  const Setup s = cue_setup(6, 1e-4, 10);
  double mean = 0.0;
  for (Index m = 0; m < 64; ++m) mean += saturation_ipr(s.overlaps, m).value / 64.0;
  CHECK(mean > 0.99);
}

TEST_CASE("random-state double sum is forced to 1/N") {
  CHECK(saturation_random_state(cue_setup(3, 0.7, 1).overlaps).value == doctest::Approx(1.0 / 8).epsilon(1e-8));
  CHECK(std::abs(saturation_random_state(cue_setup(8, 0.05, 2).overlaps).value - 1.0 / 256) < 1e-8);
}

TEST_CASE("random-state fidelity window matches the direct path") {
  const Setup s = cue_setup(4, 0.3, 12);
  const ComplexVector psi = haar_random_state(16, 99);
  CHECK(psi.norm() == doctest::Approx(1.0));
  const auto direct = fidelity_direct(s.u, s.up, psi, 300);
  const auto window = state_fidelity_window(s.overlaps, eigenbasis_coefficients(s.unperturbed, psi), 0, 301);
  for (std::size_t n = 0; n <= 300; ++n) CHECK(std::abs(direct.values[n] - window[n]) < 1e-8);
  const auto late = state_fidelity_window(s.overlaps, eigenbasis_coefficients(s.unperturbed, psi), 250, 51);
  for (std::size_t n = 0; n <= 50; ++n) CHECK(std::abs(late[n] - window[250 + n]) < 1e-10);
}

TEST_CASE("averaged eigenstate fidelity honours the subset") {
  const Setup s = cue_setup(3, 0.3, 13);
  const std::vector<Index> states{1, 4};
  const auto avg = averaged_eigenstate_fidelity(s.overlaps, 20, states);
  const auto a = fidelity_spectral(s.overlaps, 1, 20), b = fidelity_spectral(s.overlaps, 4, 20);
  for (std::size_t n = 0; n <= 20; ++n) CHECK(avg.values[n] == doctest::Approx(0.5 * (a.values[n] + b.values[n])));
  CHECK(avg.initial_state.averaged_over == 2);
}

TEST_CASE("direct path input checks") {
  const UnitaryOperator u = sample_cue(4, 1);
  ComplexVector psi = ComplexVector::Zero(4);
  psi(0) = 1.1;
  CHECK_THROWS_AS(fidelity_direct(u, u, psi, 3), Error);
  CHECK_THROWS_AS(fidelity_direct(u, sample_cue(8, 1), ComplexVector::Unit(4, 0), 3), Error);
}

TEST_CASE("LDOS of identity overlaps sits in the central bin") {
  const auto h = ldos(identity_overlaps(6), std::nullopt);
  CHECK(h.weights.size() == 101);
  CHECK(h.weights[50] == doctest::Approx(1.0));
  CHECK(h.total_weight() == doctest::Approx(1.0));
  const Setup s = cue_setup(3, 0.0, 3);
  CHECK(ldos(s.overlaps, 2).weights[50] == doctest::Approx(1.0));
  CHECK_THROWS_AS(ldos(s.overlaps, 2, 4), Error);
}

TEST_CASE("LDOS is complete for every eigenstate") {
  const Setup s = cue_setup(5, 0.3, 4);
  for (Index m = 0; m < 32; ++m) CHECK(std::abs(ldos(s.overlaps, m, 64).total_weight() - 1.0) < 1e-10);
  CHECK(std::abs(ldos(s.overlaps, std::nullopt).total_weight() - 1.0) < 1e-10);
}

TEST_CASE("decay-rate theory helpers") {
  CHECK(gamma_theory(0.0, 2.5) == 0.0);
  const double lambda_sq = perturbation_generator_variance(PerturbationSpec::qubit(10, 0.1));
  CHECK(gamma_theory(0.1, lambda_sq) == doctest::Approx(0.025));
  // 2 pi sigma^2 / Delta reproduces delta^2 lambda_sq
  const double sigma_sq = coupling_sq_theory(0.1, lambda_sq, 1024);
  CHECK(golden_rule_width(sigma_sq, mean_level_spacing(1024)) == doctest::Approx(0.025));
}

TEST_CASE("measured coupling matches the typical-coupling estimate") {
  const auto d = spectral_decompose(sample_cue(64, 17));
  const auto spec = PerturbationSpec::qubit(6, 0.2);
  const double measured = measured_coupling_sq(d, perturbation_generator_diagonal(spec), 0.2);
  const double theory = coupling_sq_theory(0.2, perturbation_generator_variance(spec), 64);
  CHECK(measured == doctest::Approx(theory).epsilon(0.2));
}

TEST_CASE("series CSV carries provenance comments") {
  FidelitySeries s;
  s.values = {1.0, 0.5};
  std::ostringstream os;
  write_series_csv(os, s, {"CUE", 16, 0.25, 3, "spectral"});
  const std::string text = os.str();
  CHECK(text.find("# ensemble=CUE\n") == 0);
  CHECK(text.find("# seed=3\n") != std::string::npos);
  CHECK(text.find("n,F\n0,1\n1,0.5\n") != std::string::npos);
}
