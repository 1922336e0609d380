#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fsat/ensembles.hpp"
#include "fsat/error.hpp"
#include "fsat/linalg.hpp"

using namespace fsat;

namespace {

ComplexMatrix diag_phases(std::initializer_list<double> phases, double sign = -1.0) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(phases.size()), static_cast<Index>(phases.size()));
  Index i = 0;
  for (double p : phases) {
    m(i, i) = std::polar(1.0, sign * p);
    ++i;
  }
  return m;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an fsat::Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("certify_unitary accepts the identity with zero defect") {
  const UnitaryOperator u = certify_unitary(ComplexMatrix::Identity(4, 4), unitarity_tolerance(4));
  CHECK(u.unitarity_defect() == 0.0);
  CHECK(u.dim() == 4);
}

TEST_CASE("certify_unitary accepts a diagonal phase matrix") {
  const UnitaryOperator u = certify_unitary(diag_phases({0.3, 1.1}, +1.0), 1e-10);
  CHECK(u.unitarity_defect() <= 1e-15);
}

TEST_CASE("certify_unitary rejects a scaled entry and bad shapes") {
  ComplexMatrix m = sample_cue(6, 3).matrix();
  m(2, 4) *= 1.01;
  CHECK(kind_of([&] { certify_unitary(m, unitarity_tolerance(6)); }) == ErrorKind::NonUnitary);
  CHECK(kind_of([&] { certify_unitary(ComplexMatrix::Identity(3, 2), 1e-10); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { certify_unitary(ComplexMatrix(0, 0), 1e-10); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(wrap_phase(pi) == doctest::Approx(pi));
  CHECK(wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_phase(0.25) == doctest::Approx(0.25));
}

TEST_CASE("spectral_decompose of the identity") {
  const auto d = spectral_decompose(certify_unitary(ComplexMatrix::Identity(3, 3), 1e-10));
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(d.phases(i)) < 1e-14);
  CHECK(unitarity_defect(d.vectors) < 1e-12);
}

TEST_CASE("phase sign convention: diag(exp(-i theta)) gives +theta") {
  const auto d = spectral_decompose(certify_unitary(diag_phases({2.0, 0.5}), 1e-10));
  CHECK(d.phases(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.phases(1) == doctest::Approx(2.0).epsilon(1e-12));
  // standard basis vectors up to phase, in sorted order
  CHECK(std::abs(d.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(d.vectors(0, 1)) == doctest::Approx(1.0));
  for (double theta : {0.1, 1.0, 2.5, 3.1}) {
    const auto single = spectral_decompose(certify_unitary(diag_phases({theta}), 1e-10));
    CHECK(single.phases(0) == doctest::Approx(theta).epsilon(1e-12));
  }
}

TEST_CASE("reassembly reproduces random CUE samples") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const UnitaryOperator u = sample_cue(8, seed);
    const auto d = spectral_decompose(u);
    CHECK(max_entry_distance(reassemble(d), u.matrix()) < 1e-9 * 8);
    for (Index i = 1; i < d.dim(); ++i) CHECK(d.phases(i) >= d.phases(i - 1));
    CHECK(d.source == Provenance::CUE);
  }
}

TEST_CASE("degenerate spectra still give orthonormal vectors") {
  // Rotation of diag(a, a, b) keeps a two-fold cluster.
  const UnitaryOperator v = sample_cue(3, 11);
  const ComplexMatrix m = v.matrix() * diag_phases({0.7, 0.7, -1.2}) * v.matrix().adjoint();
  const auto d = spectral_decompose(certify_unitary(m, unitarity_tolerance(3)));
  CHECK(unitarity_defect(d.vectors) < 1e-12);
  CHECK(max_entry_distance(reassemble(d), m) < 1e-9 * 3);
}

TEST_CASE("overlap of a decomposition with itself is the identity in modulus") {
  const auto d = spectral_decompose(sample_cue(12, 4));
  const OverlapMatrix ov = overlap_matrix(d, d);
  CHECK((ov.weights() - RealMatrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(ov.completeness_defect() < 1e-12);
}

TEST_CASE("swapped eigenvector columns give permutation moduli") {
  const auto d = spectral_decompose(sample_cue(5, 2));
  SpectralDecomposition swapped = d;
  swapped.vectors.col(1).swap(swapped.vectors.col(3));
  std::swap(swapped.phases(1), swapped.phases(3));
  const OverlapMatrix ov = overlap_matrix(d, swapped);
  RealMatrix expected = RealMatrix::Identity(5, 5);
  expected.row(1).swap(expected.row(3));
  CHECK((ov.weights() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("overlaps under a weak z-rotation are complete") {
  const UnitaryOperator u = sample_cue(8, 9);
  const UnitaryOperator up = perturbation_unitary(PerturbationSpec::qubit(3, 0.2));
  const OverlapMatrix ov = overlap_matrix(spectral_decompose(u), spectral_decompose(perturbed_map(up, u)));
  // Column sums by direct summation.
  for (Index m = 0; m < 8; ++m) {
    double s = 0.0;
    for (Index l = 0; l < 8; ++l) s += std::norm(ov.amplitudes()(l, m));
    CHECK(std::abs(s - 1.0) < 1e-10);
  }
}

TEST_CASE("overlap_matrix rejects mismatched dimensions") {
  const auto a = spectral_decompose(sample_cue(4, 1));
  const auto b = spectral_decompose(sample_cue(5, 1));
  CHECK(kind_of([&] { overlap_matrix(a, b); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("compose multiplies and keeps the right-hand seed") {
  const UnitaryOperator a = sample_cue(4, 1);
  const UnitaryOperator b = sample_cue(4, 2);
  const UnitaryOperator c = compose(a, b);
  CHECK(max_entry_distance(c.matrix(), a.matrix() * b.matrix()) < 1e-14);
  CHECK(c.provenance() == Provenance::Composed);
  CHECK(c.seed() == b.seed());
}
