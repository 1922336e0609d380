#include "fsat/ensembles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fsat/error.hpp"
#include "fsat/rng.hpp"

namespace fsat {

Spin Spin::from_twice(int twice_j) {
  if (twice_j < 1) {
    throw Error(ErrorKind::InvalidSpin, "spin: 2j must be a positive integer, got " + std::to_string(twice_j));
  }
  return Spin(twice_j);
}

Spin Spin::from_value(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!(rounded >= 1.0) || std::abs(twice - rounded) > 1e-9) {
    std::ostringstream os;
    os << "spin: j = " << j << " is not a positive integer or half-integer";
    throw Error(ErrorKind::InvalidSpin, os.str());
  }
  return Spin(static_cast<int>(rounded));
}

Spin Spin::from_dim(Index dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidSpin, "spin: dimension 2j+1 must be at least 2");
  return Spin(static_cast<int>(dim - 1));
}

UnitaryOperator sample_cue(Index dim, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, std::numbers::sqrt2 / 2.0);
  ComplexMatrix z(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Index i = 0; i < dim; ++i) {
    const Complex rii = r(i, i);
    const double mod = std::abs(rii);
    q.col(i) *= mod > 0.0 ? rii / mod : Complex(1.0, 0.0);
  }
  return certify_unitary(std::move(q), unitarity_tolerance(dim), Provenance::CUE, seed);
}

UnitaryOperator make_coe(const UnitaryOperator& cue) {
  if (cue.provenance() != Provenance::CUE) {
    throw Error(ErrorKind::SemanticError,
                std::string("make_coe: expected a CUE operator, got ") + std::string(to_string(cue.provenance())));
  }
  ComplexMatrix c = cue.matrix() * cue.matrix().transpose();
  // Symmetrize the rounding noise away; U U^T is symmetric in exact arithmetic.
  c = (0.5 * (c + c.transpose())).eval();
  return certify_unitary(std::move(c), unitarity_tolerance(cue.dim()), Provenance::COE, cue.seed());
}

AngularMomentumOps angular_momentum_ops(Spin j) {
  const Index n = j.dim();
  const double jj = j.value() * (j.value() + 1.0);
  ComplexMatrix jplus = ComplexMatrix::Zero(n, n);
  ComplexMatrix jz = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double m = j.m_at(i);
    jz(i, i) = m;
    // <m+1| J+ |m> sits one row above.
    if (i > 0) jplus(i - 1, i) = std::sqrt(jj - m * (m + 1.0));
  }
  const ComplexMatrix jminus = jplus.adjoint();
  AngularMomentumOps ops{j, {}, {}, std::move(jz)};
  ops.jx = 0.5 * (jplus + jminus);
  ops.jy = (jplus - jminus) / Complex(0.0, 2.0);
  return ops;
}

namespace {

struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};

HermitianEigen jy_eigen(Spin j) {
  const AngularMomentumOps ops = angular_momentum_ops(j);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(ops.jy);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::DecompositionFailed, "rotation_y: J_y eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

ComplexMatrix rotation_y(Spin j, double angle) {
  const HermitianEigen e = jy_eigen(j);
  ComplexVector phasors(e.values.size());
  for (Index i = 0; i < e.values.size(); ++i) phasors(i) = std::polar(1.0, -angle * e.values(i));
  return e.vectors * phasors.asDiagonal() * e.vectors.adjoint();
}

UnitaryOperator kicked_top(const KickedTopParams& params) {
  const Spin j = params.j;
  const Index n = j.dim();
  const ComplexMatrix rot = rotation_y(j, std::numbers::pi / 2.0);
  ComplexVector twist(n);
  for (Index i = 0; i < n; ++i) {
    const double m = j.m_at(i);
    twist(i) = std::polar(1.0, -params.k * m * m / j.value());
  }
  ComplexMatrix u = rot * twist.asDiagonal();
  return certify_unitary(std::move(u), unitarity_tolerance(n), Provenance::QKT);
}

PerturbationSpec PerturbationSpec::qubit(int n_qubits, double delta) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw Error(ErrorKind::SemanticError, "perturbation: n_qubits must lie in [1, 30]");
  }
  PerturbationSpec s;
  s.form = PerturbationForm::QubitCollectiveZ;
  s.delta = delta;
  s.n_qubits = n_qubits;
  return s;
}

PerturbationSpec PerturbationSpec::spin(Spin j, double delta) {
  PerturbationSpec s;
  s.form = PerturbationForm::SpinJz;
  s.delta = delta;
  s.j = j;
  return s;
}

Index PerturbationSpec::dim() const noexcept {
  return form == PerturbationForm::QubitCollectiveZ ? (Index{1} << n_qubits) : j.dim();
}

RealVector perturbation_generator_diagonal(const PerturbationSpec& spec) {
  const Index n = spec.dim();
  RealVector v(n);
  for (Index i = 0; i < n; ++i) {
    if (spec.form == PerturbationForm::QubitCollectiveZ) {
      const int weight = std::popcount(static_cast<std::uint64_t>(i));
      v(i) = 0.5 * static_cast<double>(spec.n_qubits - 2 * weight);
    } else {
      v(i) = spec.j.m_at(i);
    }
  }
  return v;
}

UnitaryOperator perturbation_unitary(const PerturbationSpec& spec) {
  const RealVector gen = perturbation_generator_diagonal(spec);
  ComplexMatrix up = ComplexMatrix::Zero(gen.size(), gen.size());
  for (Index i = 0; i < gen.size(); ++i) up(i, i) = std::polar(1.0, -spec.delta * gen(i));
  return certify_unitary(std::move(up), unitarity_tolerance(gen.size()), Provenance::Perturbation);
}

double perturbation_generator_variance(const PerturbationSpec& spec) {
  const RealVector gen = perturbation_generator_diagonal(spec);
  return gen.squaredNorm() / static_cast<double>(gen.size());
}

UnitaryOperator perturbed_map(const UnitaryOperator& up, const UnitaryOperator& u) {
  if (up.dim() != u.dim()) {
    std::ostringstream os;
    os << "perturbed_map: perturbation has dimension " << up.dim() << ", map has " << u.dim();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  return compose(up, u);
}

std::vector<SymmetrySector> rotation_sectors(Spin j) {
  const HermitianEigen e = jy_eigen(j);
  // exp(-i pi y) for y = -j..j takes only two values; group by them.
  std::vector<SymmetrySector> sectors;
  for (Index i = 0; i < e.values.size(); ++i) {
    const Complex ev = std::polar(1.0, -std::numbers::pi * e.values(i));
    auto it = std::find_if(sectors.begin(), sectors.end(),
                           [&](const SymmetrySector& s) { return std::abs(s.eigenvalue - ev) < 1e-6; });
    if (it == sectors.end()) {
      sectors.push_back({ev, ComplexMatrix(e.vectors.rows(), 0)});
      it = sectors.end() - 1;
    }
    it->basis.conservativeResize(Eigen::NoChange, it->basis.cols() + 1);
    it->basis.col(it->basis.cols() - 1) = e.vectors.col(i);
  }
  for (auto& s : sectors) {
    // Snap to the exact value (+-1 or +-i).
    s.eigenvalue = Complex(std::round(s.eigenvalue.real()), std::round(s.eigenvalue.imag()));
  }
  std::sort(sectors.begin(), sectors.end(), [](const SymmetrySector& a, const SymmetrySector& b) {
    return std::arg(a.eigenvalue) < std::arg(b.eigenvalue);
  });
  return sectors;
}

OddSubspace odd_subspace(Spin j) {
  const Index n = j.dim();
  OddSubspace out{j, ComplexMatrix(n, 0)};
  ComplexMatrix projector = ComplexMatrix::Zero(n, n);
  for (const auto& s : rotation_sectors(j)) {
    if (std::abs(s.eigenvalue - Complex(-1.0, 0.0)) < 1e-9) projector = s.basis * s.basis.adjoint();
  }
  // Gram-Schmidt over P|j,m>, m = j, j-1, ...; |m> and |-m> project onto the
  // same direction, so duplicates drop out by norm.
  std::vector<ComplexVector> kept;
  for (Index i = 0; i < n; ++i) {
    ComplexVector v = projector.col(i);
    for (const auto& q : kept) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm > 1e-8) kept.push_back(v / norm);
  }
  out.basis.resize(n, static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.basis.col(static_cast<Index>(c)) = kept[c];
  return out;
}

void require_expected_dim(const OddSubspace& s) {
  if (!s.matches_expected_dim()) {
    std::ostringstream os;
    os << "odd subspace of j = " << s.j.value() << " has measured dimension " << s.measured_dim()
       << ", not j";
    throw Error(ErrorKind::DimensionUnexpected, os.str());
  }
}

UnitaryOperator restrict_to_odd_subspace(const UnitaryOperator& u, const OddSubspace& s) {
  const Index n = s.j.dim();
  if (u.dim() != n) {
    throw Error(ErrorKind::DimensionMismatch, "restrict_to_odd_subspace: map and spin dimensions differ");
  }
  if (s.measured_dim() == 0) {
    std::ostringstream os;
    os << "restrict_to_odd_subspace: odd subspace of j = " << s.j.value() << " is empty";
    throw Error(ErrorKind::DimensionUnexpected, os.str());
  }
  const ComplexMatrix r = rotation_y(s.j, std::numbers::pi);
  const double commutator = max_entry_distance(u.matrix() * r, r * u.matrix());
  if (!(commutator <= spectral_tolerance(n))) {
    std::ostringstream os;
    os << "restrict_to_odd_subspace: ||UR - RU|| = " << commutator;
    throw Error(ErrorKind::SymmetryBroken, os.str());
  }
  ComplexMatrix restricted = s.basis.adjoint() * u.matrix() * s.basis;
  return certify_unitary(std::move(restricted), unitarity_tolerance(s.measured_dim()),
                         Provenance::QKTOdd);
}

}  // namespace fsat
