#pragma once

#include <cstdint>
#include <vector>

#include "fsat/linalg.hpp"

namespace fsat {

/// Spin quantum number j > 0, stored as the integer 2j.
class Spin {
 public:
  /// Throws Error(InvalidSpin) unless twice_j >= 1.
  static Spin from_twice(int twice_j);
  /// Throws Error(InvalidSpin) unless 2j is a positive integer.
  static Spin from_value(double j);
  /// Inverts N = 2j + 1; requires dim >= 2.
  static Spin from_dim(Index dim);

  int twice() const noexcept { return twice_; }
  double value() const noexcept { return 0.5 * twice_; }
  Index dim() const noexcept { return twice_ + 1; }
  bool is_integer() const noexcept { return twice_ % 2 == 0; }
  /// Magnetic quantum number at basis index i; basis is ordered m = j, j-1, ..., -j.
  double m_at(Index i) const noexcept { return value() - static_cast<double>(i); }

  friend bool operator==(Spin, Spin) = default;

 private:
  explicit Spin(int twice) : twice_(twice) {}
  int twice_;
};

struct KickedTopParams {
  Spin j;
  double k = 12.0;
};

/// Haar-random unitary from Gaussian QR with the R-phase correction.
UnitaryOperator sample_cue(Index dim, std::uint64_t seed);

/// U U^T for a CUE member U. Throws Error(SemanticError) for non-CUE input.
UnitaryOperator make_coe(const UnitaryOperator& cue);

struct AngularMomentumOps {
  Spin j;
  ComplexMatrix jx, jy, jz;
};

AngularMomentumOps angular_momentum_ops(Spin j);

/// exp(-i angle J_y), through the Hermitian eigendecomposition of J_y.
ComplexMatrix rotation_y(Spin j, double angle);

/// exp(-i pi J_y / 2) exp(-i k J_z^2 / j).
UnitaryOperator kicked_top(const KickedTopParams& params);

enum class PerturbationForm { QubitCollectiveZ, SpinJz };

/// Collective z-rotation of strength delta. The qubit form acts on
/// 2^n_qubits computational states with generator sum_j sigma_z^j / 2; the
/// spin form is exp(-i delta J_z). Both generators are diagonal.
struct PerturbationSpec {
  PerturbationForm form = PerturbationForm::QubitCollectiveZ;
  double delta = 0.0;
  int n_qubits = 0;
  Spin j = Spin::from_twice(1);

  static PerturbationSpec qubit(int n_qubits, double delta);
  static PerturbationSpec spin(Spin j, double delta);

  Index dim() const noexcept;
  PerturbationSpec with_delta(double d) const {
    PerturbationSpec s = *this;
    s.delta = d;
    return s;
  }
};

/// Eigenvalues of the generator V in basis order.
RealVector perturbation_generator_diagonal(const PerturbationSpec& spec);

UnitaryOperator perturbation_unitary(const PerturbationSpec& spec);

/// (1/N) sum_i lambda_i^2 over the generator eigenvalues.
double perturbation_generator_variance(const PerturbationSpec& spec);

/// U_p U, certified. Throws Error(DimensionMismatch) on unequal dimensions.
UnitaryOperator perturbed_map(const UnitaryOperator& up, const UnitaryOperator& u);

/// One eigenspace of R = exp(-i pi J_y): an N x d isometry and its eigenvalue.
struct SymmetrySector {
  Complex eigenvalue;
  ComplexMatrix basis;
};

/// Eigenspaces of exp(-i pi J_y), sorted by the argument of the eigenvalue.
/// Integer j gives eigenvalues +-1, half-integer j gives +-i.
std::vector<SymmetrySector> rotation_sectors(Spin j);

/// The subspace odd under the pi rotation about y (R v = -v). Columns are the
/// projections of |j, m> for m = j, j-1, ... after Gram-Schmidt, so the basis
/// is ordered by decreasing |m|. The dimension is measured, never assumed.
struct OddSubspace {
  Spin j;
  ComplexMatrix basis;  // N x measured_dim isometry

  Index measured_dim() const noexcept { return basis.cols(); }
  /// The size implied by "dimension j"; only defined for integer j.
  bool matches_expected_dim() const noexcept {
    return j.is_integer() && measured_dim() == j.twice() / 2;
  }
};

OddSubspace odd_subspace(Spin j);

/// Throws Error(DimensionUnexpected), quoting the measured dimension, unless
/// the odd subspace has dimension j.
void require_expected_dim(const OddSubspace& s);

/// P^dagger U P for a map commuting with R. Throws Error(SymmetryBroken) if
/// ||U R - R U|| exceeds 1e-9 N, Error(DimensionUnexpected) for an empty
/// subspace and Error(NonUnitary) if the restriction fails certification.
UnitaryOperator restrict_to_odd_subspace(const UnitaryOperator& u, const OddSubspace& s);

}  // namespace fsat
