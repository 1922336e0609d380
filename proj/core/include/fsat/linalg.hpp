#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace fsat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Where an operator came from. Carried through decompositions so that
/// results and cached matrices can be traced back to their generator.
enum class Provenance { CUE, COE, QKT, QKTOdd, Perturbation, Composed };

std::string_view to_string(Provenance p) noexcept;

/// Unitarity tolerance used at construction: 1e-10 per unit of dimension.
inline double unitarity_tolerance(Index dim) { return 1e-10 * static_cast<double>(dim); }
/// Spectral tolerances (eigenvector unitarity, reconstruction): 1e-9 per unit of dimension.
inline double spectral_tolerance(Index dim) { return 1e-9 * static_cast<double>(dim); }

/// Phases closer than this are treated as one degenerate cluster.
inline constexpr double kDegeneracyThreshold = 1e-10;

/// Operator 1-norm (max column abs-sum) of U^dagger U - I.
double unitarity_defect(const ComplexMatrix& m);

/// Largest entry modulus of a - b.
double max_entry_distance(const ComplexMatrix& a, const ComplexMatrix& b);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle) noexcept;

/// A dense square matrix whose unitarity was measured at construction.
/// Only obtainable through certify_unitary(), so holding one is proof that
/// the defect was within tolerance.
class UnitaryOperator {
 public:
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }
  Provenance provenance() const noexcept { return provenance_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  double unitarity_defect() const noexcept { return defect_; }

 private:
  friend UnitaryOperator certify_unitary(ComplexMatrix, double, Provenance,
                                         std::optional<std::uint64_t>);
  UnitaryOperator(ComplexMatrix m, Provenance p, std::optional<std::uint64_t> seed,
                  double defect)
      : matrix_(std::move(m)), provenance_(p), seed_(seed), defect_(defect) {}

  ComplexMatrix matrix_;
  Provenance provenance_;
  std::optional<std::uint64_t> seed_;
  double defect_;
};

/// Throws Error(NonUnitary) when the defect exceeds `tolerance`, and
/// Error(DimensionMismatch) for non-square or empty input.
UnitaryOperator certify_unitary(ComplexMatrix m, double tolerance,
                                Provenance provenance = Provenance::Composed,
                                std::optional<std::uint64_t> seed = std::nullopt);

/// left * right, re-certified. Provenance of the product is Composed; the
/// seed of `right` (the system map) is kept.
UnitaryOperator compose(const UnitaryOperator& left, const UnitaryOperator& right);

/// Eigen-decomposition U|v_j> = exp(-i phi_j)|v_j>, phases ascending in (-pi, pi].
struct SpectralDecomposition {
  RealVector phases;
  ComplexMatrix vectors;  // columns are eigenvectors
  Provenance source = Provenance::Composed;

  Index dim() const noexcept { return phases.size(); }
};

/// Complex Schur factorization of a normal matrix; the Schur vectors are the
/// eigenvectors. Degenerate clusters are re-orthonormalized. Throws
/// Error(DecompositionFailed) if the certified reconstruction is not met.
SpectralDecomposition spectral_decompose(const UnitaryOperator& u);

/// V diag(exp(-i phi)) V^dagger.
ComplexMatrix reassemble(const SpectralDecomposition& d);

/// a(l, m) = <v'_l | v_m> between a perturbed (rows) and unperturbed (columns)
/// eigenbasis, together with both phase lists.
class OverlapMatrix {
 public:
  OverlapMatrix(ComplexMatrix a, RealVector phases_unperturbed, RealVector phases_perturbed);

  const ComplexMatrix& amplitudes() const noexcept { return a_; }
  /// |a_lm|^2
  const RealMatrix& weights() const noexcept { return weights_; }
  const RealVector& phases_unperturbed() const noexcept { return phases_unperturbed_; }
  const RealVector& phases_perturbed() const noexcept { return phases_perturbed_; }
  Index dim() const noexcept { return a_.rows(); }

  /// Largest deviation of any row or column weight sum from 1.
  double completeness_defect() const;

 private:
  ComplexMatrix a_;
  RealMatrix weights_;
  RealVector phases_unperturbed_;
  RealVector phases_perturbed_;
};

/// Throws Error(DimensionMismatch) on unequal dimensions and
/// Error(DecompositionFailed) if completeness is violated beyond 1e-8.
OverlapMatrix overlap_matrix(const SpectralDecomposition& unperturbed,
                             const SpectralDecomposition& perturbed);

}  // namespace fsat
