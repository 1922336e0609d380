#include "fsat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fsat/error.hpp"

namespace fsat {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::CUE: return "CUE";
    case Provenance::COE: return "COE";
    case Provenance::QKT: return "QKT";
    case Provenance::QKTOdd: return "QKT-oe";
    case Provenance::Perturbation: return "perturbation";
    case Provenance::Composed: return "composed";
  }
  return "unknown";
}

double unitarity_defect(const ComplexMatrix& m) {
  const ComplexMatrix gram = m.adjoint() * m - ComplexMatrix::Identity(m.cols(), m.cols());
  return gram.cwiseAbs().colwise().sum().maxCoeff();
}

double max_entry_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

double wrap_phase(double angle) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(angle, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

UnitaryOperator certify_unitary(ComplexMatrix m, double tolerance, Provenance provenance,
                                std::optional<std::uint64_t> seed) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "certify_unitary: expected a non-empty square matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
  const double defect = unitarity_defect(m);
  if (!(defect <= tolerance)) {
    std::ostringstream os;
    os << "certify_unitary: defect " << defect << " exceeds tolerance " << tolerance;
    throw Error(ErrorKind::NonUnitary, os.str());
  }
  return UnitaryOperator(std::move(m), provenance, seed, defect);
}

UnitaryOperator compose(const UnitaryOperator& left, const UnitaryOperator& right) {
  if (left.dim() != right.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "compose: operator dimensions differ");
  }
  ComplexMatrix product = left.matrix() * right.matrix();
  return certify_unitary(std::move(product), unitarity_tolerance(right.dim()),
                         Provenance::Composed, right.seed());
}

namespace {

// Modified Gram-Schmidt on columns [first, first + count).
void orthonormalize_columns(ComplexMatrix& v, Index first, Index count) {
  for (Index c = first; c < first + count; ++c) {
    for (Index p = first; p < c; ++p) {
      const Complex proj = v.col(p).dot(v.col(c));
      v.col(c) -= proj * v.col(p);
    }
    v.col(c).normalize();
  }
}

}  // namespace

SpectralDecomposition spectral_decompose(const UnitaryOperator& u) {
  const Index n = u.dim();
  Eigen::ComplexSchur<ComplexMatrix> schur(u.matrix(), /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorKind::DecompositionFailed, "spectral_decompose: Schur iteration did not converge");
  }
  const ComplexMatrix& t = schur.matrixT();
  const ComplexMatrix& q = schur.matrixU();

  std::vector<double> raw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = wrap_phase(-std::arg(t(i, i)));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return raw[static_cast<std::size_t>(a)] < raw[static_cast<std::size_t>(b)];
  });

  SpectralDecomposition out;
  out.source = u.provenance();
  out.phases.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    out.phases(i) = raw[static_cast<std::size_t>(src)];
    out.vectors.col(i) = q.col(src);
  }

  // Clusters of numerically degenerate phases. A cluster straddling the
  // branch cut at +-pi is not merged; the Schur vectors are already
  // orthonormal there and the reconstruction check below still applies.
  Index start = 0;
  for (Index i = 1; i <= n; ++i) {
    if (i == n || out.phases(i) - out.phases(i - 1) >= kDegeneracyThreshold) {
      if (i - start > 1) orthonormalize_columns(out.vectors, start, i - start);
      start = i;
    }
  }

  const double tol = spectral_tolerance(n);
  const double vec_defect = unitarity_defect(out.vectors);
  const double recon_defect = max_entry_distance(u.matrix(), reassemble(out));
  if (!(vec_defect <= tol) || !(recon_defect <= tol)) {
    std::ostringstream os;
    os << "spectral_decompose: eigenvector defect " << vec_defect << ", reconstruction defect "
       << recon_defect << " (tolerance " << tol << ")";
    throw Error(ErrorKind::DecompositionFailed, os.str());
  }
  return out;
}

ComplexMatrix reassemble(const SpectralDecomposition& d) {
  ComplexVector phasors(d.dim());
  for (Index i = 0; i < d.dim(); ++i) phasors(i) = std::polar(1.0, -d.phases(i));
  return d.vectors * phasors.asDiagonal() * d.vectors.adjoint();
}

OverlapMatrix::OverlapMatrix(ComplexMatrix a, RealVector phases_unperturbed,
                             RealVector phases_perturbed)
    : a_(std::move(a)),
      weights_(a_.cwiseAbs2()),
      phases_unperturbed_(std::move(phases_unperturbed)),
      phases_perturbed_(std::move(phases_perturbed)) {
  if (a_.rows() != a_.cols() || phases_unperturbed_.size() != a_.cols() ||
      phases_perturbed_.size() != a_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "OverlapMatrix: inconsistent dimensions");
  }
}

double OverlapMatrix::completeness_defect() const {
  const double col = (weights_.colwise().sum().array() - 1.0).abs().maxCoeff();
  const double row = (weights_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(col, row);
}

OverlapMatrix overlap_matrix(const SpectralDecomposition& unperturbed,
                             const SpectralDecomposition& perturbed) {
  if (unperturbed.dim() != perturbed.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "overlap_matrix: decompositions differ in dimension");
  }
  OverlapMatrix out(perturbed.vectors.adjoint() * unperturbed.vectors, unperturbed.phases,
                    perturbed.phases);
  const double defect = out.completeness_defect();
  if (!(defect <= 1e-8)) {
    std::ostringstream os;
    os << "overlap_matrix: completeness defect " << defect;
    throw Error(ErrorKind::DecompositionFailed, os.str());
  }
  return out;
}

}  // namespace fsat
