#pragma once

#include "phbridge/tolerance.hpp"
#include "phbridge/types.hpp"

namespace phbridge {

/// Rank-revealing factorization of a dense matrix.
struct RankFactor {
  Mat range;         ///< orthonormal columns spanning ran A
  Mat nullspace;     ///< orthonormal columns spanning ker A
  Mat corange;       ///< orthonormal columns spanning ran A* (row space)
  Mat conullspace;   ///< orthonormal columns spanning ker A* (left null space)
  RealVec singular_values;
  Index rank = 0;
};

/// SVD-based rank factorization with the TolerancePolicy threshold rule.
/// Real input (exactly-zero imaginary parts) is factored in real arithmetic so
/// the returned bases are exactly real as well.
RankFactor rank_factor(const Mat& a, const TolerancePolicy& tol = {});

/// Moore-Penrose inverse with the same singular-value threshold.
Mat pseudo_inverse(const Mat& a, const TolerancePolicy& tol = {});

/// Orthonormal basis of the column span.
Mat orthonormal_basis(const Mat& a, const TolerancePolicy& tol = {});

/// Spectral norm (largest singular value); 0 for empty matrices.
double operator_norm(const Mat& a);

/// || U U* - V V* ||_2 for orthonormal bases U, V of subspaces of the same
/// ambient space. Equals 0 iff the subspaces coincide, 1 if one contains a
/// direction orthogonal to the other.
double subspace_gap_bases(const Mat& u, const Mat& v);

inline Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }
inline Mat skew_part(const Mat& a) { return 0.5 * (a - a.adjoint()); }

/// Eigenvalues of the Hermitian part of a (ascending).
RealVec hermitian_eigenvalues(const Mat& a);

double min_hermitian_eigenvalue(const Mat& a);
double max_hermitian_eigenvalue(const Mat& a);

/// Hermitian PSD square root; eigenvalues are clipped at zero first.
Mat psd_sqrt(const Mat& w);

/// Minimum-norm least-squares solution of A x = b.
Vec lstsq(const Mat& a, const Vec& b, const TolerancePolicy& tol = {});
Mat lstsq(const Mat& a, const Mat& b, const TolerancePolicy& tol = {});

/// True iff every stored imaginary part is exactly zero.
bool is_real(const Mat& a);

void require_finite(const Mat& a, const char* what);

/// Second-order finite differences along the rows of a sample matrix
/// (row k = sample at t_k, uniform step h). Central in the interior,
/// one-sided three-point stencils at the ends. Needs at least 3 samples.
Mat central_difference(const Mat& samples, double h);

/// Cumulative trapezoid integral along rows, starting from zero.
Mat trapezoid_cumulative(const Mat& samples, double h);

}  // namespace phbridge
