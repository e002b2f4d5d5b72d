#include "phbridge/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace phbridge {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::NotResistive: return "NotResistive";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::PartialDomain: return "PartialDomain";
    case ErrorCode::NotMaximal: return "NotMaximal";
    case ErrorCode::FlavorMismatch: return "FlavorMismatch";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::ExtensionFailed: return "ExtensionFailed";
    case ErrorCode::NotGeometric: return "NotGeometric";
    case ErrorCode::KernelOverlap: return "KernelOverlap";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::NoConsistentZ: return "NoConsistentZ";
    case ErrorCode::InconsistentInitial: return "InconsistentInitial";
    case ErrorCode::MissingChannel: return "MissingChannel";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::IrregularPencil: return "IrregularPencil";
    case ErrorCode::InconsistentConstraints: return "InconsistentConstraints";
  }
  return "Error";
}

bool is_real(const Mat& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j).imag() != 0.0) return false;
    }
  }
  return true;
}

void require_finite(const Mat& a, const char* what) {
  if (!a.allFinite()) {
    fail(ErrorCode::InvalidMatrix, std::string(what) + " contains NaN or Inf");
  }
}

namespace {

template <typename MatT>
struct SvdParts {
  MatT range, nullspace, corange, conullspace;
  RealVec singular_values;
  Index rank = 0;
};

template <typename MatT>
SvdParts<MatT> svd_parts(const MatT& a, const TolerancePolicy& tol) {
  SvdParts<MatT> parts;
  const Index rows = a.rows();
  const Index cols = a.cols();
  if (rows == 0 || cols == 0) {
    parts.range = MatT::Zero(rows, 0);
    parts.nullspace = MatT::Identity(cols, cols);
    parts.corange = MatT::Zero(cols, 0);
    parts.conullspace = MatT::Identity(rows, rows);
    parts.singular_values = RealVec::Zero(0);
    parts.rank = 0;
    return parts;
  }
  Eigen::JacobiSVD<MatT> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVec& sv = svd.singularValues();
  const double cutoff = tol.rank_cutoff(sv.size() > 0 ? sv(0) : 0.0, rows, cols);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  parts.range = svd.matrixU().leftCols(rank);
  parts.conullspace = svd.matrixU().rightCols(rows - rank);
  parts.corange = svd.matrixV().leftCols(rank);
  parts.nullspace = svd.matrixV().rightCols(cols - rank);
  parts.singular_values = sv;
  parts.rank = rank;
  return parts;
}

}  // namespace

RankFactor rank_factor(const Mat& a, const TolerancePolicy& tol) {
  tol.validate();
  require_finite(a, "rank_factor input");
  RankFactor out;
  if (is_real(a)) {
    auto parts = svd_parts<RealMat>(a.real(), tol);
    out.range = parts.range.cast<Complex>();
    out.nullspace = parts.nullspace.cast<Complex>();
    out.corange = parts.corange.cast<Complex>();
    out.conullspace = parts.conullspace.cast<Complex>();
    out.singular_values = parts.singular_values;
    out.rank = parts.rank;
  } else {
    auto parts = svd_parts<Mat>(a, tol);
    out.range = parts.range;
    out.nullspace = parts.nullspace;
    out.corange = parts.corange;
    out.conullspace = parts.conullspace;
    out.singular_values = parts.singular_values;
    out.rank = parts.rank;
  }
  return out;
}

namespace {

template <typename MatT>
MatT pinv_impl(const MatT& a, const TolerancePolicy& tol) {
  if (a.rows() == 0 || a.cols() == 0) return MatT::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<MatT> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVec& sv = svd.singularValues();
  const double cutoff = tol.rank_cutoff(sv.size() > 0 ? sv(0) : 0.0, a.rows(), a.cols());
  RealVec inv = RealVec::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace

Mat pseudo_inverse(const Mat& a, const TolerancePolicy& tol) {
  tol.validate();
  require_finite(a, "pseudo_inverse input");
  if (is_real(a)) {
    return pinv_impl<RealMat>(a.real(), tol).cast<Complex>();
  }
  return pinv_impl<Mat>(a, tol);
}

Mat orthonormal_basis(const Mat& a, const TolerancePolicy& tol) {
  return rank_factor(a, tol).range;
}

double operator_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double subspace_gap_bases(const Mat& u, const Mat& v) {
  if (u.rows() != v.rows()) {
    fail(ErrorCode::ShapeError, "subspace gap requires a common ambient dimension");
  }
  const Index n = u.rows();
  Mat diff = Mat::Zero(n, n);
  if (u.cols() > 0) diff += u * u.adjoint();
  if (v.cols() > 0) diff -= v * v.adjoint();
  return operator_norm(diff);
}

RealVec hermitian_eigenvalues(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::ShapeError, "hermitian_eigenvalues needs a square matrix");
  if (a.rows() == 0) return RealVec::Zero(0);
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  return es.eigenvalues();
}

double min_hermitian_eigenvalue(const Mat& a) {
  RealVec ev = hermitian_eigenvalues(a);
  return ev.size() > 0 ? ev(0) : 0.0;
}

double max_hermitian_eigenvalue(const Mat& a) {
  RealVec ev = hermitian_eigenvalues(a);
  return ev.size() > 0 ? ev(ev.size() - 1) : 0.0;
}

Mat psd_sqrt(const Mat& w) {
  if (w.rows() != w.cols()) fail(ErrorCode::ShapeError, "psd_sqrt needs a square matrix");
  if (w.rows() == 0) return w;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(w));
  RealVec ev = es.eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Mat lstsq(const Mat& a, const Mat& b, const TolerancePolicy& tol) {
  if (a.rows() != b.rows()) fail(ErrorCode::ShapeError, "lstsq dimension mismatch");
  return pseudo_inverse(a, tol) * b;
}

Vec lstsq(const Mat& a, const Vec& b, const TolerancePolicy& tol) {
  return Vec(lstsq(a, Mat(b), tol));
}

Mat central_difference(const Mat& samples, double h) {
  const Index k = samples.rows();
  if (k < 3) fail(ErrorCode::ShapeError, "central_difference needs at least 3 samples");
  if (!(h > 0.0)) fail(ErrorCode::ShapeError, "central_difference needs h > 0");
  Mat d(k, samples.cols());
  d.row(0) = (-3.0 * samples.row(0) + 4.0 * samples.row(1) - samples.row(2)) / (2.0 * h);
  for (Index i = 1; i + 1 < k; ++i) {
    d.row(i) = (samples.row(i + 1) - samples.row(i - 1)) / (2.0 * h);
  }
  d.row(k - 1) = (3.0 * samples.row(k - 1) - 4.0 * samples.row(k - 2) + samples.row(k - 3)) / (2.0 * h);
  return d;
}

Mat trapezoid_cumulative(const Mat& samples, double h) {
  const Index k = samples.rows();
  if (k < 1) fail(ErrorCode::ShapeError, "trapezoid_cumulative needs samples");
  Mat out = Mat::Zero(k, samples.cols());
  for (Index i = 1; i < k; ++i) {
    out.row(i) = out.row(i - 1) + 0.5 * h * (samples.row(i - 1) + samples.row(i));
  }
  return out;
}

}  // namespace phbridge
