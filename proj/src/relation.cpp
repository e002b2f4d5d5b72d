#include "phbridge/relation.hpp"

#include <cmath>

namespace phbridge {

namespace {

bool has_orthonormal_columns(const Mat& a, double eps) {
  if (a.cols() == 0) return true;
  Mat gram = a.adjoint() * a;
  return (gram - Mat::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff() <= eps;
}

}  // namespace

LinearRelation::LinearRelation(Index n_left, Index n_right, Mat image, Mat kernel, TolerancePolicy tol)
    : n_left_(n_left), n_right_(n_right), image_(std::move(image)), kernel_(std::move(kernel)), tol_(tol) {
  if (n_left_ < 0 || n_right_ < 0) fail(ErrorCode::ShapeError, "negative factor dimension");
  const Index ambient = n_left_ + n_right_;
  if (image_.rows() != ambient || kernel_.cols() != ambient ||
      kernel_.rows() != ambient - image_.cols()) {
    fail(ErrorCode::ShapeError, "inconsistent relation representation sizes");
  }
  if (image_.cols() > 0 && kernel_.rows() > 0) {
    const double defect = (kernel_ * image_).cwiseAbs().maxCoeff();
    if (defect > tol_.structural() * 100.0) {
      fail(ErrorCode::InvalidMatrix, "kernel/image representations disagree");
    }
  }
}

LinearRelation LinearRelation::from_image(const Mat& generators, Index n_left, Index n_right,
                                          const TolerancePolicy& tol) {
  tol.validate();
  if (generators.rows() != n_left + n_right) {
    fail(ErrorCode::ShapeError, "image generators must have n_left + n_right rows");
  }
  require_finite(generators, "image generators");
  if (has_orthonormal_columns(generators, 32.0 * tol.rel_eps * static_cast<double>(generators.rows() + 1))) {
    // Adopt verbatim; keeps serialization round trips bit-exact.
    auto f = rank_factor(generators, tol);
    return LinearRelation(n_left, n_right, generators, f.conullspace.adjoint(), tol);
  }
  auto f = rank_factor(generators, tol);
  return LinearRelation(n_left, n_right, f.range, f.conullspace.adjoint(), tol);
}

LinearRelation LinearRelation::from_kernel(const Mat& annihilator, Index n_left, Index n_right,
                                           const TolerancePolicy& tol) {
  tol.validate();
  if (annihilator.cols() != n_left + n_right) {
    fail(ErrorCode::ShapeError, "kernel annihilator must have n_left + n_right columns");
  }
  require_finite(annihilator, "kernel annihilator");
  auto f = rank_factor(annihilator, tol);
  return LinearRelation(n_left, n_right, f.nullspace, f.corange.adjoint(), tol);
}

LinearRelation LinearRelation::graph(const Mat& a, const TolerancePolicy& tol) {
  Mat stacked(a.cols() + a.rows(), a.cols());
  stacked.topRows(a.cols()) = Mat::Identity(a.cols(), a.cols());
  stacked.bottomRows(a.rows()) = a;
  return from_image(stacked, a.cols(), a.rows(), tol);
}

LinearRelation LinearRelation::inverse_graph(const Mat& a, const TolerancePolicy& tol) {
  Mat stacked(a.rows() + a.cols(), a.cols());
  stacked.topRows(a.rows()) = a;
  stacked.bottomRows(a.cols()) = Mat::Identity(a.cols(), a.cols());
  return from_image(stacked, a.rows(), a.cols(), tol);
}

LinearRelation LinearRelation::zero(Index n_left, Index n_right, const TolerancePolicy& tol) {
  return from_image(Mat::Zero(n_left + n_right, 0), n_left, n_right, tol);
}

LinearRelation LinearRelation::full(Index n_left, Index n_right, const TolerancePolicy& tol) {
  const Index ambient = n_left + n_right;
  return from_image(Mat::Identity(ambient, ambient), n_left, n_right, tol);
}

LinearRelation LinearRelation::inverse() const {
  Mat image(ambient(), dim());
  image.topRows(n_right_) = image_.bottomRows(n_right_);
  image.bottomRows(n_left_) = image_.topRows(n_left_);
  Mat kernel(kernel_.rows(), ambient());
  kernel.leftCols(n_right_) = kernel_.rightCols(n_right_);
  kernel.rightCols(n_left_) = kernel_.leftCols(n_left_);
  return LinearRelation(n_right_, n_left_, std::move(image), std::move(kernel), tol_);
}

LinearRelation LinearRelation::adjoint() const {
  // A = ker[K, L]  =>  A* = ran[L*; -K*], and the image basis [F; G] of A
  // provides the annihilator [-G*, F*] of A*. Both inherit orthonormality
  // from the stored bases, so no refactorization is needed.
  const Mat k = kernel_.leftCols(n_left_);
  const Mat l = kernel_.rightCols(n_right_);
  Mat image(ambient(), kernel_.rows());
  image.topRows(n_right_) = l.adjoint();
  image.bottomRows(n_left_) = -k.adjoint();
  const Mat f = image_.topRows(n_left_);
  const Mat g = image_.bottomRows(n_right_);
  Mat kernel(dim(), ambient());
  kernel.leftCols(n_right_) = -g.adjoint();
  kernel.rightCols(n_left_) = f.adjoint();
  return LinearRelation(n_right_, n_left_, std::move(image), std::move(kernel), tol_);
}

LinearRelation LinearRelation::scale(Complex alpha) const {
  const Mat f = image_.topRows(n_left_);
  const Mat g = image_.bottomRows(n_right_);
  if (std::abs(std::abs(alpha) - 1.0) <= 16.0 * tol_.rel_eps) {
    // Unimodular scaling preserves orthonormality of both bases.
    Mat image(ambient(), dim());
    image.topRows(n_left_) = f;
    image.bottomRows(n_right_) = alpha * g;
    Mat kernel(kernel_.rows(), ambient());
    kernel.leftCols(n_left_) = kernel_.leftCols(n_left_);
    kernel.rightCols(n_right_) = std::conj(alpha) * kernel_.rightCols(n_right_);
    return LinearRelation(n_left_, n_right_, std::move(image), std::move(kernel), tol_);
  }
  Mat generators(ambient(), dim());
  generators.topRows(n_left_) = f;
  generators.bottomRows(n_right_) = alpha * g;
  return from_image(generators, n_left_, n_right_, tol_);
}

RelationParts LinearRelation::parts() const {
  const Mat f = image_.topRows(n_left_);
  const Mat g = image_.bottomRows(n_right_);
  RelationParts out;
  out.kernel = orthonormal_basis(f * rank_factor(g, tol_).nullspace, tol_);
  out.mul = orthonormal_basis(g * rank_factor(f, tol_).nullspace, tol_);
  out.domain = orthonormal_basis(f, tol_);
  out.range = orthonormal_basis(g, tol_);
  return out;
}

StructureReport LinearRelation::classify(std::optional<double> threshold) const {
  if (n_left_ != n_right_) {
    fail(ErrorCode::ShapeError, "classification needs equal factor dimensions");
  }
  const Index n = n_left_;
  StructureReport report;
  report.threshold = threshold.value_or(tol_.structural());
  const Mat p = top_block();
  const Mat s = bottom_block();
  const Mat gram = s.adjoint() * p;  // d x d
  report.sym_defect = operator_norm(gram - gram.adjoint());
  report.skew_defect = operator_norm(gram + gram.adjoint());
  const Mat sym_sum = gram + gram.adjoint();  // Hermitian by construction
  report.monotone_min_eig = min_hermitian_eigenvalue(sym_sum);
  report.resistive_max_eig = max_hermitian_eigenvalue(gram);

  const bool maximal = dim() == n;
  report.is_lagrange = report.sym_defect <= report.threshold && maximal;
  report.is_dirac = report.skew_defect <= report.threshold && maximal;
  report.is_monotone = report.monotone_min_eig >= -report.threshold;
  report.is_max_monotone = report.is_monotone && maximal;
  report.is_resistive =
      report.sym_defect <= report.threshold && report.resistive_max_eig <= report.threshold;
  report.is_max_resistive = report.is_resistive && maximal;
  return report;
}

double LinearRelation::contains(const Vec& pair) const {
  if (pair.size() != ambient()) fail(ErrorCode::ShapeError, "pair length must be n_left + n_right");
  Vec residual = pair;
  if (dim() > 0) residual -= image_ * (image_.adjoint() * pair);
  return residual.norm() / std::max(1.0, pair.norm());
}

Mat LinearRelation::projector() const {
  if (dim() == 0) return Mat::Zero(ambient(), ambient());
  return image_ * image_.adjoint();
}

double gap(const LinearRelation& a, const LinearRelation& b) {
  if (a.n_left() != b.n_left() || a.n_right() != b.n_right()) {
    fail(ErrorCode::ShapeError, "gap requires matching factor dimensions");
  }
  return subspace_gap_bases(a.image_basis(), b.image_basis());
}

}  // namespace phbridge
