#pragma once

#include <optional>

#include "phbridge/numeric.hpp"

namespace phbridge {

// ============================================================================
// Linear relations
// ============================================================================
//
// A LinearRelation is a linear subspace of K^{n_left} x K^{n_right}. Elements
// are stacked pairs (f, e) with f in the first factor and e in the second;
// for port variables f plays the flow role and e the effort role. The value
// keeps two synchronized representations:
//
//   image_basis   (n_left+n_right) x d,          orthonormal columns
//   kernel_basis  (n_left+n_right-d) x (n_left+n_right), orthonormal rows
//
// with kernel_basis * image_basis = 0. Both degenerate cases ({0} and the
// full product space) are ordinary values.

/// Classification verdicts plus the residuals they were decided on.
/// The Gram tests act on the orthonormal image basis [P; S]:
///   Lagrange  : S*P = P*S            and dim = n
///   Dirac     : S*P = -P*S           and dim = n
///   monotone  : S*P + P*S >= 0       (maximal adds dim = n)
///   resistive : S*P = P*S <= 0       (maximal adds dim = n)
struct StructureReport {
  bool is_lagrange = false;
  bool is_dirac = false;
  bool is_resistive = false;
  bool is_max_resistive = false;
  bool is_monotone = false;
  bool is_max_monotone = false;

  double sym_defect = 0.0;        ///< || S*P - P*S ||_2
  double skew_defect = 0.0;       ///< || S*P + P*S ||_2
  double monotone_min_eig = 0.0;  ///< smallest eigenvalue of S*P + P*S
  double resistive_max_eig = 0.0; ///< largest eigenvalue of herm(S*P)
  double threshold = 0.0;         ///< threshold the verdicts used
};

struct RelationParts {
  Mat kernel;  ///< { f : (f, 0) in A },      subspace of the first factor
  Mat domain;  ///< { f : exists e, (f,e) },  subspace of the first factor
  Mat mul;     ///< { e : (0, e) in A },      subspace of the second factor
  Mat range;   ///< { e : exists f, (f,e) },  subspace of the second factor
};

class LinearRelation {
 public:
  /// Column span of a stacked generator matrix [F; G] (F: n_left rows).
  /// Generators with orthonormal columns are adopted verbatim as the image
  /// basis; anything else is orthonormalized at its numerical rank.
  static LinearRelation from_image(const Mat& generators, Index n_left, Index n_right,
                                   const TolerancePolicy& tol = {});

  /// Null space of a stacked annihilator [K, L] (K: n_left columns).
  static LinearRelation from_kernel(const Mat& annihilator, Index n_left, Index n_right,
                                    const TolerancePolicy& tol = {});

  /// gr A = {(x, Ax)}.
  static LinearRelation graph(const Mat& a, const TolerancePolicy& tol = {});

  /// gr^{-1} A = {(Ax, x)}.
  static LinearRelation inverse_graph(const Mat& a, const TolerancePolicy& tol = {});

  /// The zero subspace {0} of K^{n_left} x K^{n_right}.
  static LinearRelation zero(Index n_left, Index n_right, const TolerancePolicy& tol = {});

  /// The full product space.
  static LinearRelation full(Index n_left, Index n_right, const TolerancePolicy& tol = {});

  Index n_left() const { return n_left_; }
  Index n_right() const { return n_right_; }
  Index ambient() const { return n_left_ + n_right_; }
  Index dim() const { return image_.cols(); }
  const Mat& image_basis() const { return image_; }
  const Mat& kernel_basis() const { return kernel_; }
  const TolerancePolicy& tol() const { return tol_; }

  /// First-factor block of the image basis (the "P" of [P; S]).
  Mat top_block() const { return image_.topRows(n_left_); }
  /// Second-factor block of the image basis (the "S" of [P; S]).
  Mat bottom_block() const { return image_.bottomRows(n_right_); }

  Field field() const { return is_real(image_) && is_real(kernel_) ? Field::Real : Field::Complex; }

  /// {(e, f) : (f, e) in A}. Exact (a row permutation of the bases).
  LinearRelation inverse() const;

  /// Adjoint relation. For A = ker[K, L] this is ran[L*; -K*], a subspace of
  /// K^{n_right} x K^{n_left}; computed exactly from the stored bases.
  LinearRelation adjoint() const;

  /// alpha A = {(e, alpha f) : (e, f) in A}; alpha acts on the second
  /// component of the stored pair ordering.
  LinearRelation scale(Complex alpha) const;

  RelationParts parts() const;

  /// Structure classification; requires n_left = n_right. The optional
  /// threshold overrides the policy-derived default.
  StructureReport classify(std::optional<double> threshold = std::nullopt) const;

  /// Relative distance of a stacked pair from the subspace:
  /// ||(I - Pi) v|| / max(1, ||v||) with Pi the orthogonal projector.
  double contains(const Vec& pair) const;

  /// Orthogonal projector onto the subspace.
  Mat projector() const;

 private:
  LinearRelation(Index n_left, Index n_right, Mat image, Mat kernel, TolerancePolicy tol);

  Index n_left_ = 0;
  Index n_right_ = 0;
  Mat image_;
  Mat kernel_;
  TolerancePolicy tol_;
};

/// || Pi_A - Pi_B ||_2; zero iff the subspaces coincide.
double gap(const LinearRelation& a, const LinearRelation& b);

}  // namespace phbridge
