#pragma once

#include "phbridge/relation.hpp"

namespace phbridge {

// ============================================================================
// Maximal structures as constrained graphs
// ============================================================================
//
// Every maximal structure M in K^n x K^n (Dirac, Lagrange, maximal resistive
// or maximal monotone) can be written as
//
//     M = { (M e - G lambda, e) : G* e = 0, lambda in K^l }
//
// with an injective G spanning ker M (the relation kernel) and a matrix M
// carrying the flavor's algebraic structure. This module builds that pair,
// inverts the construction, and provides the Cayley-transform machinery used
// to complete monotone/resistive structures to maximal ones.

enum class StructureFlavor { Dirac, Lagrange, MaxResistive, MaxMonotone };

const char* flavor_name(StructureFlavor flavor);

/// Graph of a linear contraction V : dom V -> K^n given by an orthonormal
/// basis of dom V and the images of those basis vectors.
struct ContractionGraph {
  Mat domain_basis;  ///< n x q, orthonormal columns spanning dom V
  Mat values;        ///< n x q, column j = V(domain_basis col j)
  TolerancePolicy tol;

  Index space_dim() const { return domain_basis.rows(); }
  Index domain_dim() const { return domain_basis.cols(); }
  double norm_bound() const { return operator_norm(values); }
  bool everywhere_defined() const { return domain_dim() == space_dim(); }
};

struct ExtendedGraphRep {
  StructureFlavor flavor = StructureFlavor::Lagrange;
  Mat m;  ///< n x n structure matrix
  Mat g;  ///< n x l, orthonormal columns spanning the relation kernel
  TolerancePolicy tol;

  Index space_dim() const { return m.rows(); }
  Index multiplier_dim() const { return g.cols(); }
};

/// Cayley transform of a monotone relation: the graph {(e+f, e-f) : (e,f) in M}
/// read with (e, f) = (first, second) component. Single-valued and
/// contractive whenever M is monotone.
ContractionGraph cayley(const LinearRelation& monotone);

/// Inverse Cayley transform of an everywhere-defined contraction; returns the
/// maximal monotone relation {((u+Vu)/2, (u-Vu)/2) : u in K^n}.
LinearRelation inverse_cayley(const ContractionGraph& contraction);

/// Maximal monotone extension. Already-maximal inputs are returned unchanged;
/// otherwise the Cayley contraction is extended by V o Pi_{dom V} and
/// transformed back. Output is verified (classification + containment).
LinearRelation extend_maximal_monotone(const LinearRelation& monotone);

/// Maximal resistive extension via the sign-flipped monotone problem and a
/// Hermitian contractive completion. Output is verified; ExtensionFailed is
/// raised when verification does not hold.
LinearRelation extend_maximal_resistive(const LinearRelation& resistive);

/// Extended graph representation (M, G) of a maximal structure of the given
/// flavor. G has orthonormal columns spanning ker M_relation; ran M is kept
/// orthogonal to ran G so flavor structure restricted to ker G* lifts to the
/// whole matrix.
ExtendedGraphRep extended_graph_rep(const LinearRelation& relation, StructureFlavor flavor);

/// Representation of the same relation as {(e, M e - G lambda) : G* e = 0},
/// obtained by representing the inverse relation.
ExtendedGraphRep extended_graph_rep_inverse(const LinearRelation& relation, StructureFlavor flavor);

/// Rebuild the relation {(M e - G lambda, e) : G* e = 0} from a representation.
LinearRelation reconstruct(const ExtendedGraphRep& rep, Index n_left_hint = -1);

/// Rebuild {(e, M e - G lambda) : G* e = 0} from an inverse-form representation.
LinearRelation reconstruct_inverse(const ExtendedGraphRep& rep);

struct RecoveredComponents {
  Vec e;
  Vec lambda;
  double residual = 0.0;
};

/// For a member pair (f, e) of the represented relation, recover the unique
/// (e, lambda) with f = M e - G lambda.
RecoveredComponents recover_components(const ExtendedGraphRep& rep, const Vec& pair,
                                       double membership_tol = 1e-9);

}  // namespace phbridge
