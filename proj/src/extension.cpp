#include "phbridge/extension.hpp"

#include <cmath>
#include <string>

namespace phbridge {

const char* flavor_name(StructureFlavor flavor) {
  switch (flavor) {
    case StructureFlavor::Dirac: return "dirac";
    case StructureFlavor::Lagrange: return "lagrange";
    case StructureFlavor::MaxResistive: return "max_resistive";
    case StructureFlavor::MaxMonotone: return "max_monotone";
  }
  return "unknown";
}

namespace {

bool flavor_holds(const StructureReport& report, StructureFlavor flavor) {
  switch (flavor) {
    case StructureFlavor::Dirac: return report.is_dirac;
    case StructureFlavor::Lagrange: return report.is_lagrange;
    case StructureFlavor::MaxResistive: return report.is_max_resistive;
    case StructureFlavor::MaxMonotone: return report.is_max_monotone;
  }
  return false;
}

/// Project a structure matrix onto its flavor's matrix class. Monotone has no
/// linear structure to enforce, only a semidefiniteness that is post-checked.
Mat enforce_flavor(const Mat& m, StructureFlavor flavor) {
  switch (flavor) {
    case StructureFlavor::Dirac: return skew_part(m);
    case StructureFlavor::Lagrange:
    case StructureFlavor::MaxResistive: return hermitian_part(m);
    case StructureFlavor::MaxMonotone: return m;
  }
  return m;
}

/// Demote a relation built over C back to R when its bases carry no imaginary
/// content. Real inputs travel through the extension machinery with exactly
/// zero imaginary parts, so this normally reduces to a representation rebuild.
LinearRelation demote_if_real(const LinearRelation& source, const LinearRelation& extended) {
  if (source.field() != Field::Real || extended.field() == Field::Real) return extended;
  const double imag_mag = extended.image_basis().imag().cwiseAbs().maxCoeff();
  if (imag_mag > extended.tol().structural()) {
    fail(ErrorCode::ExtensionFailed, "extension of a real structure produced complex data");
  }
  Mat real_generators = extended.image_basis().real().cast<Complex>();
  return LinearRelation::from_image(real_generators, extended.n_left(), extended.n_right(),
                                    extended.tol());
}

void check_contains_columns(const LinearRelation& extension, const LinearRelation& source,
                            const char* what) {
  for (Index j = 0; j < source.dim(); ++j) {
    const double residual = extension.contains(source.image_basis().col(j));
    if (residual > 1e2 * extension.tol().structural()) {
      fail(ErrorCode::ExtensionFailed, std::string(what) + " does not contain its input");
    }
  }
}

}  // namespace

ContractionGraph cayley(const LinearRelation& monotone) {
  if (monotone.n_left() != monotone.n_right()) {
    fail(ErrorCode::ShapeError, "Cayley transform needs equal factor dimensions");
  }
  if (!monotone.classify().is_monotone) {
    fail(ErrorCode::NotMonotone, "Cayley transform needs a monotone relation");
  }
  const Mat e = monotone.top_block();
  const Mat f = monotone.bottom_block();
  const Mat u = e + f;
  const Mat v = e - f;
  auto uf = rank_factor(u, monotone.tol());
  if (uf.rank < monotone.dim()) {
    // (e+f) = 0 forces (e,f) = 0 on monotone relations; a rank drop here means
    // monotonicity only held marginally.
    fail(ErrorCode::NotMonotone, "Cayley graph is multivalued");
  }
  Mat dom = uf.range;
  Mat values = v * pseudo_inverse(u, monotone.tol()) * dom;
  return ContractionGraph{std::move(dom), std::move(values), monotone.tol()};
}

LinearRelation inverse_cayley(const ContractionGraph& contraction) {
  const Index n = contraction.space_dim();
  if (!contraction.everywhere_defined()) {
    fail(ErrorCode::PartialDomain, "inverse Cayley transform needs dom V = K^n");
  }
  if (contraction.norm_bound() > 1.0 + contraction.tol.structural()) {
    fail(ErrorCode::NotContraction, "inverse Cayley transform needs ||V|| <= 1");
  }
  Mat generators(2 * n, n);
  generators.topRows(n) = 0.5 * (contraction.domain_basis + contraction.values);
  generators.bottomRows(n) = 0.5 * (contraction.domain_basis - contraction.values);
  return LinearRelation::from_image(generators, n, n, contraction.tol);
}

LinearRelation extend_maximal_monotone(const LinearRelation& monotone) {
  auto report = monotone.classify();
  if (!report.is_monotone) {
    fail(ErrorCode::NotMonotone, "maximal monotone extension needs a monotone input");
  }
  if (report.is_max_monotone) return monotone;

  auto v = cayley(monotone);
  const Index n = v.space_dim();
  // V o Pi_{dom V} is a contraction defined everywhere and restricts to V.
  Mat extended_values = v.values * v.domain_basis.adjoint();
  ContractionGraph full{Mat::Identity(n, n), std::move(extended_values), v.tol};
  LinearRelation extension = inverse_cayley(full);
  extension = demote_if_real(monotone, extension);

  if (!extension.classify().is_max_monotone) {
    fail(ErrorCode::ExtensionFailed, "monotone extension failed verification");
  }
  check_contains_columns(extension, monotone, "monotone extension");
  return extension;
}

LinearRelation extend_maximal_resistive(const LinearRelation& resistive) {
  auto report = resistive.classify();
  if (!report.is_resistive) {
    fail(ErrorCode::NotResistive, "maximal resistive extension needs a resistive input");
  }
  if (report.is_max_resistive) return resistive;

  // Flip the sign of the second component: -R is monotone and symmetric, so
  // its Cayley transform V is Hermitian as a form on dom V.
  LinearRelation flipped = resistive.scale(-1.0);
  auto v = cayley(flipped);
  const Index n = v.space_dim();
  const Index q = v.domain_dim();

  Mat perp = rank_factor(v.domain_basis, v.tol).conullspace;  // n x (n-q)
  Mat a = hermitian_part(v.domain_basis.adjoint() * v.values); // q x q block inside dom V
  Mat b = perp.adjoint() * v.values;                           // (n-q) x q block into dom V perp

  // Hermitian contractive completion [[A, B*], [B, C]] with
  //   C = -I + B (I + A)^+ B*.
  // Then I + Vt has zero Schur complement (an extreme, Krein-type choice) and
  // I - Vt >= 0 follows from A^2 + B*B <= I.
  Mat c = -Mat::Identity(n - q, n - q) +
          b * pseudo_inverse(Mat::Identity(q, q) + a, v.tol) * b.adjoint();
  Mat block(n, n);
  block.topLeftCorner(q, q) = a;
  block.topRightCorner(q, n - q) = b.adjoint();
  block.bottomLeftCorner(n - q, q) = b;
  block.bottomRightCorner(n - q, n - q) = hermitian_part(c);

  Mat w(n, n);
  w.leftCols(q) = v.domain_basis;
  w.rightCols(n - q) = perp;
  Mat v_tilde = w * block * w.adjoint();

  ContractionGraph full{Mat::Identity(n, n), std::move(v_tilde), v.tol};
  LinearRelation extension = inverse_cayley(full).scale(-1.0);
  extension = demote_if_real(resistive, extension);

  if (!extension.classify().is_max_resistive) {
    fail(ErrorCode::ExtensionFailed, "resistive extension failed verification");
  }
  check_contains_columns(extension, resistive, "resistive extension");
  return extension;
}

ExtendedGraphRep extended_graph_rep(const LinearRelation& relation, StructureFlavor flavor) {
  if (relation.n_left() != relation.n_right()) {
    fail(ErrorCode::ShapeError, "extended graph representation needs equal factor dimensions");
  }
  const Index n = relation.n_left();
  auto report = relation.classify();
  if (relation.dim() != n) {
    fail(ErrorCode::NotMaximal, "extended graph representation needs a maximal structure");
  }
  if (!flavor_holds(report, flavor)) {
    fail(ErrorCode::FlavorMismatch,
         std::string("relation does not classify as ") + flavor_name(flavor));
  }

  Mat g = relation.parts().kernel;  // n x l, orthonormal
  const Index l = g.cols();
  Mat p_perp = Mat::Identity(n, n);
  if (l > 0) p_perp -= g * g.adjoint();

  // For e in ker G* the fiber {f : (f, e) in M} is f0 + ran G; projecting f0
  // onto ker G* removes exactly that ambiguity. Extending by zero on ran G
  // keeps ran M orthogonal to ran G.
  Mat m = p_perp * relation.top_block() * pseudo_inverse(relation.bottom_block(), relation.tol()) *
          p_perp;
  m = enforce_flavor(m, flavor);

  ExtendedGraphRep rep{flavor, std::move(m), std::move(g), relation.tol()};

  const double invariance = operator_norm(rep.g.adjoint() * rep.m);
  if (invariance > 1e2 * relation.tol().structural()) {
    fail(ErrorCode::ExtensionFailed, "structure matrix does not leave ker G* invariant");
  }
  if (gap(reconstruct(rep), relation) > 1e2 * relation.tol().structural()) {
    fail(ErrorCode::ExtensionFailed, "extended graph representation failed reconstruction");
  }
  return rep;
}

ExtendedGraphRep extended_graph_rep_inverse(const LinearRelation& relation, StructureFlavor flavor) {
  // Dirac, Lagrange, maximal resistive and maximal monotone structures are
  // closed under inversion, so the direct construction applies verbatim.
  return extended_graph_rep(relation.inverse(), flavor);
}

LinearRelation reconstruct(const ExtendedGraphRep& rep, Index /*n_left_hint*/) {
  const Index n = rep.space_dim();
  const Index l = rep.multiplier_dim();
  Mat q_e = rank_factor(rep.g, rep.tol).conullspace;  // basis of ker G*
  Mat generators(2 * n, (n - l) + l);
  generators.topRows(n).leftCols(n - l) = rep.m * q_e;
  generators.topRows(n).rightCols(l) = -rep.g;
  generators.bottomRows(n).leftCols(n - l) = q_e;
  generators.bottomRows(n).rightCols(l) = Mat::Zero(n, l);
  return LinearRelation::from_image(generators, n, n, rep.tol);
}

LinearRelation reconstruct_inverse(const ExtendedGraphRep& rep) {
  return reconstruct(rep).inverse();
}

RecoveredComponents recover_components(const ExtendedGraphRep& rep, const Vec& pair,
                                       double membership_tol) {
  const Index n = rep.space_dim();
  if (pair.size() != 2 * n) fail(ErrorCode::ShapeError, "pair length must be 2n");
  RecoveredComponents out;
  out.e = pair.tail(n);
  const Vec f = pair.head(n);
  // G has orthonormal columns, so G* is a left inverse.
  out.lambda = rep.g.adjoint() * (rep.m * out.e - f);
  const double scale = std::max(1.0, pair.norm());
  const double constraint = (rep.g.adjoint() * out.e).norm();
  out.residual = ((rep.m * out.e - rep.g * out.lambda - f).norm() + constraint) / scale;
  if (out.residual > membership_tol) {
    fail(ErrorCode::NotMember, "pair is not a member of the represented relation");
  }
  return out;
}

}  // namespace phbridge
