#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phbridge/extension.hpp"
#include "phbridge/phcore.hpp"

namespace phbridge {

// ============================================================================
// Constructive transformations between the two formulations
// ============================================================================

/// Construction data of the geometric -> descriptor direction. Holds the
/// extended graph representations of the three structures; the descriptor
/// state is ordered z = (e_L, e_R, lambda, lambda_R, mu_L) with block sizes
/// (n, r, d, k, l).
struct LiftData {
  Index n = 0, r = 0, m = 0;
  Index d = 0;  ///< dim ker of the Dirac structure
  Index k = 0;  ///< dim ker of the resistive structure
  Index l = 0;  ///< dim ker of the Lagrange structure
  Mat Jt;       ///< (n+r+m) x (n+r+m) skew structure matrix of the Dirac rep
  Mat G;        ///< (n+r+m) x d multiplier injection of the Dirac rep
  Mat R_tilde;  ///< r x r, Hermitian PSD resistive matrix (f_R = -R_tilde e_R + G_R lambda_R)
  Mat G_R;      ///< r x k
  Mat L_mat;    ///< n x n Hermitian (x = L_mat e_L - G_L lambda_L)
  Mat G_L;      ///< n x l

  Index p() const { return d + k + l; }
  Index state_dim() const { return n + r + p(); }

  // Blocks of Jt and G in the (n, r, m) partition.
  Mat J11() const { return Jt.block(0, 0, n, n); }
  Mat J12() const { return Jt.block(0, n, n, r); }
  Mat J13() const { return Jt.block(0, n + r, n, m); }
  Mat J22() const { return Jt.block(n, n, r, r); }
  Mat J23() const { return Jt.block(n, n + r, r, m); }
  Mat J33() const { return Jt.block(n + r, n + r, m, m); }
  Mat G1() const { return G.topRows(n); }
  Mat G2() const { return G.middleRows(n, r); }
  Mat G3() const { return G.bottomRows(m); }
};

/// Assembly data of the descriptor -> geometric direction.
struct GeoMaps {
  Index n = 0, m = 0;
  Index r() const { return n + m; }
  Mat Gamma;    ///< [[J, B], [-B*, -N]]
  Mat U;        ///< flow/effort reordering permutation
  Mat D_tilde;  ///< [[-Gamma, -I_r], [I_r, 0]]
  Mat W;        ///< inner supply block [[R, P], [P*, S]] acting on (Qz, u)
};

/// Build the descriptor system of a geometric pH triple. Output has Q = I,
/// P = 0, S = 0 and state dimension n + r + p.
std::pair<DescriptorPH, LiftData> geometric_to_descriptor(const GeometricPH& sys);

/// Map a geometric solution (x, f_R, e_R, e_L, u, y) to a descriptor state
/// trajectory z = (e_L, e_R, lambda, lambda_R, mu_L). Multipliers are
/// recovered sample-wise; mu_L = d/dt lambda_L by second-order differences.
Trajectory lift_solution(const GeometricPH& sys, const LiftData& lift, const Trajectory& traj,
                         double membership_tol = 1e-6);

/// Map a descriptor solution back to a geometric trajectory through the
/// initial condition (x0, e_L(0)) in the Lagrange structure. lambda_L is
/// integrated from mu_L with the trapezoid rule.
Trajectory project_solution(const GeometricPH& sys, const LiftData& lift, const Trajectory& traj,
                            const Vec& x0, const Vec& e_l0, double membership_tol = 1e-6);

/// Build the geometric triple of a descriptor system with
/// ker E \cap ker Q = {0}: L = ran[E; Q], R = gr(-W), D = gr^{-1}(U D_tilde U*).
std::pair<GeometricPH, GeoMaps> descriptor_to_geometric(const DescriptorPH& sys,
                                                        const TolerancePolicy& tol = {});

/// Solution map (u, z, y) -> (u, Ez, y) with f_R = (Qz, u), e_R = -W f_R.
Trajectory desc_solution_to_geo(const DescriptorPH& sys, const GeoMaps& maps,
                                const Trajectory& traj, double residual_tol = 1e-6);

/// Inverse solution map: recovers the unique z with x = Ez and e_L = Qz.
Trajectory geo_solution_to_desc(const DescriptorPH& sys, const GeoMaps& maps,
                                const Trajectory& traj, double residual_tol = 1e-6);

struct PencilReport {
  bool regular = false;
  int shifts_tried = 0;
  bool decided_by_shift = false;        ///< a random shift was nonsingular
  bool staircase_checked = false;       ///< the polynomial null-vector rank test ran
  bool kernel_test_available = false;   ///< E was Hermitian PSD
  bool kernel_intersection_trivial = false;  ///< ker E \cap ker A = {0} (when available)
};

/// Probabilistic regularity certificate for the pencil (E, A): det(sE - A)
/// is tested at seeded random complex shifts; if all fail, singularity is
/// confirmed by a rank test for polynomial null vectors. When E is Hermitian
/// PSD the equivalent kernel-intersection test is reported as well.
PencilReport pencil_regular(const Mat& e, const Mat& a, const TolerancePolicy& tol = {},
                            std::uint64_t seed = 0x9e3779b97f4a7c15ull);

struct PositiveRealReport {
  std::vector<Complex> samples;
  std::vector<double> min_eigs;  ///< min eig of G(s) + G(s)* per sample
  double overall_min = 0.0;
  bool pass = false;
};

/// Evaluate G(s) = B*(sE - (J - R))^{-1} B + N on the given samples (all with
/// Re s > 0) and report the minimum eigenvalue of G(s) + G(s)*. Requires
/// Q = I, P = 0, S = 0 and a regular pencil (E, J - R).
PositiveRealReport transfer_positive_real(const DescriptorPH& sys,
                                          const std::vector<Complex>& samples,
                                          const TolerancePolicy& tol = {});

struct RoundtripResult {
  DescriptorPH system;
  GeoMaps maps;
  LiftData lift;
};

/// descriptor -> geometric -> descriptor; the result has Q = I exactly.
RoundtripResult roundtrip_q_identity(const DescriptorPH& sys, const TolerancePolicy& tol = {});

}  // namespace phbridge
