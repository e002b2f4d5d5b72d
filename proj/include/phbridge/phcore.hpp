#pragma once

#include <optional>

#include "phbridge/relation.hpp"

namespace phbridge {

// ============================================================================
// The two port-Hamiltonian system formulations
// ============================================================================

/// Geometric formulation: a Dirac structure on the flow/effort space
/// K^{n+r+m} x K^{n+r+m}, a Lagrange structure on K^n x K^n and a maximal
/// resistive structure on K^r x K^r. Flow/effort blocks inside the Dirac
/// structure are ordered (-xdot, f_R, y | e_L, e_R, u).
struct GeometricPH {
  Index n;  ///< state dimension
  Index r;  ///< resistive dimension
  Index m;  ///< external dimension
  LinearRelation dirac;
  LinearRelation lagrange;
  LinearRelation resistive;

  GeometricPH(Index n, Index r, Index m, LinearRelation dirac, LinearRelation lagrange,
              LinearRelation resistive);
};

/// Descriptor formulation: the DAE
///   d/dt(E z) = (J - R) Q z + (B - P) u
///   y         = (B + P)* Q z + (S + N) u
/// with E*Q = Q*E, J = -J*, N = -N*, R = R*, S = S* and W >= 0.
struct DescriptorPH {
  Index n = 0;
  Index m = 0;
  Mat E, J, R, Q;  ///< n x n
  Mat B, P;        ///< n x m
  Mat S, N;        ///< m x m

  static DescriptorPH make(Mat E, Mat J, Mat R, Mat Q, Mat B, Mat P, Mat S, Mat N);
};

/// Time grid plus sampled signals. Channels are matrices with one row per
/// sample; all present channels share the grid length.
struct Trajectory {
  RealVec grid;
  std::optional<Mat> u, y;
  std::optional<Mat> z;                    // descriptor state
  std::optional<Mat> x, xdot;              // geometric state and derivative
  std::optional<Mat> f_R, e_R, e_L;        // resistive/Lagrangian port samples
  std::optional<Mat> lambda, lambda_R, mu_L;

  Index samples() const { return grid.size(); }
  double step() const;
  const Mat& channel(const std::optional<Mat>& c, const char* name) const;
};

/// Per-condition residuals of the descriptor structure constraints.
struct DescriptorValidation {
  double eq_symmetry = 0.0;   ///< || E*Q - Q*E ||_2
  double j_skew = 0.0;        ///< || (J + J*)/2 ||_F
  double n_skew = 0.0;        ///< || (N + N*)/2 ||_F
  double r_symmetry = 0.0;    ///< || (R - R*)/2 ||_F
  double s_symmetry = 0.0;    ///< || (S - S*)/2 ||_F
  double min_eig_w = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct GeometricValidation {
  StructureReport dirac;
  StructureReport lagrange;
  StructureReport resistive;
  bool dims_ok = false;
  bool pass = false;
};

DescriptorValidation validate_descriptor(const DescriptorPH& sys,
                                         const TolerancePolicy& tol = {});

GeometricValidation validate_geometric(const GeometricPH& sys, const TolerancePolicy& tol = {});

/// Throwing variant used as a transform precondition.
void require_geometric(const GeometricPH& sys, const TolerancePolicy& tol = {});

/// W = diag(Q*, I) [[R, P], [P*, S]] diag(Q, I), returned Hermitian-symmetrized.
Mat compute_W(const DescriptorPH& sys);

/// H(z) = 1/2 z* Q* E z. The quadratic form is real whenever E*Q = Q*E; the
/// imaginary part is checked against tol and discarded.
double hamiltonian(const DescriptorPH& sys, const Vec& z, const TolerancePolicy& tol = {});

struct GeometricPowerResidual {
  RealVec per_sample;      ///< | -Re<xdot,e_L> + Re<f_R,e_R> + Re<y,u> | at each sample
  RealVec dissipation;     ///< Re<f_R, e_R> at each sample (must stay <= 0)
  double max_residual = 0.0;
  double max_dissipation = 0.0;
};

/// Power balance along a geometric trajectory. Uses the xdot channel when
/// present (exact right-hand sides from a descriptor solve), otherwise central
/// differences of x on the grid.
GeometricPowerResidual geometric_power_residual(const GeometricPH& sys, const Trajectory& traj);

struct DescriptorPowerResidual {
  RealVec per_step;  ///< midpoint-sampled defect of the energy balance
  double max_residual = 0.0;
};

/// Discrete energy-balance defect
///   | (H_{k+1} - H_k)/h - Re(u*y)|_{k+1/2} + || W^{1/2} (z; u) ||^2|_{k+1/2} |
DescriptorPowerResidual descriptor_power_residual(const DescriptorPH& sys, const Trajectory& traj);

}  // namespace phbridge
