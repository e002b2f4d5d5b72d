#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "phbridge/transforms.hpp"

namespace phbridge {

// ============================================================================
// Desk-scale simulation of descriptor systems
// ============================================================================

struct ZeroInput {};

/// Per-channel a_i * sin(2 pi f_i t + phi_i).
struct SinusoidInput {
  RealVec amplitude;
  RealVec frequency;
  RealVec phase;
};

/// Per-channel polynomial sum_j c_j t^j.
struct PolynomialInput {
  std::vector<RealVec> coefficients;
};

/// Sampled table with linear interpolation; must cover [0, t_end].
struct TableInput {
  RealVec times;
  Mat values;  ///< one row per table sample
};

using InputSignal = std::variant<ZeroInput, SinusoidInput, PolynomialInput, TableInput>;

/// Evaluate an input signal at time t for m channels.
Vec eval_input(const InputSignal& input, double t, Index m);

struct SimConfig {
  double t_end = 1.0;
  double h = 1e-3;
  InputSignal input = ZeroInput{};
  std::uint64_t seed = 0;  ///< carried for reproducibility bookkeeping
};

/// Closest consistent initial state to z_guess: minimizes ||z0 - z_guess||
/// subject to N_e*((J-R)Q z0 + (B-P) u0) = 0 where N_e spans the left null
/// space of E.
Vec consistent_init(const DescriptorPH& sys, const Vec& u0, const Vec& z_guess,
                    const TolerancePolicy& tol = {});

/// Implicit Euler: (E - h (J-R)Q) z_{k+1} = E z_k + h (B-P) u_{k+1} with one
/// factorization reused across steps; a singular iteration matrix is retried
/// once with h/2 before failing.
Trajectory integrate_implicit_euler(const DescriptorPH& sys, const SimConfig& cfg, const Vec& z0,
                                    const TolerancePolicy& tol = {});

struct DescriptorVerification {
  /// Algebraic-row defect per sample: the DAE rows that survive once d/dt(Ez)
  /// is eliminated through the right-hand side, i.e. the left-null-space
  /// projection of (J-R)Qz + (B-P)u. Exact solutions score at roundoff level.
  RealVec algebraic_defect;
  RealVec output_defect;     ///< per-sample output-equation defect
  RealVec difference_defect; ///< per-step backward-difference defect (O(h) diagnostic)
  RealVec power_residual;    ///< per-step energy-balance defect
  double max_membership = 0.0;  ///< max of algebraic and output defects
  double max_difference = 0.0;
  double max_power = 0.0;
  Index worst_sample = 0;
};

struct GeometricVerification {
  RealVec dirac_residual;
  RealVec lagrange_residual;
  RealVec resistive_residual;
  RealVec power_residual;
  double max_membership = 0.0;
  double max_power = 0.0;
  double max_dissipation = 0.0;
  Index worst_sample = 0;
};

DescriptorVerification verify_descriptor_solution(const DescriptorPH& sys, const Trajectory& traj);

/// Membership residuals against (D, L, R) plus the power balance. When
/// use_xdot_channel is false the xdot channel is ignored and central
/// differences of x are used instead.
GeometricVerification verify_geometric_solution(const GeometricPH& sys, const Trajectory& traj,
                                                bool use_xdot_channel = true);

struct CorrespondenceReport {
  LiftData lift;
  Trajectory descriptor_traj;
  Trajectory geometric_traj;
  DescriptorVerification descriptor_check;
  GeometricVerification geometric_check;
  double hamiltonian_start = 0.0;
  double hamiltonian_end = 0.0;
};

/// geometric -> descriptor -> consistent init -> implicit Euler -> projection
/// back to the geometric side, verified against both formulations.
CorrespondenceReport correspondence_experiment(const GeometricPH& sys, const SimConfig& cfg,
                                               const TolerancePolicy& tol = {});

}  // namespace phbridge
