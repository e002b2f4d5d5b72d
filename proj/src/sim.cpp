#include "phbridge/sim.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <string>

namespace phbridge {

Vec eval_input(const InputSignal& input, double t, Index m) {
  Vec u = Vec::Zero(m);
  if (std::holds_alternative<ZeroInput>(input)) return u;
  if (const auto* sine = std::get_if<SinusoidInput>(&input)) {
    if (sine->amplitude.size() != m || sine->frequency.size() != m || sine->phase.size() != m) {
      fail(ErrorCode::ShapeError, "sinusoid input needs one (amplitude, frequency, phase) per channel");
    }
    for (Index i = 0; i < m; ++i) {
      u(i) = sine->amplitude(i) *
             std::sin(2.0 * std::numbers::pi * sine->frequency(i) * t + sine->phase(i));
    }
    return u;
  }
  if (const auto* poly = std::get_if<PolynomialInput>(&input)) {
    if (static_cast<Index>(poly->coefficients.size()) != m) {
      fail(ErrorCode::ShapeError, "polynomial input needs one coefficient list per channel");
    }
    for (Index i = 0; i < m; ++i) {
      double acc = 0.0;
      double power = 1.0;
      for (Index j = 0; j < poly->coefficients[i].size(); ++j) {
        acc += poly->coefficients[i](j) * power;
        power *= t;
      }
      u(i) = acc;
    }
    return u;
  }
  const auto& table = std::get<TableInput>(input);
  if (table.values.cols() != m || table.times.size() != table.values.rows() ||
      table.times.size() < 2) {
    fail(ErrorCode::ShapeError, "table input needs matching times and per-channel columns");
  }
  if (t < table.times(0) - 1e-12 || t > table.times(table.times.size() - 1) + 1e-12) {
    fail(ErrorCode::ShapeError, "table input does not cover the requested time");
  }
  Index hi = 1;
  while (hi + 1 < table.times.size() && table.times(hi) < t) ++hi;
  const double t0 = table.times(hi - 1), t1 = table.times(hi);
  const double w = t1 > t0 ? (t - t0) / (t1 - t0) : 0.0;
  return ((1.0 - w) * table.values.row(hi - 1) + w * table.values.row(hi)).transpose();
}

Vec consistent_init(const DescriptorPH& sys, const Vec& u0, const Vec& z_guess,
                    const TolerancePolicy& tol) {
  if (u0.size() != sys.m || z_guess.size() != sys.n) {
    fail(ErrorCode::ShapeError, "consistent_init input sizes do not match the system");
  }
  const Mat a = (sys.J - sys.R) * sys.Q;
  if (!pencil_regular(sys.E, a, tol).regular) {
    fail(ErrorCode::IrregularPencil, "pencil (E, (J-R)Q) is singular");
  }
  const Mat n_e = rank_factor(sys.E, tol).conullspace;  // left null space of E
  if (n_e.cols() == 0) return z_guess;                  // no algebraic constraints

  const Mat c = n_e.adjoint() * a;
  const Vec b = -n_e.adjoint() * (sys.B - sys.P) * u0;
  const Vec z0 = z_guess + pseudo_inverse(c, tol) * (b - c * z_guess);
  // Feasibility is judged relative to the constraint scale; steep algebraic
  // rows (e.g. near-singular supply blocks) otherwise drown in roundoff.
  const double scale = 1.0 + operator_norm(c) * (1.0 + z0.norm()) + b.norm();
  const double residual = (c * z0 - b).norm();
  if (residual > std::max(1e-9, tol.structural()) * scale) {
    fail(ErrorCode::InconsistentConstraints, "no state satisfies the algebraic constraints");
  }
  return z0;
}

namespace {

Trajectory integrate_with_step(const DescriptorPH& sys, const SimConfig& cfg, const Vec& z0,
                               double h, const TolerancePolicy& tol, bool* singular) {
  *singular = false;
  const Index n = sys.n, m = sys.m;
  const Mat a = (sys.J - sys.R) * sys.Q;
  const Mat iteration = sys.E - h * a;
  Eigen::FullPivLU<Mat> lu(iteration);
  lu.setThreshold(tol.rank_cutoff(operator_norm(iteration), n, n) /
                  std::max(1e-300, operator_norm(iteration)));
  if (lu.rank() < n) {
    *singular = true;
    return Trajectory{};
  }

  const Index steps = static_cast<Index>(std::llround(cfg.t_end / h));
  if (steps < 1) fail(ErrorCode::ShapeError, "simulation needs t_end >= h");

  Trajectory traj;
  traj.grid.resize(steps + 1);
  Mat z(steps + 1, n), u(steps + 1, m), y(steps + 1, m);
  const Mat bu = sys.B - sys.P;
  const Mat cy = (sys.B + sys.P).adjoint() * sys.Q;
  const Mat dy = sys.S + sys.N;

  Vec zk = z0;
  for (Index k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * h;
    traj.grid(k) = t;
    const Vec uk = eval_input(cfg.input, t, m);
    if (k > 0) {
      zk = lu.solve(sys.E * zk + h * bu * uk);
    }
    z.row(k) = zk.transpose();
    u.row(k) = uk.transpose();
    y.row(k) = (cy * zk + dy * uk).transpose();
  }
  traj.z = std::move(z);
  traj.u = std::move(u);
  traj.y = std::move(y);
  return traj;
}

}  // namespace

Trajectory integrate_implicit_euler(const DescriptorPH& sys, const SimConfig& cfg, const Vec& z0,
                                    const TolerancePolicy& tol) {
  if (z0.size() != sys.n) fail(ErrorCode::ShapeError, "initial state length must equal n");
  if (!(cfg.h > 0.0) || cfg.t_end < cfg.h) {
    fail(ErrorCode::ShapeError, "simulation needs h > 0 and t_end >= h");
  }
  bool singular = false;
  Trajectory traj = integrate_with_step(sys, cfg, z0, cfg.h, tol, &singular);
  if (!singular) return traj;
  // 1/h can coincide with a pencil eigenvalue; one halving moves off it.
  traj = integrate_with_step(sys, cfg, z0, cfg.h / 2.0, tol, &singular);
  if (!singular) return traj;
  fail(ErrorCode::IrregularPencil, "iteration matrix E - h(J-R)Q is singular");
}

DescriptorVerification verify_descriptor_solution(const DescriptorPH& sys, const Trajectory& traj) {
  const Mat& z = traj.channel(traj.z, "z");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const double h = traj.step();
  const Index k = traj.samples();

  DescriptorVerification out;
  out.algebraic_defect.resize(k);
  out.output_defect.resize(k);
  out.difference_defect.resize(k - 1);
  const Mat a = (sys.J - sys.R) * sys.Q;
  const Mat bu = sys.B - sys.P;
  const Mat cy = (sys.B + sys.P).adjoint() * sys.Q;
  const Mat dy = sys.S + sys.N;
  const Mat n_e = rank_factor(sys.E).conullspace;  // rows that carry no derivative
  const Mat c_alg = n_e.adjoint() * a;
  const Mat b_alg = n_e.adjoint() * bu;
  const double alg_scale = 1.0 + operator_norm(c_alg) + operator_norm(b_alg);
  for (Index i = 0; i < k; ++i) {
    const Vec zi = z.row(i).transpose();
    const Vec ui = u.row(i).transpose();
    out.algebraic_defect(i) = (c_alg * zi + b_alg * ui).norm() /
                              (alg_scale * std::max(1.0, zi.norm() + ui.norm()));
    const Vec yk = cy * zi + dy * ui;
    out.output_defect(i) = (y.row(i).transpose() - yk).norm() / std::max(1.0, yk.norm());
  }
  for (Index i = 0; i + 1 < k; ++i) {
    const Vec lhs = sys.E * (z.row(i + 1) - z.row(i)).transpose() / h;
    const Vec rhs = a * z.row(i + 1).transpose() + bu * u.row(i + 1).transpose();
    out.difference_defect(i) = (lhs - rhs).norm() / std::max(1.0, rhs.norm());
  }
  out.power_residual = descriptor_power_residual(sys, traj).per_step;
  out.max_membership = std::max(out.algebraic_defect.maxCoeff(), out.output_defect.maxCoeff());
  out.max_difference = out.difference_defect.size() > 0 ? out.difference_defect.maxCoeff() : 0.0;
  out.max_power = out.power_residual.size() > 0 ? out.power_residual.maxCoeff() : 0.0;
  Index worst = 0;
  RealVec combined = out.algebraic_defect.cwiseMax(out.output_defect);
  combined.maxCoeff(&worst);
  out.worst_sample = worst;
  Index worst_diff = 0;
  if (out.difference_defect.size() > 0) {
    out.difference_defect.maxCoeff(&worst_diff);
    if (out.difference_defect(worst_diff) > combined(worst)) out.worst_sample = worst_diff + 1;
  }
  return out;
}

GeometricVerification verify_geometric_solution(const GeometricPH& sys, const Trajectory& traj,
                                                bool use_xdot_channel) {
  const Mat& x = traj.channel(traj.x, "x");
  const Mat& f_r = traj.channel(traj.f_R, "f_R");
  const Mat& e_r = traj.channel(traj.e_R, "e_R");
  const Mat& e_l = traj.channel(traj.e_L, "e_L");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const Index k = traj.samples();

  Trajectory work = traj;
  if (!use_xdot_channel) work.xdot.reset();
  Mat xdot = work.xdot.has_value() ? work.channel(work.xdot, "xdot")
                                   : central_difference(x, traj.step());

  GeometricVerification out;
  out.dirac_residual.resize(k);
  out.lagrange_residual.resize(k);
  out.resistive_residual.resize(k);
  for (Index i = 0; i < k; ++i) {
    Vec flows(sys.n + sys.r + sys.m), efforts(sys.n + sys.r + sys.m);
    flows << -xdot.row(i).transpose(), f_r.row(i).transpose(), y.row(i).transpose();
    efforts << e_l.row(i).transpose(), e_r.row(i).transpose(), u.row(i).transpose();
    Vec dirac_pair(2 * (sys.n + sys.r + sys.m));
    dirac_pair << flows, efforts;
    out.dirac_residual(i) = sys.dirac.contains(dirac_pair);

    Vec lagr_pair(2 * sys.n);
    lagr_pair << x.row(i).transpose(), e_l.row(i).transpose();
    out.lagrange_residual(i) = sys.lagrange.contains(lagr_pair);

    Vec res_pair(2 * sys.r);
    res_pair << f_r.row(i).transpose(), e_r.row(i).transpose();
    out.resistive_residual(i) = sys.resistive.contains(res_pair);
  }

  auto power = geometric_power_residual(sys, work);
  out.power_residual = power.per_sample;
  out.max_power = power.max_residual;
  out.max_dissipation = power.max_dissipation;
  out.max_membership = std::max({out.dirac_residual.maxCoeff(), out.lagrange_residual.maxCoeff(),
                                 out.resistive_residual.maxCoeff()});
  Index worst = 0;
  RealVec combined = out.dirac_residual.cwiseMax(out.lagrange_residual).cwiseMax(out.resistive_residual);
  combined.maxCoeff(&worst);
  out.worst_sample = worst;
  return out;
}

CorrespondenceReport correspondence_experiment(const GeometricPH& sys, const SimConfig& cfg,
                                               const TolerancePolicy& tol) {
  auto [desc, lift] = geometric_to_descriptor(sys);
  const Vec u0 = eval_input(cfg.input, 0.0, sys.m);
  const Vec z0 = consistent_init(desc, u0, Vec::Zero(desc.n), tol);
  Trajectory traj_z = integrate_implicit_euler(desc, cfg, z0, tol);

  // Initial geometric data: choose lambda_L(0) = 0, i.e. x0 = L e_L(0).
  const Vec e_l0 = traj_z.z->row(0).head(lift.n).transpose();
  const Vec x0 = lift.L_mat * e_l0;
  Trajectory geo = project_solution(sys, lift, traj_z, x0, e_l0, 1e-6);

  CorrespondenceReport report;
  report.lift = lift;
  report.descriptor_check = verify_descriptor_solution(desc, traj_z);
  report.geometric_check = verify_geometric_solution(sys, geo);
  report.hamiltonian_start = hamiltonian(desc, traj_z.z->row(0).transpose());
  report.hamiltonian_end = hamiltonian(desc, traj_z.z->row(traj_z.samples() - 1).transpose());
  report.descriptor_traj = std::move(traj_z);
  report.geometric_traj = std::move(geo);
  return report;
}

}  // namespace phbridge
