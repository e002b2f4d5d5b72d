#include "phbridge/transforms.hpp"

#include <Eigen/LU>

#include <cmath>
#include <random>
#include <string>

namespace phbridge {

namespace {

Vec stack3(const Vec& a, const Vec& b, const Vec& c) {
  Vec out(a.size() + b.size() + c.size());
  out << a, b, c;
  return out;
}

/// Backward-difference defect of d/dt(Ez) = (J-R)Qz + (B-P)u at each step,
/// plus the output-equation defect at each sample.
std::pair<RealVec, RealVec> dae_defects(const DescriptorPH& sys, const Trajectory& traj) {
  const Mat& z = traj.channel(traj.z, "z");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const double h = traj.step();
  const Index k = traj.samples();
  const Mat a = (sys.J - sys.R) * sys.Q;
  const Mat bu = sys.B - sys.P;
  const Mat cy = (sys.B + sys.P).adjoint() * sys.Q;
  const Mat dy = sys.S + sys.N;
  RealVec diff(k - 1), outp(k);
  for (Index i = 0; i + 1 < k; ++i) {
    const Vec lhs = sys.E * (z.row(i + 1) - z.row(i)).transpose() / h;
    const Vec rhs = a * z.row(i + 1).transpose() + bu * u.row(i + 1).transpose();
    diff(i) = (lhs - rhs).norm() / std::max(1.0, rhs.norm());
  }
  for (Index i = 0; i < k; ++i) {
    const Vec yk = cy * z.row(i).transpose() + dy * u.row(i).transpose();
    outp(i) = (y.row(i).transpose() - yk).norm() / std::max(1.0, yk.norm());
  }
  return {diff, outp};
}

}  // namespace

// ----------------------------------------------------------------------------
// Geometric -> descriptor
// ----------------------------------------------------------------------------

std::pair<DescriptorPH, LiftData> geometric_to_descriptor(const GeometricPH& sys) {
  require_geometric(sys);
  const Index n = sys.n, r = sys.r, m = sys.m;

  auto rep_d = extended_graph_rep(sys.dirac, StructureFlavor::Dirac);
  auto rep_r = extended_graph_rep(sys.resistive, StructureFlavor::MaxResistive);
  auto rep_l = extended_graph_rep(sys.lagrange, StructureFlavor::Lagrange);

  LiftData lift;
  lift.n = n;
  lift.r = r;
  lift.m = m;
  lift.d = rep_d.multiplier_dim();
  lift.k = rep_r.multiplier_dim();
  lift.l = rep_l.multiplier_dim();
  lift.Jt = skew_part(rep_d.m);
  lift.G = rep_d.g;
  lift.R_tilde = hermitian_part(-rep_r.m);  // f_R = -R_tilde e_R + G_R lambda_R
  lift.G_R = rep_r.g;
  lift.L_mat = hermitian_part(rep_l.m);
  lift.G_L = rep_l.g;

  const Index d = lift.d, k = lift.k, l = lift.l;
  const Index nz = lift.state_dim();

  // State blocks (e_L, e_R, lambda, lambda_R, mu_L) with sizes (n, r, d, k, l).
  Mat j = Mat::Zero(nz, nz);
  j.block(0, 0, n, n) = -lift.J11();
  j.block(0, n, n, r) = -lift.J12();
  j.block(n, 0, r, n) = lift.J12().adjoint();
  j.block(n, n, r, r) = -lift.J22();
  j.block(0, n + r, n, d) = lift.G1();
  j.block(n + r, 0, d, n) = -lift.G1().adjoint();
  j.block(n, n + r, r, d) = lift.G2();
  j.block(n + r, n, d, r) = -lift.G2().adjoint();
  j.block(n, n + r + d, r, k) = lift.G_R;
  j.block(n + r + d, n, k, r) = -lift.G_R.adjoint();
  j.block(0, n + r + d + k, n, l) = lift.G_L;
  j.block(n + r + d + k, 0, l, n) = -lift.G_L.adjoint();

  Mat rd = Mat::Zero(nz, nz);
  rd.block(n, n, r, r) = lift.R_tilde;

  Mat e = Mat::Zero(nz, nz);
  e.block(0, 0, n, n) = lift.L_mat;

  Mat b = Mat::Zero(nz, m);
  b.topRows(n) = -lift.J13();
  b.middleRows(n, r) = -lift.J23();
  b.middleRows(n + r, d) = -lift.G3().adjoint();

  DescriptorPH out = DescriptorPH::make(std::move(e), std::move(j), std::move(rd),
                                        Mat::Identity(nz, nz), std::move(b), Mat::Zero(nz, m),
                                        Mat::Zero(m, m), lift.J33());
  return {std::move(out), std::move(lift)};
}

Trajectory lift_solution(const GeometricPH& sys, const LiftData& lift, const Trajectory& traj,
                         double membership_tol) {
  const Mat& x = traj.channel(traj.x, "x");
  const Mat& f_r = traj.channel(traj.f_R, "f_R");
  const Mat& e_r = traj.channel(traj.e_R, "e_R");
  const Mat& e_l = traj.channel(traj.e_L, "e_L");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const double h = traj.step();
  const Index samples = traj.samples();
  const Index n = lift.n, r = lift.r, m = lift.m;

  Mat xdot = traj.xdot.has_value() ? traj.channel(traj.xdot, "xdot") : central_difference(x, h);

  // Membership checks per sample, then multiplier recovery:
  //   lambda   = G*(Jt e - f)      for the Dirac pair
  //   lambda_R = G_R*(f_R + R_tilde e_R)
  //   lambda_L = G_L*(L e_L - x),  mu_L = d/dt lambda_L
  Mat z(samples, lift.state_dim());
  Mat lambda_l(samples, lift.l);
  for (Index i = 0; i < samples; ++i) {
    const Vec ev = stack3(e_l.row(i).transpose(), e_r.row(i).transpose(), u.row(i).transpose());
    const Vec fv = stack3(-xdot.row(i).transpose(), f_r.row(i).transpose(), y.row(i).transpose());
    Vec pair(2 * (n + r + m));
    pair << fv, ev;
    if (sys.dirac.contains(pair) > membership_tol) {
      fail(ErrorCode::NotMember, "sample " + std::to_string(i) + " violates the Dirac membership");
    }
    Vec pair_l(2 * n);
    pair_l << x.row(i).transpose(), e_l.row(i).transpose();
    if (sys.lagrange.contains(pair_l) > membership_tol) {
      fail(ErrorCode::NotMember, "sample " + std::to_string(i) + " violates the Lagrange membership");
    }
    Vec pair_r(2 * r);
    pair_r << f_r.row(i).transpose(), e_r.row(i).transpose();
    if (sys.resistive.contains(pair_r) > membership_tol) {
      fail(ErrorCode::NotMember, "sample " + std::to_string(i) + " violates the resistive membership");
    }

    const Vec lambda = lift.G.adjoint() * (lift.Jt * ev - fv);
    const Vec lambda_r =
        lift.G_R.adjoint() * (f_r.row(i).transpose() + lift.R_tilde * e_r.row(i).transpose());
    lambda_l.row(i) =
        (lift.G_L.adjoint() * (lift.L_mat * e_l.row(i).transpose() - x.row(i).transpose()))
            .transpose();

    z.row(i).segment(0, n) = e_l.row(i);
    z.row(i).segment(n, r) = e_r.row(i);
    z.row(i).segment(n + r, lift.d) = lambda.transpose();
    z.row(i).segment(n + r + lift.d, lift.k) = lambda_r.transpose();
  }
  if (lift.l > 0) {
    z.rightCols(lift.l) = central_difference(lambda_l, h);
  }

  Trajectory out;
  out.grid = traj.grid;
  out.z = std::move(z);
  out.u = u;
  out.y = y;
  return out;
}

Trajectory project_solution(const GeometricPH& sys, const LiftData& lift, const Trajectory& traj,
                            const Vec& x0, const Vec& e_l0, double membership_tol) {
  const Mat& z = traj.channel(traj.z, "z");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const double h = traj.step();
  const Index samples = traj.samples();
  const Index n = lift.n, r = lift.r;
  if (z.cols() != lift.state_dim()) {
    fail(ErrorCode::ShapeError, "descriptor state dimension does not match the lift");
  }
  if (x0.size() != n || e_l0.size() != n) fail(ErrorCode::ShapeError, "initial data must have length n");

  Vec pair0(2 * n);
  pair0 << x0, e_l0;
  if (sys.lagrange.contains(pair0) > membership_tol) {
    fail(ErrorCode::InconsistentInitial, "(x0, e_L(0)) is not in the Lagrange structure");
  }
  if ((e_l0 - z.row(0).segment(0, n).transpose()).norm() >
      membership_tol * (1.0 + e_l0.norm())) {
    fail(ErrorCode::InconsistentInitial, "e_L(0) does not match the trajectory");
  }

  const Mat e_l = z.leftCols(n);
  const Mat e_r = z.middleCols(n, r);
  const Mat lambda = z.middleCols(n + r, lift.d);
  const Mat lambda_r = z.middleCols(n + r + lift.d, lift.k);
  const Mat mu_l = z.rightCols(lift.l);

  // lambda_L(t) = lambda_L(0) + int_0^t mu_L, then x = L e_L - G_L lambda_L.
  const Vec lambda_l0 = lift.G_L.adjoint() * (lift.L_mat * e_l0 - x0);
  Mat lambda_l = trapezoid_cumulative(mu_l, h);
  lambda_l.rowwise() += lambda_l0.transpose();

  Mat x(samples, n), f_r(samples, r), xdot(samples, n);
  for (Index i = 0; i < samples; ++i) {
    x.row(i) = (lift.L_mat * e_l.row(i).transpose() - lift.G_L * lambda_l.row(i).transpose())
                   .transpose();
    f_r.row(i) = (-lift.R_tilde * e_r.row(i).transpose() + lift.G_R * lambda_r.row(i).transpose())
                     .transpose();
    // xdot = d/dt(L e_L) - G_L mu_L evaluated through the Dirac row block.
    xdot.row(i) = (-lift.J11() * e_l.row(i).transpose() - lift.J12() * e_r.row(i).transpose() +
                   lift.G1() * lambda.row(i).transpose() - lift.J13() * u.row(i).transpose())
                      .transpose();
  }

  Trajectory out;
  out.grid = traj.grid;
  out.u = u;
  out.y = y;
  out.x = std::move(x);
  out.xdot = std::move(xdot);
  out.f_R = std::move(f_r);
  out.e_R = e_r;
  out.e_L = e_l;
  out.lambda = lambda;
  out.lambda_R = lambda_r;
  out.mu_L = mu_l;
  return out;
}

// ----------------------------------------------------------------------------
// Descriptor -> geometric
// ----------------------------------------------------------------------------

std::pair<GeometricPH, GeoMaps> descriptor_to_geometric(const DescriptorPH& sys,
                                                        const TolerancePolicy& tol) {
  const Index n = sys.n, m = sys.m;
  Mat stacked(2 * n, n);
  stacked.topRows(n) = sys.E;
  stacked.bottomRows(n) = sys.Q;
  if (rank_factor(stacked, tol).rank < n) {
    fail(ErrorCode::KernelOverlap, "ker E and ker Q intersect nontrivially");
  }
  auto validation = validate_descriptor(sys, tol);
  if (!validation.pass) {
    fail(ErrorCode::InvalidMatrix, "matrices do not satisfy the descriptor structure constraints");
  }

  GeoMaps maps;
  maps.n = n;
  maps.m = m;
  const Index r = maps.r();
  // The resistive structure and the solution maps use the inner supply block
  // [[R, P], [P*, S]] acting on f_R = (Qz, u); it agrees with the
  // Q-congruence form whenever Q is invertible.
  maps.W = Mat::Zero(r, r);
  maps.W.topLeftCorner(n, n) = sys.R;
  maps.W.topRightCorner(n, m) = sys.P;
  maps.W.bottomLeftCorner(m, n) = sys.P.adjoint();
  maps.W.bottomRightCorner(m, m) = sys.S;
  maps.W = hermitian_part(maps.W);
  maps.Gamma = Mat::Zero(r, r);
  maps.Gamma.topLeftCorner(n, n) = sys.J;
  maps.Gamma.topRightCorner(n, m) = sys.B;
  maps.Gamma.bottomLeftCorner(m, n) = -sys.B.adjoint();
  maps.Gamma.bottomRightCorner(m, m) = -sys.N;

  // Reorders D_tilde's (e_L, u, e_R) input and (-xdot, y, f_R) output blocks
  // into the (e_L, e_R, u) / (-xdot, f_R, y) flow/effort convention.
  maps.U = Mat::Zero(n + r + m, n + r + m);
  maps.U.block(0, 0, n, n) = Mat::Identity(n, n);
  maps.U.block(n, n + m, r, r) = Mat::Identity(r, r);
  maps.U.block(n + r, n, m, m) = Mat::Identity(m, m);

  maps.D_tilde = Mat::Zero(n + m + r, n + m + r);
  maps.D_tilde.topLeftCorner(r, r) = -maps.Gamma;
  maps.D_tilde.topRightCorner(r, r) = -Mat::Identity(r, r);
  maps.D_tilde.bottomLeftCorner(r, r) = Mat::Identity(r, r);

  LinearRelation lagrange = LinearRelation::from_image(stacked, n, n, tol);

  Mat res_gen(2 * r, r);
  res_gen.topRows(r) = Mat::Identity(r, r);
  res_gen.bottomRows(r) = -maps.W;
  LinearRelation resistive = LinearRelation::from_image(res_gen, r, r, tol);

  LinearRelation dirac =
      LinearRelation::inverse_graph(maps.U * maps.D_tilde * maps.U.adjoint(), tol);

  GeometricPH out(n, r, m, std::move(dirac), std::move(lagrange), std::move(resistive));
  require_geometric(out, tol);
  return {std::move(out), std::move(maps)};
}

Trajectory desc_solution_to_geo(const DescriptorPH& sys, const GeoMaps& maps,
                                const Trajectory& traj, double residual_tol) {
  const Mat& z = traj.channel(traj.z, "z");
  const Mat& u = traj.channel(traj.u, "u");
  const Index samples = traj.samples();
  const Index n = sys.n, m = sys.m;
  const Index r = maps.r();

  auto [diff, outp] = dae_defects(sys, traj);
  const double worst = std::max(diff.size() ? diff.maxCoeff() : 0.0, outp.maxCoeff());
  if (worst > residual_tol) {
    fail(ErrorCode::ResidualTooLarge, "trajectory does not solve the descriptor system");
  }

  Mat x(samples, n), e_l(samples, n), f_r(samples, r), e_r(samples, r), xdot(samples, n);
  const Mat a = (sys.J - sys.R) * sys.Q;
  const Mat bu = sys.B - sys.P;
  for (Index i = 0; i < samples; ++i) {
    const Vec zi = z.row(i).transpose();
    const Vec ui = u.row(i).transpose();
    x.row(i) = (sys.E * zi).transpose();
    e_l.row(i) = (sys.Q * zi).transpose();
    Vec fr(r);
    fr.head(n) = sys.Q * zi;
    fr.tail(m) = ui;
    f_r.row(i) = fr.transpose();
    e_r.row(i) = (-maps.W * fr).transpose();
    xdot.row(i) = (a * zi + bu * ui).transpose();  // exact d/dt(Ez)
  }

  Trajectory out;
  out.grid = traj.grid;
  out.u = u;
  out.y = traj.channel(traj.y, "y");
  out.x = std::move(x);
  out.e_L = std::move(e_l);
  out.f_R = std::move(f_r);
  out.e_R = std::move(e_r);
  out.xdot = std::move(xdot);
  return out;
}

Trajectory geo_solution_to_desc(const DescriptorPH& sys, const GeoMaps& maps,
                                const Trajectory& traj, double residual_tol) {
  const Mat& x = traj.channel(traj.x, "x");
  const Mat& e_l = traj.channel(traj.e_L, "e_L");
  const Index samples = traj.samples();
  const Index n = sys.n;

  Mat stacked(2 * n, n);
  stacked.topRows(n) = sys.E;
  stacked.bottomRows(n) = sys.Q;
  const Mat pinv = pseudo_inverse(stacked);

  Mat z(samples, n);
  for (Index i = 0; i < samples; ++i) {
    Vec rhs(2 * n);
    rhs << x.row(i).transpose(), e_l.row(i).transpose();
    const Vec zi = pinv * rhs;
    const double defect = (stacked * zi - rhs).norm() / std::max(1.0, rhs.norm());
    if (defect > residual_tol) {
      fail(ErrorCode::NoConsistentZ,
           "no state satisfies x = Ez and e_L = Qz at sample " + std::to_string(i));
    }
    z.row(i) = zi.transpose();
  }

  Trajectory out;
  out.grid = traj.grid;
  out.u = traj.channel(traj.u, "u");
  out.y = traj.channel(traj.y, "y");
  out.z = std::move(z);
  (void)maps;
  return out;
}

// ----------------------------------------------------------------------------
// Pencil and transfer-function checks
// ----------------------------------------------------------------------------

PencilReport pencil_regular(const Mat& e, const Mat& a, const TolerancePolicy& tol,
                            std::uint64_t seed) {
  if (e.rows() != e.cols() || a.rows() != a.cols() || e.rows() != a.rows()) {
    fail(ErrorCode::ShapeError, "pencil test needs square matrices of equal size");
  }
  const Index n = e.rows();
  PencilReport report;
  if (n == 0) {
    report.regular = true;
    return report;
  }

  const double scale = std::max(1.0, operator_norm(a)) / std::max(1.0, operator_norm(e));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const Complex shift = scale * Complex(gauss(rng), gauss(rng));
    ++report.shifts_tried;
    const Mat pencil = shift * e - a;
    Eigen::JacobiSVD<Mat> svd(pencil);
    const RealVec& sv = svd.singularValues();
    const double cutoff = tol.rank_cutoff(sv(0), n, n);
    if (sv(sv.size() - 1) > cutoff) {
      report.regular = true;
      report.decided_by_shift = true;
      break;
    }
  }

  if (!report.decided_by_shift) {
    // A square pencil is singular iff (sE - A) z(s) = 0 has a polynomial
    // solution of degree < n. Stacking coefficients gives a block-Toeplitz
    // system whose null space is nontrivial exactly in the singular case.
    Mat t = Mat::Zero((n + 1) * n, n * n);
    for (Index block = 0; block < n; ++block) {
      t.block(block * n, block * n, n, n) = -a;
      t.block((block + 1) * n, block * n, n, n) = e;
    }
    report.staircase_checked = true;
    report.regular = rank_factor(t, tol).rank == n * n;
  }

  const bool e_hermitian = skew_part(e).norm() <= tol.structural() * (1.0 + e.norm());
  if (e_hermitian && min_hermitian_eigenvalue(e) >= -tol.structural()) {
    report.kernel_test_available = true;
    Mat stacked(2 * n, n);
    stacked.topRows(n) = e;
    stacked.bottomRows(n) = a;
    report.kernel_intersection_trivial = rank_factor(stacked, tol).rank == n;
  }
  return report;
}

PositiveRealReport transfer_positive_real(const DescriptorPH& sys,
                                          const std::vector<Complex>& samples,
                                          const TolerancePolicy& tol) {
  const Index n = sys.n;
  if (operator_norm(sys.Q - Mat::Identity(n, n)) > tol.structural() ||
      operator_norm(sys.P) > tol.structural() || operator_norm(sys.S) > tol.structural()) {
    fail(ErrorCode::ShapeError, "positive-real sampling needs Q = I, P = 0, S = 0");
  }
  const Mat k = sys.J - sys.R;
  if (!pencil_regular(sys.E, k, tol).regular) {
    fail(ErrorCode::IrregularPencil, "pencil (E, J - R) is singular");
  }

  PositiveRealReport report;
  report.samples = samples;
  report.overall_min = 0.0;
  bool first = true;
  for (const Complex& s : samples) {
    if (!(s.real() > 0.0)) fail(ErrorCode::ShapeError, "samples must satisfy Re s > 0");
    const Mat pencil = s * sys.E - k;
    Eigen::JacobiSVD<Mat> svd(pencil, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVec& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= tol.rank_cutoff(sv(0), n, n)) {
      fail(ErrorCode::SingularShift, "sample coincides with a pencil eigenvalue");
    }
    const Mat solved = svd.solve(sys.B);
    const Mat g = sys.B.adjoint() * solved + sys.N;
    const double min_eig = min_hermitian_eigenvalue(g + g.adjoint());
    report.min_eigs.push_back(min_eig);
    report.overall_min = first ? min_eig : std::min(report.overall_min, min_eig);
    first = false;
  }
  report.pass = report.overall_min >= -tol.structural();
  return report;
}

RoundtripResult roundtrip_q_identity(const DescriptorPH& sys, const TolerancePolicy& tol) {
  auto [geo, maps] = descriptor_to_geometric(sys, tol);
  auto [desc, lift] = geometric_to_descriptor(geo);
  return RoundtripResult{std::move(desc), std::move(maps), std::move(lift)};
}

}  // namespace phbridge
