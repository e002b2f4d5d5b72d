#include "phbridge/phcore.hpp"

#include <cmath>
#include <string>

namespace phbridge {

GeometricPH::GeometricPH(Index n_, Index r_, Index m_, LinearRelation dirac_,
                         LinearRelation lagrange_, LinearRelation resistive_)
    : n(n_), r(r_), m(m_), dirac(std::move(dirac_)), lagrange(std::move(lagrange_)),
      resistive(std::move(resistive_)) {
  const Index flow = n + r + m;
  if (dirac.n_left() != flow || dirac.n_right() != flow || lagrange.n_left() != n ||
      lagrange.n_right() != n || resistive.n_left() != r || resistive.n_right() != r) {
    fail(ErrorCode::ShapeError, "relation dimensions do not match (n, r, m)");
  }
}

DescriptorPH DescriptorPH::make(Mat E, Mat J, Mat R, Mat Q, Mat B, Mat P, Mat S, Mat N) {
  DescriptorPH sys;
  sys.n = E.rows();
  sys.m = B.cols();
  auto check = [&](const Mat& a, Index rows, Index cols, const char* name) {
    if (a.rows() != rows || a.cols() != cols) {
      fail(ErrorCode::ShapeError, std::string("descriptor matrix ") + name + " has the wrong shape");
    }
    require_finite(a, name);
  };
  check(E, sys.n, sys.n, "E");
  check(J, sys.n, sys.n, "J");
  check(R, sys.n, sys.n, "R");
  check(Q, sys.n, sys.n, "Q");
  check(B, sys.n, sys.m, "B");
  check(P, sys.n, sys.m, "P");
  check(S, sys.m, sys.m, "S");
  check(N, sys.m, sys.m, "N");
  sys.E = std::move(E);
  sys.J = std::move(J);
  sys.R = std::move(R);
  sys.Q = std::move(Q);
  sys.B = std::move(B);
  sys.P = std::move(P);
  sys.S = std::move(S);
  sys.N = std::move(N);
  return sys;
}

double Trajectory::step() const {
  if (grid.size() < 2) fail(ErrorCode::ShapeError, "trajectory needs at least two samples");
  const double h = grid(1) - grid(0);
  if (!(h > 0.0)) fail(ErrorCode::ShapeError, "trajectory grid must be strictly increasing");
  for (Index i = 1; i + 1 < grid.size(); ++i) {
    if (std::abs((grid(i + 1) - grid(i)) - h) > 1e-9 * h) {
      fail(ErrorCode::ShapeError, "trajectory grid must be uniform");
    }
  }
  return h;
}

const Mat& Trajectory::channel(const std::optional<Mat>& c, const char* name) const {
  if (!c.has_value()) {
    fail(ErrorCode::MissingChannel, std::string("trajectory channel '") + name + "' is missing");
  }
  if (c->rows() != grid.size()) {
    fail(ErrorCode::ShapeError, std::string("channel '") + name + "' does not match the grid length");
  }
  return *c;
}

Mat compute_W(const DescriptorPH& sys) {
  Mat inner(sys.n + sys.m, sys.n + sys.m);
  inner.topLeftCorner(sys.n, sys.n) = sys.R;
  inner.topRightCorner(sys.n, sys.m) = sys.P;
  inner.bottomLeftCorner(sys.m, sys.n) = sys.P.adjoint();
  inner.bottomRightCorner(sys.m, sys.m) = sys.S;
  Mat congruence = Mat::Identity(sys.n + sys.m, sys.n + sys.m);
  congruence.topLeftCorner(sys.n, sys.n) = sys.Q;
  return hermitian_part(congruence.adjoint() * inner * congruence);
}

DescriptorValidation validate_descriptor(const DescriptorPH& sys, const TolerancePolicy& tol) {
  DescriptorValidation report;
  report.threshold = tol.structural();
  report.eq_symmetry = operator_norm(sys.E.adjoint() * sys.Q - sys.Q.adjoint() * sys.E);
  report.j_skew = hermitian_part(sys.J).norm();
  report.n_skew = hermitian_part(sys.N).norm();
  report.r_symmetry = skew_part(sys.R).norm();
  report.s_symmetry = skew_part(sys.S).norm();
  report.min_eig_w = min_hermitian_eigenvalue(compute_W(sys));
  report.pass = report.eq_symmetry <= report.threshold && report.j_skew <= report.threshold &&
                report.n_skew <= report.threshold && report.r_symmetry <= report.threshold &&
                report.s_symmetry <= report.threshold && report.min_eig_w >= -report.threshold;
  return report;
}

GeometricValidation validate_geometric(const GeometricPH& sys, const TolerancePolicy& tol) {
  GeometricValidation report;
  const double threshold = tol.structural();
  report.dims_ok = sys.dirac.n_left() == sys.n + sys.r + sys.m &&
                   sys.dirac.n_right() == sys.n + sys.r + sys.m &&
                   sys.lagrange.n_left() == sys.n && sys.lagrange.n_right() == sys.n &&
                   sys.resistive.n_left() == sys.r && sys.resistive.n_right() == sys.r;
  if (!report.dims_ok) return report;
  report.dirac = sys.dirac.classify(threshold);
  report.lagrange = sys.lagrange.classify(threshold);
  report.resistive = sys.resistive.classify(threshold);
  report.pass = report.dirac.is_dirac && report.lagrange.is_lagrange &&
                report.resistive.is_max_resistive;
  return report;
}

void require_geometric(const GeometricPH& sys, const TolerancePolicy& tol) {
  auto report = validate_geometric(sys, tol);
  if (!report.pass) {
    fail(ErrorCode::NotGeometric, "triple is not a valid geometric pH system");
  }
}

double hamiltonian(const DescriptorPH& sys, const Vec& z, const TolerancePolicy& tol) {
  if (z.size() != sys.n) fail(ErrorCode::ShapeError, "state length must equal n");
  const Complex h = 0.5 * (z.adjoint() * sys.Q.adjoint() * sys.E * z)(0, 0);
  const double scale = 1.0 + z.squaredNorm() * (1.0 + operator_norm(sys.E));
  if (std::abs(h.imag()) > tol.structural() * scale) {
    fail(ErrorCode::InvalidMatrix, "Hamiltonian has a non-negligible imaginary part");
  }
  return h.real();
}

GeometricPowerResidual geometric_power_residual(const GeometricPH& sys, const Trajectory& traj) {
  const Mat& x = traj.channel(traj.x, "x");
  const Mat& f_r = traj.channel(traj.f_R, "f_R");
  const Mat& e_r = traj.channel(traj.e_R, "e_R");
  const Mat& e_l = traj.channel(traj.e_L, "e_L");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");

  Mat xdot;
  if (traj.xdot.has_value()) {
    xdot = traj.channel(traj.xdot, "xdot");
  } else {
    xdot = central_difference(x, traj.step());
  }

  const Index k = traj.samples();
  GeometricPowerResidual out;
  out.per_sample.resize(k);
  out.dissipation.resize(k);
  for (Index i = 0; i < k; ++i) {
    // <a, b> = b* a; only real parts enter the balance.
    const double stored = (e_l.row(i).conjugate() * xdot.row(i).transpose())(0, 0).real();
    const double dissipated = (e_r.row(i).conjugate() * f_r.row(i).transpose())(0, 0).real();
    const double supplied = (u.row(i).conjugate() * y.row(i).transpose())(0, 0).real();
    out.per_sample(i) = std::abs(-stored + dissipated + supplied);
    out.dissipation(i) = dissipated;
  }
  out.max_residual = k > 0 ? out.per_sample.maxCoeff() : 0.0;
  out.max_dissipation = k > 0 ? out.dissipation.maxCoeff() : 0.0;
  return out;
}

DescriptorPowerResidual descriptor_power_residual(const DescriptorPH& sys, const Trajectory& traj) {
  const Mat& z = traj.channel(traj.z, "z");
  const Mat& u = traj.channel(traj.u, "u");
  const Mat& y = traj.channel(traj.y, "y");
  const double h = traj.step();
  const Index k = traj.samples();

  const Mat w_sqrt = psd_sqrt(compute_W(sys));

  DescriptorPowerResidual out;
  out.per_step.resize(k - 1);
  for (Index i = 0; i + 1 < k; ++i) {
    const double h_next = hamiltonian(sys, z.row(i + 1).transpose());
    const double h_curr = hamiltonian(sys, z.row(i).transpose());
    const Vec z_mid = 0.5 * (z.row(i) + z.row(i + 1)).transpose();
    const Vec u_mid = 0.5 * (u.row(i) + u.row(i + 1)).transpose();
    const Vec y_mid = 0.5 * (y.row(i) + y.row(i + 1)).transpose();
    Vec zu(sys.n + sys.m);
    zu.head(sys.n) = z_mid;
    zu.tail(sys.m) = u_mid;
    const double supplied = (u_mid.adjoint() * y_mid)(0, 0).real();
    const double dissipated = (w_sqrt * zu).squaredNorm();
    out.per_step(i) = std::abs((h_next - h_curr) / h - supplied + dissipated);
  }
  out.max_residual = out.per_step.size() > 0 ? out.per_step.maxCoeff() : 0.0;
  return out;
}

}  // namespace phbridge
