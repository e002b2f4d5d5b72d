#include <catch2/catch_amalgamated.hpp>

#include "support/generators.hpp"

using namespace phbridge;
using phbridge::testing::Rng;

namespace {

Mat mat1(double v) {
  Mat m(1, 1);
  m(0, 0) = Complex(v, 0.0);
  return m;
}

GeometricPH scalar_geometric(double r0) {
  Mat jt(3, 3);
  jt.setZero();
  jt(0, 1) = 1.0;
  jt(0, 2) = 1.0;
  jt(1, 0) = -1.0;
  jt(2, 0) = -1.0;
  return GeometricPH(1, 1, 1, LinearRelation::inverse_graph(jt),
                     LinearRelation::graph(mat1(1.0)),
                     LinearRelation::inverse_graph(mat1(-r0)));
}

}  // namespace

TEST_CASE("input signal evaluation") {
  CHECK(eval_input(ZeroInput{}, 0.3, 2).norm() == 0.0);

  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  CHECK(std::abs(eval_input(sine, 0.25, 1)(0).real() - 1.0) < 1e-12);  // sin(pi/2)

  PolynomialInput poly;
  RealVec coeffs(3);
  coeffs << 1.0, 2.0, 3.0;
  poly.coefficients.push_back(coeffs);
  CHECK(std::abs(eval_input(poly, 2.0, 1)(0).real() - 17.0) < 1e-12);

  TableInput table;
  table.times = RealVec::LinSpaced(3, 0.0, 1.0);
  table.values = Mat::Zero(3, 1);
  table.values(1, 0) = 2.0;
  CHECK(std::abs(eval_input(table, 0.25, 1)(0).real() - 1.0) < 1e-12);
}

TEST_CASE("consistent_init with invertible E returns the guess") {
  auto sys = DescriptorPH::make(Mat::Identity(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2),
                                Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(2, 1),
                                Mat::Zero(1, 1), Mat::Zero(1, 1));
  Vec guess(2);
  guess << Complex(0.3, 0), Complex(-0.9, 0);
  CHECK((consistent_init(sys, Vec::Zero(1), guess) - guess).norm() == 0.0);
}

TEST_CASE("consistent_init projects onto the algebraic constraint") {
  // The scalar worked example gives the constraint e_L - r0 e_R = 0.
  auto [desc, lift] = geometric_to_descriptor(scalar_geometric(1.0));
  Vec guess(2);
  guess << Complex(1.0, 0), Complex(0.0, 0);
  const Vec z0 = consistent_init(desc, Vec::Zero(1), guess);
  // Orthogonal projection of (1, 0) onto the line {z1 = z2} is (1/2, 1/2).
  CHECK(std::abs(z0(0).real() - 0.5) < 1e-12);
  CHECK(std::abs(z0(1).real() - 0.5) < 1e-12);
}

TEST_CASE("consistent_init detects infeasible constraints") {
  // Row 2 of E and (J-R)Q vanish while B pushes a constant into it: the
  // constraint reads 0 = u0.
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 1.0;
  Mat b = Mat::Zero(2, 1);
  b(1, 0) = 1.0;
  auto sys = DescriptorPH::make(e, Mat::Zero(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2), b,
                                Mat::Zero(2, 1), Mat::Zero(1, 1), Mat::Zero(1, 1));
  CHECK_THROWS_AS(consistent_init(sys, Vec::Ones(1), Vec::Zero(2)), Error);
}

TEST_CASE("implicit Euler reproduces geometric decay") {
  auto sys = DescriptorPH::make(Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Identity(1, 1),
                                Mat::Identity(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1),
                                Mat::Zero(1, 1), Mat::Zero(1, 1));
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h = 0.1;
  auto traj = integrate_implicit_euler(sys, cfg, Vec::Ones(1));
  for (Index k = 0; k < traj.samples(); ++k) {
    const double expected = std::pow(1.1, -static_cast<double>(k));
    CHECK(std::abs((*traj.z)(k, 0).real() - expected) < 1e-12);
  }
  // First-order match with e^{-t}.
  CHECK(std::abs((*traj.z)(traj.samples() - 1, 0).real() - std::exp(-1.0)) < 0.1);
}

TEST_CASE("implicit Euler dissipates skew dynamics") {
  Mat skew(2, 2);
  skew.setZero();
  skew(0, 1) = 1.0;
  skew(1, 0) = -1.0;
  auto sys = DescriptorPH::make(Mat::Identity(2, 2), skew, Mat::Zero(2, 2), Mat::Identity(2, 2),
                                Mat::Zero(2, 1), Mat::Zero(2, 1), Mat::Zero(1, 1),
                                Mat::Zero(1, 1));
  SimConfig cfg;
  cfg.t_end = 2.0;
  cfg.h = 1e-2;
  Vec z0(2);
  z0 << Complex(1, 0), Complex(0, 0);
  auto traj = integrate_implicit_euler(sys, cfg, z0);
  double previous = hamiltonian(sys, traj.z->row(0).transpose());
  for (Index k = 1; k < traj.samples(); ++k) {
    const double current = hamiltonian(sys, traj.z->row(k).transpose());
    CHECK(current <= previous + 1e-12);
    previous = current;
  }
}

TEST_CASE("zero data stays zero") {
  auto sys = DescriptorPH::make(Mat::Identity(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2),
                                Mat::Identity(2, 2), Mat::Ones(2, 1), Mat::Zero(2, 1),
                                Mat::Zero(1, 1), Mat::Zero(1, 1));
  SimConfig cfg;
  cfg.t_end = 0.5;
  cfg.h = 1e-2;
  auto traj = integrate_implicit_euler(sys, cfg, Vec::Zero(2));
  CHECK(traj.z->norm() == 0.0);
  CHECK(traj.y->norm() == 0.0);
}

TEST_CASE("integration rejects singular pencils") {
  // E = 0 with J - R = 0 has no unique solutions at any step size.
  auto sys = DescriptorPH::make(Mat::Zero(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1), mat1(1.0),
                                Mat::Zero(1, 1), Mat::Zero(1, 1), Mat::Zero(1, 1),
                                Mat::Zero(1, 1));
  SimConfig cfg;
  cfg.t_end = 0.1;
  cfg.h = 1e-2;
  CHECK_THROWS_AS(integrate_implicit_euler(sys, cfg, Vec::Zero(1)), Error);
}

TEST_CASE("first-order accuracy with halving ratio") {
  auto sys = DescriptorPH::make(Mat::Identity(2, 2), Mat::Zero(2, 2), Mat::Identity(2, 2),
                                Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(2, 1),
                                Mat::Zero(1, 1), Mat::Zero(1, 1));
  Vec z0(2);
  z0 << Complex(1, 0), Complex(-2, 0);
  auto error_at = [&](double h) {
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.h = h;
    auto traj = integrate_implicit_euler(sys, cfg, z0);
    double worst = 0.0;
    for (Index k = 0; k < traj.samples(); ++k) {
      const Vec exact = z0 * std::exp(-traj.grid(k));
      worst = std::max(worst, (traj.z->row(k).transpose() - exact).norm());
    }
    return worst;
  };
  const double coarse = error_at(1e-2);
  const double fine = error_at(5e-3);
  const double ratio = coarse / fine;
  CHECK(coarse < 1e-1);
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("constraint preservation along integrated trajectories") {
  Rng rng(97);
  auto [desc, lift] = geometric_to_descriptor(scalar_geometric(0.7));
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h = 1e-2;
  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  cfg.input = sine;
  const Vec z0 = consistent_init(desc, eval_input(cfg.input, 0.0, 1), Vec::Zero(2));
  auto traj = integrate_implicit_euler(desc, cfg, z0);
  const Mat n_e = rank_factor(desc.E).conullspace;
  const Mat c = n_e.adjoint() * (desc.J - desc.R) * desc.Q;
  const Mat bu = n_e.adjoint() * (desc.B - desc.P);
  for (Index k = 0; k < traj.samples(); ++k) {
    const Vec defect = c * traj.z->row(k).transpose() + bu * traj.u->row(k).transpose();
    CHECK(defect.norm() < 1e-9);
  }
}

TEST_CASE("determinism of seeded runs") {
  auto [desc, lift] = geometric_to_descriptor(scalar_geometric(0.7));
  SimConfig cfg;
  cfg.t_end = 0.5;
  cfg.h = 1e-3;
  cfg.seed = 1234;
  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  cfg.input = sine;
  const Vec z0 = consistent_init(desc, eval_input(cfg.input, 0.0, 1), Vec::Zero(2));
  auto a = integrate_implicit_euler(desc, cfg, z0);
  auto b = integrate_implicit_euler(desc, cfg, z0);
  CHECK((*a.z - *b.z).norm() == 0.0);
  CHECK((*a.y - *b.y).norm() == 0.0);
}

TEST_CASE("verify flags a corrupted sample") {
  auto [desc, lift] = geometric_to_descriptor(scalar_geometric(1.0));
  SimConfig cfg;
  cfg.t_end = 0.5;
  cfg.h = 1e-2;
  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  cfg.input = sine;
  const Vec z0 = consistent_init(desc, eval_input(cfg.input, 0.0, 1), Vec::Zero(2));
  auto traj = integrate_implicit_euler(desc, cfg, z0);

  auto clean = verify_descriptor_solution(desc, traj);
  CHECK(clean.max_membership < 1e-10);

  const Index corrupted_at = traj.samples() / 2;
  (*traj.z)(corrupted_at, 0) += 1.0;
  auto report = verify_descriptor_solution(desc, traj);
  CHECK(report.max_membership > 1e-2);
  CHECK((report.worst_sample == corrupted_at || report.worst_sample == corrupted_at + 1));
}

TEST_CASE("correspondence experiment on the scalar example") {
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h = 1e-3;
  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  cfg.input = sine;
  auto report = correspondence_experiment(scalar_geometric(0.5), cfg);
  CHECK(report.descriptor_check.max_membership < 1e-9);
  CHECK(report.geometric_check.max_membership < 1e-9);
  CHECK(report.geometric_check.max_dissipation <= 1e-10);
  CHECK(report.descriptor_check.max_power < 50.0 * cfg.h);
  CHECK(report.geometric_check.max_power < 50.0 * cfg.h);
}

TEST_CASE("correspondence experiment conserves energy without dissipation") {
  // R = {0} x K^r (zero resistive matrix) and u = 0: H stays flat to O(h).
  Rng rng(101);
  testing::GeometricSpec spec;
  spec.n = 2;
  spec.r = 1;
  spec.m = 1;
  spec.lossless = true;
  spec.neg_lagrange_resistive = true;
  auto sys = testing::random_simulable_geometric(rng, spec, Field::Real);
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h = 1e-3;
  auto report = correspondence_experiment(sys, cfg);
  CHECK(std::abs(report.hamiltonian_end - report.hamiltonian_start) <=
        10.0 * cfg.h * (1.0 + std::abs(report.hamiltonian_start)));
}

TEST_CASE("correspondence experiment over the complex field") {
  Rng rng(211);
  testing::GeometricSpec spec;
  spec.n = 2;
  spec.r = 2;
  spec.m = 1;
  spec.k = 1;
  spec.neg_lagrange_resistive = true;
  auto sys = testing::random_simulable_geometric(rng, spec, Field::Complex);
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.h = 1e-3;
  SinusoidInput sine{RealVec::Ones(1), RealVec::Ones(1), RealVec::Zero(1)};
  cfg.input = sine;
  auto report = correspondence_experiment(sys, cfg);
  CHECK(report.geometric_check.max_membership < 1e-8);
  CHECK(report.descriptor_check.max_membership < 1e-10);
  CHECK(report.geometric_check.max_dissipation <= 1e-10);
}

TEST_CASE("correspondence experiment over random triples") {
  Rng rng(103);
  int passes = 0;
  for (int trial = 0; trial < 8; ++trial) {
    testing::GeometricSpec spec;
    spec.n = 1 + static_cast<Index>(rng() % 3);
    spec.r = 1 + static_cast<Index>(rng() % 3);
    spec.m = 1 + static_cast<Index>(rng() % 2);
    spec.d = static_cast<Index>(rng() % 2);
    spec.k = static_cast<Index>(rng() % 2);
    spec.l = static_cast<Index>(rng() % 2);
    auto sys = testing::random_simulable_geometric(rng, spec, Field::Real);
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.h = 1e-3;
    SinusoidInput sine{RealVec::Ones(spec.m), RealVec::Ones(spec.m), RealVec::Zero(spec.m)};
    cfg.input = sine;
    auto report = correspondence_experiment(sys, cfg);
    const double scale =
        1.0 + std::max(report.descriptor_traj.z->cwiseAbs().maxCoeff(), 1.0);
    if (report.geometric_check.max_membership < 1e-8 &&
        report.geometric_check.max_dissipation <= 1e-8 * scale * scale &&
        report.geometric_check.max_power < 100.0 * cfg.h * scale * scale) {
      ++passes;
    }
  }
  CHECK(passes == 8);
}
