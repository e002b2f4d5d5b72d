#include <catch2/catch_amalgamated.hpp>

#include "support/generators.hpp"

using namespace phbridge;
using phbridge::testing::Rng;

namespace {

Mat real2(std::initializer_list<std::initializer_list<double>> rows) {
  const Index r = rows.size();
  const Index c = rows.begin()->size();
  Mat a(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) a(i, j++) = Complex(v, 0.0);
    ++i;
  }
  return a;
}

}  // namespace

TEST_CASE("rank_factor identity") {
  auto f = rank_factor(Mat::Identity(2, 2));
  CHECK(f.rank == 2);
  CHECK(f.nullspace.cols() == 0);
  CHECK(subspace_gap_bases(f.range, Mat::Identity(2, 2)) < 1e-14);
}

TEST_CASE("rank_factor zero 2x3") {
  auto f = rank_factor(Mat::Zero(2, 3));
  CHECK(f.rank == 0);
  CHECK(f.nullspace.cols() == 3);
  CHECK(subspace_gap_bases(f.nullspace, Mat::Identity(3, 3)) < 1e-14);
}

TEST_CASE("rank_factor rank-one matrix") {
  // Singular values of [[1,1],[1,1]] are {2, 0}; the null direction is
  // (1, -1)/sqrt(2).
  auto f = rank_factor(real2({{1, 1}, {1, 1}}));
  CHECK(f.rank == 1);
  REQUIRE(f.nullspace.cols() == 1);
  Vec expected(2);
  expected << Complex(1, 0), Complex(-1, 0);
  expected /= std::sqrt(2.0);
  CHECK(std::abs(std::abs((expected.adjoint() * f.nullspace.col(0))(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(f.singular_values(0) - 2.0) < 1e-12);
}

TEST_CASE("rank_factor rejects non-finite input") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(rank_factor(a), Error);
}

TEST_CASE("rank_factor range is orthogonal to conullspace") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Mat a = testing::random_matrix(rng, 5, 3, Field::Complex);
    auto f = rank_factor(a);
    if (f.range.cols() > 0 && f.conullspace.cols() > 0) {
      CHECK((f.conullspace.adjoint() * f.range).norm() < 1e-12);
    }
    CHECK((a * f.nullspace).norm() < 1e-12);
  }
}

TEST_CASE("pseudo_inverse identity and diagonal") {
  CHECK((pseudo_inverse(Mat::Identity(3, 3)) - Mat::Identity(3, 3)).norm() < 1e-14);
  Mat d = real2({{2, 0}, {0, 0}});
  Mat expected = real2({{0.5, 0}, {0, 0}});
  CHECK((pseudo_inverse(d) - expected).norm() < 1e-14);
}

TEST_CASE("pseudo_inverse of a column vector") {
  // Normal equations: pinv([1;1]) = (A*A)^{-1} A* = [0.5, 0.5].
  Mat a = real2({{1}, {1}});
  Mat expected = real2({{0.5, 0.5}});
  CHECK((pseudo_inverse(a) - expected).norm() < 1e-14);
}

TEST_CASE("pseudo_inverse satisfies the Moore-Penrose identities") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 2 + static_cast<Index>(rng() % 4);
    const Index cols = 2 + static_cast<Index>(rng() % 4);
    Mat a = testing::random_matrix(rng, rows, cols, trial % 2 ? Field::Complex : Field::Real);
    Mat p = pseudo_inverse(a);
    CHECK((a * p * a - a).norm() < 1e-10);
    CHECK((p * a * p - p).norm() < 1e-10);
    CHECK(((a * p) - (a * p).adjoint()).norm() < 1e-10);
    CHECK(((p * a) - (p * a).adjoint()).norm() < 1e-10);
    // p*a is the orthogonal projector onto ran a*.
    Mat corange = rank_factor(a).corange;
    CHECK((p * a - corange * corange.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("subspace gap of identical and orthogonal spans") {
  Mat e1 = real2({{1}, {0}});
  Mat e2 = real2({{0}, {1}});
  CHECK(subspace_gap_bases(e1, e1) < 1e-15);
  CHECK(std::abs(subspace_gap_bases(e1, e2) - 1.0) < 1e-14);
}

TEST_CASE("psd_sqrt squares back after clipping") {
  Rng rng(3);
  Mat a = testing::random_matrix(rng, 4, 4, Field::Real);
  Mat w = a * a.adjoint();
  Mat s = psd_sqrt(w);
  CHECK((s * s - w).norm() < 1e-10);
  CHECK(min_hermitian_eigenvalue(s) > -1e-12);
}

TEST_CASE("central differences are second order on smooth data") {
  const Index k = 21;
  const double h = 0.05;
  Mat samples(k, 1);
  for (Index i = 0; i < k; ++i) samples(i, 0) = std::sin(h * static_cast<double>(i));
  Mat d = central_difference(samples, h);
  double worst = 0.0;
  for (Index i = 0; i < k; ++i) {
    worst = std::max(worst, std::abs(d(i, 0).real() - std::cos(h * static_cast<double>(i))));
  }
  CHECK(worst < 0.5 * h * h);  // one-sided end stencils carry the h^2/3 term
}

TEST_CASE("trapezoid accumulates an antiderivative") {
  const Index k = 101;
  const double h = 0.01;
  Mat samples(k, 1);
  for (Index i = 0; i < k; ++i) samples(i, 0) = std::cos(h * static_cast<double>(i));
  Mat integral = trapezoid_cumulative(samples, h);
  CHECK(std::abs(integral(k - 1, 0).real() - std::sin(1.0)) < 1e-4);
}
