#include <catch2/catch_amalgamated.hpp>

#include "support/generators.hpp"

#include "phbridge/io.hpp"

using namespace phbridge;
using phbridge::testing::Rng;
using nlohmann::json;

TEST_CASE("descriptor files round trip bit-exactly") {
  Rng rng(107);
  for (int trial = 0; trial < 10; ++trial) {
    auto sys = testing::random_descriptor(rng, 3, 2, 1, trial % 2 ? Field::Complex : Field::Real);
    json j = io::descriptor_to_json(sys);
    auto parsed = io::descriptor_from_json(j);
    CHECK(parsed.E == sys.E);
    CHECK(parsed.J == sys.J);
    CHECK(parsed.R == sys.R);
    CHECK(parsed.Q == sys.Q);
    CHECK(parsed.B == sys.B);
    CHECK(parsed.P == sys.P);
    CHECK(parsed.S == sys.S);
    CHECK(parsed.N == sys.N);
    CHECK(io::descriptor_to_json(parsed).dump() == j.dump());
  }
}

TEST_CASE("relation files reproduce the stored representation") {
  Rng rng(109);
  for (int trial = 0; trial < 10; ++trial) {
    auto rel = testing::random_relation(rng, 2, 3, 2, trial % 2 ? Field::Complex : Field::Real);
    json j = io::relation_to_json(rel);
    auto parsed = io::relation_from_json(j);
    CHECK(parsed.image_basis() == rel.image_basis());
    CHECK(gap(parsed, rel) < 1e-13);
    CHECK(io::relation_to_json(parsed).dump() == j.dump());
  }
}

TEST_CASE("geometric files round trip") {
  Rng rng(113);
  testing::GeometricSpec spec;
  auto sys = testing::random_geometric(rng, spec, Field::Real);
  json j = io::geometric_to_json(sys);
  auto parsed = io::geometric_from_json(j);
  CHECK(parsed.n == sys.n);
  CHECK(gap(parsed.dirac, sys.dirac) < 1e-13);
  CHECK(gap(parsed.lagrange, sys.lagrange) < 1e-13);
  CHECK(gap(parsed.resistive, sys.resistive) < 1e-13);
  CHECK(io::geometric_to_json(parsed).dump() == j.dump());
}

TEST_CASE("trajectory files round trip bit-exactly") {
  Trajectory traj;
  traj.grid = RealVec::LinSpaced(5, 0.0, 0.4);
  Mat z(5, 2);
  z.setRandom();
  traj.z = z;
  traj.u = Mat::Ones(5, 1);
  traj.y = Mat::Zero(5, 1);
  json j = io::trajectory_to_json(traj, io::field_of(traj));
  auto parsed = io::trajectory_from_json(j);
  CHECK(parsed.grid == traj.grid);
  CHECK(*parsed.z == *traj.z);
  CHECK(*parsed.u == *traj.u);
  CHECK_FALSE(parsed.x.has_value());
  CHECK(io::trajectory_to_json(parsed, io::field_of(parsed)).dump() == j.dump());
}

TEST_CASE("real files forbid the pair form") {
  json j;
  j["format_version"] = 1;
  j["field"] = "real";
  j["kind"] = "relation";
  j["n_left"] = 1;
  j["n_right"] = 1;
  j["representation"] = "image";
  j["matrix"] = json{{"rows", 2}, {"cols", 1}, {"data", json::array({1.0, json::array({0.0, 1.0})})}};
  CHECK_THROWS_AS(io::relation_from_json(j), Error);
}

TEST_CASE("malformed documents are rejected") {
  json j;
  j["format_version"] = 2;
  CHECK_THROWS_AS(io::parse_system(j), Error);

  json wrong_kind;
  wrong_kind["format_version"] = 1;
  wrong_kind["field"] = "real";
  wrong_kind["kind"] = "mystery";
  CHECK_THROWS_AS(io::parse_system(wrong_kind), Error);

  json bad_matrix;
  bad_matrix["format_version"] = 1;
  bad_matrix["field"] = "real";
  bad_matrix["kind"] = "relation";
  bad_matrix["n_left"] = 1;
  bad_matrix["n_right"] = 1;
  bad_matrix["representation"] = "image";
  bad_matrix["matrix"] = json{{"rows", 2}, {"cols", 2}, {"data", json::array({1.0})}};
  CHECK_THROWS_AS(io::parse_system(bad_matrix), Error);
}

TEST_CASE("complex data cannot be forced into a real file") {
  Mat a(1, 1);
  a(0, 0) = Complex(1.0, 0.5);
  CHECK_THROWS_AS(io::matrix_to_json(a, Field::Real), Error);
}
