#include "phbridge/io.hpp"

#include <fstream>

namespace phbridge::io {

namespace {

Field parse_field(const json& j) {
  const std::string field = j.at("field").get<std::string>();
  if (field == "real") return Field::Real;
  if (field == "complex") return Field::Complex;
  fail(ErrorCode::ParseError, "field must be \"real\" or \"complex\"");
}

const char* field_name(Field field) { return field == Field::Real ? "real" : "complex"; }

void check_header(const json& j, const char* kind) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "system file must be a JSON object");
  if (j.value("format_version", 0) != 1) fail(ErrorCode::ParseError, "format_version must be 1");
  if (j.at("kind").get<std::string>() != kind) {
    fail(ErrorCode::ParseError, std::string("expected kind \"") + kind + "\"");
  }
}

json header(Field field, const char* kind) {
  json j;
  j["format_version"] = 1;
  j["field"] = field_name(field);
  j["kind"] = kind;
  return j;
}

}  // namespace

json matrix_to_json(const Mat& a, Field field) {
  json data = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index c = 0; c < a.cols(); ++c) {
      const Complex v = a(i, c);
      if (field == Field::Real) {
        if (v.imag() != 0.0) {
          fail(ErrorCode::InvalidMatrix, "complex entry cannot be stored in a real file");
        }
        data.push_back(v.real());
      } else {
        data.push_back(json::array({v.real(), v.imag()}));
      }
    }
  }
  json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  j["data"] = std::move(data);
  return j;
}

Mat matrix_from_json(const json& j, Field field) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    fail(ErrorCode::ParseError, "matrix needs rows, cols and data");
  }
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      static_cast<Index>(data.size()) != rows * cols) {
    fail(ErrorCode::ParseError, "matrix data length does not match rows * cols");
  }
  Mat a(rows, cols);
  Index idx = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c, ++idx) {
      const json& entry = data[idx];
      if (entry.is_number()) {
        a(i, c) = Complex(entry.get<double>(), 0.0);
      } else if (entry.is_array() && entry.size() == 2) {
        if (field == Field::Real) {
          fail(ErrorCode::ParseError, "real files forbid the [re, im] pair form");
        }
        a(i, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
      } else {
        fail(ErrorCode::ParseError, "matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  require_finite(a, "parsed matrix");
  return a;
}

json relation_to_json(const LinearRelation& relation) {
  json j = header(relation.field(), "relation");
  j["n_left"] = relation.n_left();
  j["n_right"] = relation.n_right();
  j["representation"] = "image";
  j["matrix"] = matrix_to_json(relation.image_basis(), relation.field());
  return j;
}

LinearRelation relation_from_json(const json& j, const TolerancePolicy& tol) {
  check_header(j, "relation");
  const Field field = parse_field(j);
  const Index n_left = j.at("n_left").get<Index>();
  const Index n_right = j.at("n_right").get<Index>();
  const std::string rep = j.at("representation").get<std::string>();
  const Mat matrix = matrix_from_json(j.at("matrix"), field);
  if (rep == "image") return LinearRelation::from_image(matrix, n_left, n_right, tol);
  if (rep == "kernel") return LinearRelation::from_kernel(matrix, n_left, n_right, tol);
  fail(ErrorCode::ParseError, "representation must be \"image\" or \"kernel\"");
}

namespace {

json relation_block(const LinearRelation& relation, Field field) {
  json j;
  j["representation"] = "image";
  j["matrix"] = matrix_to_json(relation.image_basis(), field);
  return j;
}

LinearRelation relation_block_from_json(const json& j, Field field, Index n_left, Index n_right,
                                        const TolerancePolicy& tol) {
  const std::string rep = j.at("representation").get<std::string>();
  const Mat matrix = matrix_from_json(j.at("matrix"), field);
  if (rep == "image") return LinearRelation::from_image(matrix, n_left, n_right, tol);
  if (rep == "kernel") return LinearRelation::from_kernel(matrix, n_left, n_right, tol);
  fail(ErrorCode::ParseError, "representation must be \"image\" or \"kernel\"");
}

}  // namespace

json geometric_to_json(const GeometricPH& sys) {
  const Field field = sys.dirac.field() == Field::Real && sys.lagrange.field() == Field::Real &&
                              sys.resistive.field() == Field::Real
                          ? Field::Real
                          : Field::Complex;
  json j = header(field, "geometric");
  j["dims"] = json{{"n", sys.n}, {"r", sys.r}, {"m", sys.m}};
  j["dirac"] = relation_block(sys.dirac, field);
  j["lagrange"] = relation_block(sys.lagrange, field);
  j["resistive"] = relation_block(sys.resistive, field);
  return j;
}

GeometricPH geometric_from_json(const json& j, const TolerancePolicy& tol) {
  check_header(j, "geometric");
  const Field field = parse_field(j);
  const json& dims = j.at("dims");
  const Index n = dims.at("n").get<Index>();
  const Index r = dims.at("r").get<Index>();
  const Index m = dims.at("m").get<Index>();
  const Index flow = n + r + m;
  return GeometricPH(n, r, m,
                     relation_block_from_json(j.at("dirac"), field, flow, flow, tol),
                     relation_block_from_json(j.at("lagrange"), field, n, n, tol),
                     relation_block_from_json(j.at("resistive"), field, r, r, tol));
}

Field field_of(const DescriptorPH& sys) {
  const bool real = is_real(sys.E) && is_real(sys.J) && is_real(sys.R) && is_real(sys.Q) &&
                    is_real(sys.B) && is_real(sys.P) && is_real(sys.S) && is_real(sys.N);
  return real ? Field::Real : Field::Complex;
}

json descriptor_to_json(const DescriptorPH& sys) {
  const Field field = field_of(sys);
  json j = header(field, "descriptor");
  j["n"] = sys.n;
  j["m"] = sys.m;
  j["E"] = matrix_to_json(sys.E, field);
  j["J"] = matrix_to_json(sys.J, field);
  j["R"] = matrix_to_json(sys.R, field);
  j["Q"] = matrix_to_json(sys.Q, field);
  j["B"] = matrix_to_json(sys.B, field);
  j["P"] = matrix_to_json(sys.P, field);
  j["S"] = matrix_to_json(sys.S, field);
  j["N"] = matrix_to_json(sys.N, field);
  return j;
}

DescriptorPH descriptor_from_json(const json& j) {
  check_header(j, "descriptor");
  const Field field = parse_field(j);
  const Index n = j.at("n").get<Index>();
  const Index m = j.at("m").get<Index>();
  DescriptorPH sys = DescriptorPH::make(
      matrix_from_json(j.at("E"), field), matrix_from_json(j.at("J"), field),
      matrix_from_json(j.at("R"), field), matrix_from_json(j.at("Q"), field),
      matrix_from_json(j.at("B"), field), matrix_from_json(j.at("P"), field),
      matrix_from_json(j.at("S"), field), matrix_from_json(j.at("N"), field));
  if (sys.n != n || sys.m != m) fail(ErrorCode::ParseError, "declared n, m disagree with matrix shapes");
  return sys;
}

Field field_of(const Trajectory& traj) {
  auto real = [](const std::optional<Mat>& c) { return !c.has_value() || is_real(*c); };
  return real(traj.u) && real(traj.y) && real(traj.z) && real(traj.x) && real(traj.xdot) &&
                 real(traj.f_R) && real(traj.e_R) && real(traj.e_L) && real(traj.lambda) &&
                 real(traj.lambda_R) && real(traj.mu_L)
             ? Field::Real
             : Field::Complex;
}

json trajectory_to_json(const Trajectory& traj, Field field) {
  json j = header(field, "trajectory");
  json grid = json::array();
  for (Index i = 0; i < traj.grid.size(); ++i) grid.push_back(traj.grid(i));
  j["grid"] = std::move(grid);
  json channels;
  auto put = [&](const char* name, const std::optional<Mat>& c) {
    if (c.has_value()) channels[name] = matrix_to_json(*c, field);
  };
  put("u", traj.u);
  put("y", traj.y);
  put("z", traj.z);
  put("x", traj.x);
  put("xdot", traj.xdot);
  put("f_R", traj.f_R);
  put("e_R", traj.e_R);
  put("e_L", traj.e_L);
  put("lambda", traj.lambda);
  put("lambda_R", traj.lambda_R);
  put("mu_L", traj.mu_L);
  j["channels"] = std::move(channels);
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  check_header(j, "trajectory");
  const Field field = parse_field(j);
  Trajectory traj;
  const json& grid = j.at("grid");
  if (!grid.is_array() || grid.size() < 2) {
    fail(ErrorCode::ShapeError, "trajectory grid needs at least two samples");
  }
  traj.grid.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) traj.grid(i) = grid[i].get<double>();
  const json& channels = j.at("channels");
  auto get = [&](const char* name, std::optional<Mat>& c) {
    if (channels.contains(name)) c = matrix_from_json(channels.at(name), field);
  };
  get("u", traj.u);
  get("y", traj.y);
  get("z", traj.z);
  get("x", traj.x);
  get("xdot", traj.xdot);
  get("f_R", traj.f_R);
  get("e_R", traj.e_R);
  get("e_L", traj.e_L);
  get("lambda", traj.lambda);
  get("lambda_R", traj.lambda_R);
  get("mu_L", traj.mu_L);
  return traj;
}

json lift_to_json(const LiftData& lift, Field field) {
  json j;
  j["dims"] = json{{"n", lift.n}, {"r", lift.r},         {"m", lift.m},
                   {"d", lift.d}, {"k", lift.k},         {"l", lift.l},
                   {"p", lift.p()}, {"state_dim", lift.state_dim()}};
  j["Jt"] = matrix_to_json(lift.Jt, field);
  j["G"] = matrix_to_json(lift.G, field);
  j["R_tilde"] = matrix_to_json(lift.R_tilde, field);
  j["G_R"] = matrix_to_json(lift.G_R, field);
  j["L"] = matrix_to_json(lift.L_mat, field);
  j["G_L"] = matrix_to_json(lift.G_L, field);
  return j;
}

json geomaps_to_json(const GeoMaps& maps, Field field) {
  json j;
  j["dims"] = json{{"n", maps.n}, {"m", maps.m}, {"r", maps.r()}};
  j["Gamma"] = matrix_to_json(maps.Gamma, field);
  j["U"] = matrix_to_json(maps.U, field);
  j["D_tilde"] = matrix_to_json(maps.D_tilde, field);
  j["W"] = matrix_to_json(maps.W, field);
  return j;
}

SystemFile parse_system(const json& j, const TolerancePolicy& tol) {
  if (!j.is_object() || !j.contains("kind")) {
    fail(ErrorCode::ParseError, "system file needs a kind header");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "relation") return relation_from_json(j, tol);
  if (kind == "geometric") return geometric_from_json(j, tol);
  if (kind == "descriptor") return descriptor_from_json(j);
  if (kind == "trajectory") return trajectory_from_json(j);
  fail(ErrorCode::ParseError, "unknown kind \"" + kind + "\"");
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

SystemFile load_system(const std::string& path, const TolerancePolicy& tol) {
  return parse_system(parse_json_file(path), tol);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace phbridge::io
