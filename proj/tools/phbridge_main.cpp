// phbridge command-line interface.
//
// Subcommands: classify, convert, simulate, verify, roundtrip, transfer,
// extend. Every report is a single JSON document on stdout; diagnostics go to
// stderr. Exit codes: 0 success, 1 residual failure (verify/transfer),
// 2 parse/shape errors, 3 kernel overlap, 4 extension failures, 5 singular
// pencils or inconsistent constraints.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phbridge/io.hpp"

namespace {

using namespace phbridge;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::KernelOverlap:
      return 3;
    case ErrorCode::ExtensionFailed:
    case ErrorCode::NotMonotone:
    case ErrorCode::NotResistive:
    case ErrorCode::NotContraction:
    case ErrorCode::PartialDomain:
    case ErrorCode::NotMaximal:
    case ErrorCode::FlavorMismatch:
      return 4;
    case ErrorCode::IrregularPencil:
    case ErrorCode::InconsistentConstraints:
    case ErrorCode::SingularShift:
      return 5;
    case ErrorCode::NotMember:
    case ErrorCode::ResidualTooLarge:
    case ErrorCode::NoConsistentZ:
    case ErrorCode::InconsistentInitial:
      return 1;
    default:
      return 2;
  }
}

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

InputSignal parse_input_spec(const std::string& spec, Index m) {
  if (spec.empty() || spec == "zero") return ZeroInput{};
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "sin") {
    SinusoidInput sine;
    sine.amplitude = RealVec::Ones(m);
    sine.frequency = RealVec::Ones(m);
    sine.phase = RealVec::Zero(m);
    if (!args.empty()) {
      std::stringstream ss(args);
      std::string channel;
      Index i = 0;
      std::vector<std::vector<double>> channels;
      while (std::getline(ss, channel, ';')) channels.push_back(split_numbers(channel));
      for (; i < m; ++i) {
        const auto& params = channels[std::min<std::size_t>(i, channels.size() - 1)];
        if (!params.empty()) sine.amplitude(i) = params[0];
        if (params.size() > 1) sine.frequency(i) = params[1];
        if (params.size() > 2) sine.phase(i) = params[2];
      }
    }
    return sine;
  }
  if (name == "poly") {
    PolynomialInput poly;
    std::stringstream ss(args);
    std::string channel;
    std::vector<std::vector<double>> channels;
    while (std::getline(ss, channel, ';')) channels.push_back(split_numbers(channel));
    if (channels.empty()) fail(ErrorCode::ParseError, "poly input needs coefficients");
    for (Index i = 0; i < m; ++i) {
      const auto& coeffs = channels[std::min<std::size_t>(i, channels.size() - 1)];
      RealVec c(coeffs.size());
      for (std::size_t k = 0; k < coeffs.size(); ++k) c(k) = coeffs[k];
      poly.coefficients.push_back(std::move(c));
    }
    return poly;
  }
  if (name == "table") {
    const Trajectory table = std::get<Trajectory>(io::load_system(args));
    TableInput input;
    input.times = table.grid;
    input.values = table.channel(table.u, "u");
    return input;
  }
  fail(ErrorCode::ParseError, "unknown input spec \"" + spec + "\"");
}

json report_to_json(const StructureReport& report) {
  json j;
  j["is_lagrange"] = report.is_lagrange;
  j["is_dirac"] = report.is_dirac;
  j["is_resistive"] = report.is_resistive;
  j["is_max_resistive"] = report.is_max_resistive;
  j["is_monotone"] = report.is_monotone;
  j["is_max_monotone"] = report.is_max_monotone;
  j["witness"] = json{{"sym_defect", report.sym_defect},
                      {"skew_defect", report.skew_defect},
                      {"monotone_min_eig", report.monotone_min_eig},
                      {"resistive_max_eig", report.resistive_max_eig},
                      {"threshold", report.threshold}};
  return j;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PHBRIDGE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

struct GlobalOptions {
  double tol_rel = 1e-12;
  double tol_abs = 1e-14;
  std::uint64_t seed = default_seed();

  TolerancePolicy tol() const { return TolerancePolicy{tol_rel, tol_abs}; }
};

int cmd_classify(const GlobalOptions& opts, const std::string& file) {
  auto relation = std::get<LinearRelation>(io::load_system(file, opts.tol()));
  std::cout << report_to_json(relation.classify()).dump(2) << "\n";
  return 0;
}

int cmd_convert(const GlobalOptions& opts, const std::string& file, const std::string& to,
                const std::string& out_path) {
  auto system = io::load_system(file, opts.tol());
  json output;
  json sidecar;
  Field field = Field::Real;
  if (to == "descriptor") {
    const auto& geo = std::get<GeometricPH>(system);
    auto [desc, lift] = geometric_to_descriptor(geo);
    output = io::descriptor_to_json(desc);
    field = io::field_of(desc);
    sidecar = io::lift_to_json(lift, field);
    output["transform_meta"] = sidecar.at("dims");
  } else if (to == "geometric") {
    const auto& desc = std::get<DescriptorPH>(system);
    auto [geo, maps] = descriptor_to_geometric(desc, opts.tol());
    output = io::geometric_to_json(geo);
    field = io::field_of(desc);
    sidecar = io::geomaps_to_json(maps, field);
    output["transform_meta"] = sidecar.at("dims");
  } else {
    fail(ErrorCode::ParseError, "--to must be descriptor or geometric");
  }
  if (!out_path.empty()) {
    io::write_json_file(out_path, output);
    io::write_json_file(out_path + ".maps.json", sidecar);
  }
  std::cout << output.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const GlobalOptions& opts, const std::string& file, double t_end, double h,
                 const std::string& input_spec, const std::string& out_path) {
  auto system = io::load_system(file, opts.tol());
  json meta;
  DescriptorPH desc = [&]() {
    if (std::holds_alternative<DescriptorPH>(system)) {
      meta["converted_from"] = nullptr;
      return std::get<DescriptorPH>(system);
    }
    const auto& geo = std::get<GeometricPH>(system);
    auto [converted, lift] = geometric_to_descriptor(geo);
    meta["converted_from"] = "geometric";
    meta["lift_dims"] = json{{"n", lift.n}, {"r", lift.r}, {"m", lift.m},
                             {"d", lift.d}, {"k", lift.k}, {"l", lift.l},
                             {"p", lift.p()}, {"state_dim", lift.state_dim()}};
    return converted;
  }();

  SimConfig cfg;
  cfg.t_end = t_end;
  cfg.h = h;
  cfg.seed = opts.seed;
  cfg.input = parse_input_spec(input_spec, desc.m);

  const Vec u0 = eval_input(cfg.input, 0.0, desc.m);
  const Vec z0 = consistent_init(desc, u0, Vec::Zero(desc.n), opts.tol());
  Trajectory traj = integrate_implicit_euler(desc, cfg, z0, opts.tol());
  auto verification = verify_descriptor_solution(desc, traj);

  if (!out_path.empty()) {
    io::write_json_file(out_path, io::trajectory_to_json(traj, io::field_of(traj)));
  }
  json summary;
  summary["samples"] = traj.samples();
  summary["h"] = traj.step();
  summary["final_H"] = hamiltonian(desc, traj.z->row(traj.samples() - 1).transpose());
  summary["max_power_residual"] = verification.max_power;
  summary["max_membership_residual"] = verification.max_membership;
  summary["max_difference_defect"] = verification.max_difference;
  summary["meta"] = meta;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_verify(const GlobalOptions& opts, const std::string& system_file,
               const std::string& traj_file) {
  auto system = io::load_system(system_file, opts.tol());
  auto traj = std::get<Trajectory>(io::load_system(traj_file, opts.tol()));
  const double h = traj.step();
  json report;
  double max_membership = 0.0;
  double max_power = 0.0;
  double scale = 1.0;
  auto track_scale = [&](const std::optional<Mat>& c) {
    if (c.has_value() && c->size() > 0) scale = std::max(scale, c->cwiseAbs().maxCoeff());
  };
  track_scale(traj.z);
  track_scale(traj.x);
  track_scale(traj.u);
  track_scale(traj.y);

  auto window_table = [](const RealVec& values) {
    // Compact per-window maxima (10 windows) for the report.
    json table = json::array();
    if (values.size() == 0) return table;
    const Index windows = std::min<Index>(10, values.size());
    const Index width = (values.size() + windows - 1) / windows;
    for (Index start = 0; start < values.size(); start += width) {
      const Index len = std::min(width, values.size() - start);
      table.push_back(values.segment(start, len).maxCoeff());
    }
    return table;
  };

  if (std::holds_alternative<DescriptorPH>(system)) {
    auto v = verify_descriptor_solution(std::get<DescriptorPH>(system), traj);
    max_membership = std::max(v.max_membership, v.max_difference);
    max_power = v.max_power;
    report["kind"] = "descriptor";
    report["max_membership_residual"] = v.max_membership;
    report["max_difference_defect"] = v.max_difference;
    report["max_power_residual"] = v.max_power;
    report["worst_sample"] = v.worst_sample;
    report["membership_windows"] = window_table(v.algebraic_defect.cwiseMax(v.output_defect));
    report["power_windows"] = window_table(v.power_residual);
  } else if (std::holds_alternative<GeometricPH>(system)) {
    auto v = verify_geometric_solution(std::get<GeometricPH>(system), traj);
    max_membership = v.max_membership;
    max_power = v.max_power;
    report["kind"] = "geometric";
    report["max_membership_residual"] = v.max_membership;
    report["max_power_residual"] = v.max_power;
    report["max_dissipation"] = v.max_dissipation;
    report["worst_sample"] = v.worst_sample;
    report["membership_windows"] = window_table(
        v.dirac_residual.cwiseMax(v.lagrange_residual).cwiseMax(v.resistive_residual));
    report["power_windows"] = window_table(v.power_residual);
  } else {
    fail(ErrorCode::ParseError, "verify needs a geometric or descriptor system file");
  }

  // Residual acceptance scales with the grid step (first-order trajectories).
  const double threshold = std::max(1e-8, 10.0 * h * scale);
  const bool pass = max_membership <= threshold && max_power <= threshold;
  report["threshold"] = threshold;
  report["pass"] = pass;
  std::cout << report.dump(2) << "\n";
  return pass ? 0 : 1;
}

int cmd_roundtrip(const GlobalOptions& opts, const std::string& file, const std::string& out_path) {
  auto desc = std::get<DescriptorPH>(io::load_system(file, opts.tol()));
  auto result = roundtrip_q_identity(desc, opts.tol());
  const bool q_identity = result.system.Q.isIdentity(0.0);
  json report;
  report["q_is_identity"] = q_identity;
  report["original_state_dim"] = desc.n;
  report["roundtrip_state_dim"] = result.system.n;
  report["lift_dims"] = io::lift_to_json(result.lift, Field::Real).at("dims");
  report["validate_pass"] = validate_descriptor(result.system, opts.tol()).pass;
  if (!out_path.empty()) {
    io::write_json_file(out_path, io::descriptor_to_json(result.system));
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_transfer(const GlobalOptions& opts, const std::string& file, int samples) {
  auto desc = std::get<DescriptorPH>(io::load_system(file, opts.tol()));
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> re(0.2, 3.0);
  std::uniform_real_distribution<double> im(-3.0, 3.0);
  std::vector<Complex> points;
  points.reserve(samples);
  for (int i = 0; i < samples; ++i) points.emplace_back(re(rng), im(rng));
  auto report = transfer_positive_real(desc, points, opts.tol());
  json j;
  j["samples"] = samples;
  j["overall_min_eig"] = report.overall_min;
  j["pass"] = report.pass;
  std::cout << j.dump(2) << "\n";
  return report.pass ? 0 : 1;
}

int cmd_extend(const GlobalOptions& opts, const std::string& file, const std::string& flavor) {
  auto relation = std::get<LinearRelation>(io::load_system(file, opts.tol()));
  LinearRelation extended = [&]() {
    if (flavor == "monotone") return extend_maximal_monotone(relation);
    if (flavor == "resistive") return extend_maximal_resistive(relation);
    auto report = relation.classify();
    if (report.is_resistive) return extend_maximal_resistive(relation);
    if (report.is_monotone) return extend_maximal_monotone(relation);
    fail(ErrorCode::ExtensionFailed, "relation is neither monotone nor resistive");
  }();
  std::cout << io::relation_to_json(extended).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear port-Hamiltonian systems: relation calculus, descriptor/geometric "
               "transformations and desk-scale simulation"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--tol-rel", opts.tol_rel, "relative rank threshold");
  app.add_option("--tol-abs", opts.tol_abs, "absolute singular-value floor");
  app.add_option("--seed", opts.seed, "RNG seed (default: PHBRIDGE_SEED or 0)");
  app.fallthrough();  // global flags may follow the subcommand

  std::string file, traj_file, out_path, to, input_spec = "zero", flavor = "auto";
  double t_end = 1.0, h = 1e-3;
  int samples = 100;

  auto* classify = app.add_subcommand("classify", "classify a relation file");
  classify->add_option("file", file)->required();

  auto* convert = app.add_subcommand("convert", "convert between formulations");
  convert->add_option("file", file)->required();
  convert->add_option("--to", to, "descriptor or geometric")->required();
  convert->add_option("--out", out_path, "write the system here (plus <out>.maps.json)");

  auto* simulate = app.add_subcommand("simulate", "integrate a descriptor system");
  simulate->set_help_flag("--help", "print help");  // frees -h for the step size
  simulate->add_option("file", file)->required();
  simulate->add_option("--t-end", t_end);
  simulate->add_option("--h", h);
  simulate->add_option("--input", input_spec, "zero | sin[:a,f[,phi];...] | poly:c0,c1,..;.. | table:file");
  simulate->add_option("--out", out_path, "trajectory output path");

  auto* verify = app.add_subcommand("verify", "verify a trajectory against a system");
  verify->add_option("system", file)->required();
  verify->add_option("trajectory", traj_file)->required();

  auto* roundtrip = app.add_subcommand("roundtrip", "descriptor -> geometric -> descriptor");
  roundtrip->add_option("file", file)->required();
  roundtrip->add_option("--out", out_path, "write the roundtripped system here");

  auto* transfer = app.add_subcommand("transfer", "positive-real sampling of the transfer function");
  transfer->add_option("file", file)->required();
  transfer->add_option("--samples", samples);

  auto* extend = app.add_subcommand("extend", "maximal extension of a relation");
  extend->add_option("file", file)->required();
  extend->add_option("--flavor", flavor, "auto | monotone | resistive");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(opts, file);
    if (convert->parsed()) return cmd_convert(opts, file, to, out_path);
    if (simulate->parsed()) return cmd_simulate(opts, file, t_end, h, input_spec, out_path);
    if (verify->parsed()) return cmd_verify(opts, file, traj_file);
    if (roundtrip->parsed()) return cmd_roundtrip(opts, file, out_path);
    if (transfer->parsed()) return cmd_transfer(opts, file, samples);
    if (extend->parsed()) return cmd_extend(opts, file, flavor);
  } catch (const phbridge::Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::bad_variant_access&) {
    std::cerr << "ParseError: file kind does not match the command\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
