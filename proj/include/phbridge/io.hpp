#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "phbridge/sim.hpp"

namespace phbridge::io {

using nlohmann::json;

// JSON system files. Every file carries
//   {"format_version": 1, "field": "real"|"complex", "kind": ...}
// and matrices as {"rows", "cols", "data"} with row-major entries. Real files
// store plain numbers and reject the pair form; complex files store [re, im]
// pairs. nlohmann emits shortest round-trip decimals, so parse(print(x))
// restores every double bit-exactly.

json matrix_to_json(const Mat& a, Field field);
Mat matrix_from_json(const json& j, Field field);

json relation_to_json(const LinearRelation& relation);
LinearRelation relation_from_json(const json& j, const TolerancePolicy& tol = {});

json geometric_to_json(const GeometricPH& sys);
GeometricPH geometric_from_json(const json& j, const TolerancePolicy& tol = {});

json descriptor_to_json(const DescriptorPH& sys);
DescriptorPH descriptor_from_json(const json& j);

json trajectory_to_json(const Trajectory& traj, Field field);
Trajectory trajectory_from_json(const json& j);

json lift_to_json(const LiftData& lift, Field field);
json geomaps_to_json(const GeoMaps& maps, Field field);

using SystemFile = std::variant<LinearRelation, GeometricPH, DescriptorPH, Trajectory>;

/// Parse any system file; dispatches on the "kind" header.
SystemFile parse_system(const json& j, const TolerancePolicy& tol = {});
SystemFile load_system(const std::string& path, const TolerancePolicy& tol = {});

json parse_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Field tag used when serializing (Real iff all stored data is real).
Field field_of(const Trajectory& traj);
Field field_of(const DescriptorPH& sys);

}  // namespace phbridge::io
