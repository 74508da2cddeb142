#include "ipdyn/model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"

namespace ipdyn {

namespace {

using nlohmann::json;

constexpr double kAxisTol = 1e-12;
constexpr double kSymTol = 1e-12;

void check_finite(const double* data, int count, const std::string& path) {
  for (int i = 0; i < count; ++i) {
    if (!std::isfinite(data[i])) throw ValidationError(path, "non-finite value");
  }
}

void validate_inertia(const SpatialInertiaParams& p, const std::string& path) {
  if (!(p.mass >= 0.0) || !std::isfinite(p.mass)) {
    throw ValidationError(path + ".mass", "mass must be finite and >= 0");
  }
  check_finite(p.com_offset.data(), 3, path + ".com");
  check_finite(p.inertia_about_com.data(), 9, path + ".inertia_matrix");
  const Mat3& ic = p.inertia_about_com;
  if ((ic - ic.transpose()).cwiseAbs().maxCoeff() > kSymTol) {
    throw ValidationError(path + ".inertia_matrix", "inertia tensor not symmetric");
  }
  if (p.mass == 0.0) {
    if (ic.cwiseAbs().maxCoeff() != 0.0) {
      throw ValidationError(path + ".inertia_matrix",
                            "massless body must have zero inertia tensor");
    }
    return;
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(ic);
  const Vec3 lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -1e-12 * scale) {
    throw ValidationError(path + ".inertia_matrix", "inertia tensor not positive semidefinite");
  }
  // Principal-moment triangle inequalities, with slack for rounding.
  for (int i = 0; i < 3; ++i) {
    const double others = lam.sum() - lam(i);
    if (lam(i) > others + 1e-9 * scale) {
      throw ValidationError(path + ".inertia_matrix",
                            "principal moments violate the triangle inequality");
    }
  }
}

void validate_joint(const JointSpec& j, int n_coords, const std::string& path) {
  if (std::abs(j.axis.norm() - 1.0) > kAxisTol) {
    throw ValidationError(path + ".axis", "axis not unit length");
  }
  if (j.coordinate < 0 || j.coordinate >= n_coords) {
    throw ValidationError(path + ".coordinate", "coordinate index out of range");
  }
  if (j.kind == JointKind::CoupledRevolute) {
    if (!j.coupling) {
      throw ValidationError(path + ".coupling", "coupled-revolute joint requires a coupling");
    }
    if (!(j.coupling->l0 > 0.0) || !(j.coupling->L0 > 0.0)) {
      throw ValidationError(path + ".coupling", "coupling lengths must be positive");
    }
  } else if (j.coupling) {
    throw ValidationError(path + ".coupling", "coupling only allowed on coupled-revolute joints");
  }
}

}  // namespace

CouplingValue coupling_eval(const CouplingFunction& c, double delta, double eps) {
  const double u = (delta + c.l0) * (delta + c.l0) / (2.0 * c.L0 * c.L0) - 1.0;
  if (!(u >= -1.0 + eps && u <= 1.0 - eps)) {
    throw CouplingSingularityError(delta, c.feasible_lo(), c.feasible_hi());
  }
  CouplingValue v;
  const double w = delta + c.l0;
  const double ll = c.L0 * c.L0;
  const double s = 1.0 - u * u;
  v.angle = -std::acos(u);
  v.dangle_ddelta = w / (ll * std::sqrt(s));
  v.d2angle_ddelta2 = (s + u * w * w / ll) / (ll * s * std::sqrt(s));
  return v;
}

int ModelGraph::coordinate_index(const std::string& name) const {
  for (int i = 0; i < coordinate_count(); ++i) {
    if (coordinates[i].name == name) return i;
  }
  throw ValidationError("coordinates", "unknown coordinate: " + name);
}

std::pair<double, double> ModelGraph::coordinate_interval(int j) const {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& b : bodies) {
    if (b.joint.coordinate == j && b.joint.coupling) {
      lo = std::max(lo, b.joint.coupling->feasible_lo());
      hi = std::min(hi, b.joint.coupling->feasible_hi());
    }
  }
  return {lo, hi};
}

void validate_model(const ModelGraph& m) {
  if (m.bodies.empty()) throw ValidationError("bodies", "model has no bodies");
  if (m.coordinates.empty()) throw ValidationError("coordinates", "model has no coordinates");
  check_finite(m.gravity.data(), 3, "gravity");

  std::set<std::string> body_names;
  std::vector<int> drives(m.coordinate_count(), 0);
  for (int i = 0; i < m.body_count(); ++i) {
    const BodyModule& b = m.bodies[i];
    const std::string path = "bodies[" + std::to_string(i) + "]";
    if (b.name.empty()) throw ValidationError(path + ".name", "empty body name");
    if (!body_names.insert(b.name).second) {
      throw ValidationError(path + ".name", "duplicate body name: " + b.name);
    }
    if (b.parent >= i) {
      throw ValidationError(path + ".parent", "parent must precede the body (topological order)");
    }
    if (b.parent < -1) throw ValidationError(path + ".parent", "invalid parent index");
    if (!is_rotation(b.attachment.rotation, 1e-8)) {
      throw ValidationError(path + ".attachment_transform.rotation", "not a rotation matrix");
    }
    check_finite(b.attachment.translation.data(), 3, path + ".attachment_transform.translation");
    validate_joint(b.joint, m.coordinate_count(), path + ".joint");
    validate_inertia(b.inertia, path + ".inertia");
    for (const auto& [fname, ft] : b.frames) {
      if (fname.empty()) throw ValidationError(path + ".frames", "empty frame name");
      if (body_names.count(fname)) {
        throw ValidationError(path + ".frames." + fname, "frame name collides with a body name");
      }
      if (!is_rotation(ft.rotation, 1e-8)) {
        throw ValidationError(path + ".frames." + fname + ".rotation", "not a rotation matrix");
      }
      check_finite(ft.translation.data(), 3, path + ".frames." + fname + ".translation");
    }
    drives[b.joint.coordinate]++;
  }
  // Frame names must also be unique across the whole model.
  std::set<std::string> frame_names;
  for (const auto& b : m.bodies) {
    for (const auto& [fname, ft] : b.frames) {
      if (!frame_names.insert(fname).second) {
        throw ValidationError("frames", "duplicate frame name: " + fname);
      }
    }
  }
  for (int j = 0; j < m.coordinate_count(); ++j) {
    if (drives[j] == 0) {
      throw ValidationError("coordinates[" + std::to_string(j) + "]",
                            "coordinate " + m.coordinates[j].name + " drives no joint");
    }
  }
}

namespace {

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "missing required field");
  return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) ok = true;
    }
    if (!ok) throw ValidationError(path + "." + it.key(), "unknown field");
  }
}

double parse_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  return v.get<double>();
}

Vec3 parse_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ValidationError(path, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) out(i) = parse_number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Mat3 parse_mat3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 9) {
    throw ValidationError(path, "expected a row-major array of 9 numbers");
  }
  Mat3 out;
  for (int i = 0; i < 9; ++i) {
    out(i / 3, i % 3) = parse_number(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

Transform parse_transform(const json& v, const std::string& path) {
  if (!v.is_object()) throw ValidationError(path, "expected an object");
  reject_unknown_keys(v, {"rotation", "translation"}, path);
  Transform t;
  t.rotation = parse_mat3(require_key(v, "rotation", path), path + ".rotation");
  t.translation = parse_vec3(require_key(v, "translation", path), path + ".translation");
  return t;
}

json dump_vec3(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

json dump_mat3(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

json dump_transform(const Transform& t) {
  return json{{"rotation", dump_mat3(t.rotation)}, {"translation", dump_vec3(t.translation)}};
}

}  // namespace

ModelGraph load_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "top level must be an object");
  reject_unknown_keys(doc, {"gravity", "coordinates", "bodies"}, "");

  ModelGraph m;
  m.gravity = parse_vec3(require_key(doc, "gravity", ""), "gravity");

  const json& coords = require_key(doc, "coordinates", "");
  if (!coords.is_array()) throw ValidationError("coordinates", "expected an array");
  for (size_t i = 0; i < coords.size(); ++i) {
    const std::string path = "coordinates[" + std::to_string(i) + "]";
    const json& c = coords[i];
    if (!c.is_object()) throw ValidationError(path, "expected an object");
    reject_unknown_keys(c, {"name", "unit"}, path);
    CoordinateInfo info;
    info.name = require_key(c, "name", path).get<std::string>();
    info.unit = require_key(c, "unit", path).get<std::string>();
    m.coordinates.push_back(info);
  }

  const json& bodies = require_key(doc, "bodies", "");
  if (!bodies.is_array()) throw ValidationError("bodies", "expected an array");
  for (size_t i = 0; i < bodies.size(); ++i) {
    const std::string path = "bodies[" + std::to_string(i) + "]";
    const json& bj = bodies[i];
    if (!bj.is_object()) throw ValidationError(path, "expected an object");
    reject_unknown_keys(bj, {"name", "parent", "attachment_transform", "joint", "inertia", "frames"},
                        path);
    BodyModule b;
    b.name = require_key(bj, "name", path).get<std::string>();

    const std::string parent = require_key(bj, "parent", path).get<std::string>();
    if (parent == "world") {
      b.parent = -1;
    } else {
      b.parent = -2;
      for (size_t k = 0; k < i; ++k) {
        if (m.bodies[k].name == parent) b.parent = static_cast<int>(k);
      }
      if (b.parent == -2) {
        throw ValidationError(path + ".parent", "unknown parent body: " + parent);
      }
    }

    b.attachment = parse_transform(require_key(bj, "attachment_transform", path),
                                   path + ".attachment_transform");

    const json& jj = require_key(bj, "joint", path);
    if (!jj.is_object()) throw ValidationError(path + ".joint", "expected an object");
    reject_unknown_keys(jj, {"kind", "axis", "coordinate", "coupling"}, path + ".joint");
    const std::string kind = require_key(jj, "kind", path + ".joint").get<std::string>();
    if (kind == "revolute") {
      b.joint.kind = JointKind::Revolute;
    } else if (kind == "prismatic") {
      b.joint.kind = JointKind::Prismatic;
    } else if (kind == "coupled_revolute") {
      b.joint.kind = JointKind::CoupledRevolute;
    } else {
      throw ValidationError(path + ".joint.kind", "unknown joint kind: " + kind);
    }
    b.joint.axis = parse_vec3(require_key(jj, "axis", path + ".joint"), path + ".joint.axis");
    const std::string cname =
        require_key(jj, "coordinate", path + ".joint").get<std::string>();
    b.joint.coordinate = -1;
    for (int k = 0; k < m.coordinate_count(); ++k) {
      if (m.coordinates[k].name == cname) b.joint.coordinate = k;
    }
    if (b.joint.coordinate < 0) {
      throw ValidationError(path + ".joint.coordinate", "unknown coordinate: " + cname);
    }
    if (jj.contains("coupling")) {
      const json& cj = jj["coupling"];
      const std::string cpath = path + ".joint.coupling";
      if (!cj.is_object()) throw ValidationError(cpath, "expected an object");
      reject_unknown_keys(cj, {"kind", "l0", "L0"}, cpath);
      const std::string ckind = require_key(cj, "kind", cpath).get<std::string>();
      if (ckind != "triangle_law_of_cosines") {
        throw ValidationError(cpath + ".kind", "unknown coupling kind: " + ckind);
      }
      CouplingFunction c;
      c.l0 = parse_number(require_key(cj, "l0", cpath), cpath + ".l0");
      c.L0 = parse_number(require_key(cj, "L0", cpath), cpath + ".L0");
      b.joint.coupling = c;
    }

    const json& ij = require_key(bj, "inertia", path);
    if (!ij.is_object()) throw ValidationError(path + ".inertia", "expected an object");
    reject_unknown_keys(ij, {"mass", "com", "inertia_matrix"}, path + ".inertia");
    b.inertia.mass = parse_number(require_key(ij, "mass", path + ".inertia"),
                                  path + ".inertia.mass");
    b.inertia.com_offset =
        parse_vec3(require_key(ij, "com", path + ".inertia"), path + ".inertia.com");
    b.inertia.inertia_about_com = parse_mat3(
        require_key(ij, "inertia_matrix", path + ".inertia"), path + ".inertia.inertia_matrix");

    if (bj.contains("frames")) {
      const json& fj = bj["frames"];
      if (!fj.is_object()) throw ValidationError(path + ".frames", "expected an object");
      for (auto it = fj.begin(); it != fj.end(); ++it) {
        b.frames[it.key()] = parse_transform(it.value(), path + ".frames." + it.key());
      }
    }
    m.bodies.push_back(std::move(b));
  }

  validate_model(m);
  return m;
}

std::string save_model(const ModelGraph& m) {
  json doc;
  doc["gravity"] = dump_vec3(m.gravity);
  doc["coordinates"] = json::array();
  for (const auto& c : m.coordinates) {
    doc["coordinates"].push_back(json{{"name", c.name}, {"unit", c.unit}});
  }
  doc["bodies"] = json::array();
  for (const auto& b : m.bodies) {
    json bj;
    bj["name"] = b.name;
    bj["parent"] = b.parent < 0 ? "world" : m.bodies[b.parent].name;
    bj["attachment_transform"] = dump_transform(b.attachment);
    json jj;
    switch (b.joint.kind) {
      case JointKind::Revolute: jj["kind"] = "revolute"; break;
      case JointKind::Prismatic: jj["kind"] = "prismatic"; break;
      case JointKind::CoupledRevolute: jj["kind"] = "coupled_revolute"; break;
    }
    jj["axis"] = dump_vec3(b.joint.axis);
    jj["coordinate"] = m.coordinates[b.joint.coordinate].name;
    if (b.joint.coupling) {
      jj["coupling"] = json{{"kind", "triangle_law_of_cosines"},
                            {"l0", b.joint.coupling->l0},
                            {"L0", b.joint.coupling->L0}};
    }
    bj["joint"] = jj;
    bj["inertia"] = json{{"mass", b.inertia.mass},
                         {"com", dump_vec3(b.inertia.com_offset)},
                         {"inertia_matrix", dump_mat3(b.inertia.inertia_about_com)}};
    if (!b.frames.empty()) {
      json fj = json::object();
      for (const auto& [fname, ft] : b.frames) fj[fname] = dump_transform(ft);
      bj["frames"] = fj;
    }
    doc["bodies"].push_back(bj);
  }
  return doc.dump(2);
}

ModelGraph builtin_manipulator3dof() {
  ModelGraph m;
  m.coordinates = {{"phi", "rad"}, {"theta", "rad"}, {"delta", "m"}};
  m.gravity = Vec3(0.0, 0.0, -9.81);

  // Fixed frame rotations, exact entries. rx90: z becomes the horizontal
  // pitch axis (-y of the parent), y becomes world-up. rx180 flips the
  // elbow attachment so the coupling angle zeta in (-pi, 0) lifts link 2.
  Mat3 rx90;
  rx90 << 1, 0, 0,
          0, 0, -1,
          0, 1, 0;
  Mat3 rx180;
  rx180 << 1, 0, 0,
           0, -1, 0,
           0, 0, -1;

  BodyModule base;
  base.name = "base";
  base.parent = -1;
  base.attachment = Transform::identity();
  base.joint = {JointKind::Revolute, Vec3::UnitZ(), 0, std::nullopt};
  base.inertia.mass = 20.0;
  base.inertia.com_offset = Vec3(0.0, 0.0, 0.103);
  base.inertia.inertia_about_com = Vec3(0.536, 0.554, 0.789).asDiagonal();
  base.frames["C1"] = Transform{Mat3::Identity(), Vec3(0.0, 0.0, 0.103)};
  base.frames["F1"] = Transform{rx90, Vec3(0.0, 0.206, 0.075)};

  BodyModule link1;
  link1.name = "link1";
  link1.parent = 0;
  link1.attachment = base.frames.at("F1");
  link1.joint = {JointKind::Revolute, Vec3::UnitZ(), 1, std::nullopt};
  link1.inertia.mass = 60.0;
  link1.inertia.com_offset = Vec3(0.959, 0.001, -0.077);
  link1.inertia.inertia_about_com << 0.311, -0.065, 0.098,
                                     -0.065, 22.7, -0.003,
                                     0.098, -0.003, 22.8;
  link1.frames["C2"] = Transform{Mat3::Identity(), link1.inertia.com_offset};
  link1.frames["F2"] = Transform{rx180, Vec3(2.0, 0.0, 0.0)};

  // The cylinder-piston pair closing the chain has negligible mass, so it
  // contributes nothing to the partitioned inertia and is not a body here;
  // its geometry survives as the coupling parameters below.
  CouplingFunction coupling;
  coupling.l0 = 0.425;
  coupling.L0 = 0.35;

  BodyModule link2;
  link2.name = "link2";
  link2.parent = 1;
  link2.attachment = link1.frames.at("F2");
  link2.joint = {JointKind::CoupledRevolute, Vec3::UnitZ(), 2, coupling};
  link2.inertia.mass = 60.0;
  link2.inertia.com_offset = Vec3(1.041, 0.001, -0.077);
  link2.inertia.inertia_about_com << 0.311, 0.065, -0.098,
                                     0.065, 22.7, -0.003,
                                     -0.098, -0.003, 22.8;
  link2.frames["C3"] = Transform{Mat3::Identity(), link2.inertia.com_offset};
  link2.frames["F3"] = Transform{Mat3::Identity(), Vec3(2.0, 0.0, 0.0)};

  m.bodies = {std::move(base), std::move(link1), std::move(link2)};
  validate_model(m);
  return m;
}

}  // namespace ipdyn
