#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ipdyn/model.hpp"
#include "support.hpp"

using namespace ipdyn;
using test_support::Rng;

namespace {

/// Independent geometric construction of the coupling angle: bisect for the
/// apex angle gamma of an isosceles triangle with legs L0 whose base must
/// equal l0 + delta, then take the supplement with negative sign.
double coupling_angle_geometric(double l0, double L0, double delta) {
  const double target = l0 + delta;
  auto base_length = [&](double gamma) {
    const Vec3 p1(L0, 0.0, 0.0);
    const Vec3 p2(L0 * std::cos(gamma), L0 * std::sin(gamma), 0.0);
    return (p1 - p2).norm();
  };
  double lo = 0.0, hi = M_PI;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (base_length(mid) < target ? lo : hi) = mid;
  }
  const double gamma = 0.5 * (lo + hi);
  return gamma - M_PI;
}

}  // namespace

TEST_CASE("builtin manipulator parameters") {
  const ModelGraph m = builtin_manipulator3dof();
  CHECK(m.coordinate_count() == 3);
  CHECK(m.coordinates[0].name == "phi");
  CHECK(m.coordinates[1].name == "theta");
  CHECK(m.coordinates[2].name == "delta");
  CHECK(m.coordinates[2].unit == "m");
  CHECK(m.gravity.z() == -9.81);

  CHECK(m.bodies[0].inertia.mass == 20.0);
  CHECK((m.bodies[0].inertia.com_offset - Vec3(0, 0, 0.103)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.bodies[1].inertia.mass == 60.0);
  CHECK(m.bodies[1].inertia.inertia_about_com(2, 2) == 22.8);
  CHECK(m.bodies[2].inertia.inertia_about_com(1, 1) == 22.7);
  CHECK((m.bodies[1].frames.at("F2").translation - Vec3(2, 0, 0)).cwiseAbs().maxCoeff() == 0.0);

  const CouplingFunction& c = *m.bodies[2].joint.coupling;
  CHECK(c.l0 == 0.425);
  CHECK(c.L0 == 0.35);
}

TEST_CASE("coupling evaluation against the geometric construction") {
  CouplingFunction c;
  c.l0 = 0.425;
  c.L0 = 0.35;

  const CouplingValue at_zero = coupling_eval(c, 0.0);
  CHECK(at_zero.angle == doctest::Approx(coupling_angle_geometric(c.l0, c.L0, 0.0)).epsilon(1e-9));
  CHECK(at_zero.angle == doctest::Approx(-std::acos(-0.26276)).epsilon(1e-5));

  // acos(0) case: (delta + l0)^2 = 2 L0^2.
  const double delta_right_angle = c.L0 * std::sqrt(2.0) - c.l0;
  CHECK(coupling_eval(c, delta_right_angle).angle == doctest::Approx(-M_PI / 2).epsilon(1e-12));

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double lo = c.feasible_lo(), hi = c.feasible_hi();
    const double d = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    const CouplingValue v = coupling_eval(c, d);
    CHECK(v.angle ==
          doctest::Approx(coupling_angle_geometric(c.l0, c.L0, d)).epsilon(1e-9));
    const double h = 1e-7;
    const double fd1 = (coupling_eval(c, d + h).angle - coupling_eval(c, d - h).angle) / (2 * h);
    CHECK(v.dangle_ddelta == doctest::Approx(fd1).epsilon(1e-6));
    const double fd2 = (coupling_eval(c, d + h).dangle_ddelta -
                        coupling_eval(c, d - h).dangle_ddelta) / (2 * h);
    CHECK(v.d2angle_ddelta2 == doctest::Approx(fd2).epsilon(1e-5));
    CHECK(v.dangle_ddelta > 0.0);
  }

  // Strict monotonicity over a sweep.
  double prev = -4.0;
  for (int k = 0; k <= 500; ++k) {
    const double d = -0.4 + (0.26 + 0.4) * k / 500.0;
    const double angle = coupling_eval(c, d).angle;
    CHECK(angle > prev);
    prev = angle;
  }

  CHECK_THROWS_AS(coupling_eval(c, c.feasible_hi() + 1e-6), CouplingSingularityError);
  CHECK_THROWS_AS(coupling_eval(c, c.feasible_lo()), CouplingSingularityError);
  try {
    coupling_eval(c, 0.3);
  } catch (const CouplingSingularityError& e) {
    CHECK(e.delta() == 0.3);
    CHECK(e.feasible_lo() == doctest::Approx(-0.425));
    CHECK(e.feasible_hi() == doctest::Approx(0.275));
    CHECK(std::string(e.what()).find("0.275") != std::string::npos);
  }
}

TEST_CASE("bundled manipulator document loads to the builtin model") {
  std::ifstream in(std::string(IPDYN_SOURCE_DIR) + "/models/manipulator3dof.json");
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  const ModelGraph m = load_model(ss.str());
  CHECK(m.coordinate_count() == 3);
  CHECK(m.bodies[1].inertia.mass == 60.0);
  CHECK((m.bodies[0].inertia.com_offset - Vec3(0, 0, 0.103)).cwiseAbs().maxCoeff() == 0.0);
  // Bit-identical to the in-code builtin.
  CHECK(save_model(m) == save_model(builtin_manipulator3dof()));
}

TEST_CASE("model save/load round trip is bit-identical") {
  const ModelGraph m = builtin_manipulator3dof();
  const ModelGraph back = load_model(save_model(m));
  REQUIRE(back.body_count() == m.body_count());
  CHECK((back.gravity - m.gravity).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < m.body_count(); ++i) {
    const BodyModule& a = m.bodies[i];
    const BodyModule& b = back.bodies[i];
    CHECK(a.name == b.name);
    CHECK(a.parent == b.parent);
    CHECK((a.attachment.rotation - b.attachment.rotation).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.attachment.translation - b.attachment.translation).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.joint.kind == b.joint.kind);
    CHECK((a.joint.axis - b.joint.axis).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.inertia.mass == b.inertia.mass);
    CHECK((a.inertia.com_offset - b.inertia.com_offset).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.inertia.inertia_about_com - b.inertia.inertia_about_com).cwiseAbs().maxCoeff() ==
          0.0);
    REQUIRE(a.frames.size() == b.frames.size());
    for (const auto& [name, ft] : a.frames) {
      CHECK((ft.rotation - b.frames.at(name).rotation).cwiseAbs().maxCoeff() == 0.0);
      CHECK((ft.translation - b.frames.at(name).translation).cwiseAbs().maxCoeff() == 0.0);
    }
    if (a.joint.coupling) {
      CHECK(a.joint.coupling->l0 == b.joint.coupling->l0);
      CHECK(a.joint.coupling->L0 == b.joint.coupling->L0);
    }
  }
}

TEST_CASE("load_model rejects invalid documents") {
  CHECK_THROWS_AS(load_model("not json at all"), ParseError);

  // Empty body list.
  CHECK_THROWS_WITH_AS(
      load_model(R"({"gravity":[0,0,-9.81],"coordinates":[{"name":"a","unit":"rad"}],"bodies":[]})"),
      doctest::Contains("no bodies"), ValidationError);

  // Non-unit axis, with the path in the message.
  const std::string bad_axis = R"({
    "gravity": [0,0,-9.81],
    "coordinates": [{"name":"a","unit":"rad"}],
    "bodies": [{
      "name": "b1", "parent": "world",
      "attachment_transform": {"rotation":[1,0,0,0,1,0,0,0,1], "translation":[0,0,0]},
      "joint": {"kind":"revolute","axis":[0,0,2],"coordinate":"a"},
      "inertia": {"mass":1.0,"com":[0,0,0],"inertia_matrix":[1,0,0,0,1,0,0,0,1]}
    }]
  })";
  try {
    load_model(bad_axis);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("axis not unit length") != std::string::npos);
    CHECK(e.path() == "bodies[0].joint.axis");
  }

  // Unknown field is named.
  const std::string unknown_field = R"({
    "gravity": [0,0,-9.81],
    "coordinates": [{"name":"a","unit":"rad"}],
    "bodies": [], "extra": 1
  })";
  CHECK_THROWS_WITH_AS(load_model(unknown_field), doctest::Contains(".extra"), ValidationError);

  // Duplicate body names.
  const std::string dup = R"({
    "gravity": [0,0,-9.81],
    "coordinates": [{"name":"a","unit":"rad"}],
    "bodies": [
      {"name":"b","parent":"world",
       "attachment_transform": {"rotation":[1,0,0,0,1,0,0,0,1],"translation":[0,0,0]},
       "joint":{"kind":"revolute","axis":[0,0,1],"coordinate":"a"},
       "inertia":{"mass":1.0,"com":[0,0,0],"inertia_matrix":[1,0,0,0,1,0,0,0,1]}},
      {"name":"b","parent":"b",
       "attachment_transform": {"rotation":[1,0,0,0,1,0,0,0,1],"translation":[0,0,0]},
       "joint":{"kind":"revolute","axis":[0,0,1],"coordinate":"a"},
       "inertia":{"mass":1.0,"com":[0,0,0],"inertia_matrix":[1,0,0,0,1,0,0,0,1]}}
    ]
  })";
  CHECK_THROWS_WITH_AS(load_model(dup), doctest::Contains("duplicate body name"), ValidationError);
}

TEST_CASE("inertia parameter validation") {
  ModelGraph m = builtin_manipulator3dof();

  // Massless body must carry a zero tensor.
  m.bodies[0].inertia.mass = 0.0;
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("massless"), ValidationError);
  m.bodies[0].inertia.inertia_about_com = Mat3::Zero();
  CHECK_NOTHROW(validate_model(m));

  // Asymmetric tensor.
  m = builtin_manipulator3dof();
  m.bodies[1].inertia.inertia_about_com(0, 1) += 1e-6;
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("symmetric"), ValidationError);

  // Indefinite tensor.
  m = builtin_manipulator3dof();
  m.bodies[1].inertia.inertia_about_com = Vec3(-1.0, 1.0, 1.0).asDiagonal();
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("positive semidefinite"),
                       ValidationError);

  // Triangle inequality on principal moments.
  m = builtin_manipulator3dof();
  m.bodies[1].inertia.inertia_about_com = Vec3(10.0, 1.0, 1.0).asDiagonal();
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("triangle"), ValidationError);

  // Coupling lengths must be positive.
  m = builtin_manipulator3dof();
  m.bodies[2].joint.coupling->l0 = 0.0;
  CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("coupling"), ValidationError);
}

TEST_CASE("coordinate intervals") {
  const ModelGraph m = builtin_manipulator3dof();
  const auto [lo0, hi0] = m.coordinate_interval(0);
  CHECK(!std::isfinite(lo0));
  CHECK(!std::isfinite(hi0));
  const auto [lo2, hi2] = m.coordinate_interval(2);
  CHECK(lo2 == doctest::Approx(-0.425));
  CHECK(hi2 == doctest::Approx(0.275));
}
