#include "doctest.h"

#include "ipdyn/liegroup.hpp"
#include "support.hpp"

using namespace ipdyn;
using test_support::Rng;

TEST_CASE("skew matrix") {
  CHECK((skew(Vec3::Zero())).isZero(0.0));

  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK((skew(Vec3(0, 0, 1)) - expected).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = rng.vec3(2.0);
    const Vec3 w = rng.vec3(2.0);
    // Component-wise cross product as the oracle.
    const Vec3 cross(v.y() * w.z() - v.z() * w.y(), v.z() * w.x() - v.x() * w.z(),
                     v.x() * w.y() - v.y() * w.x());
    CHECK((skew(v) * w - cross).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((skew(v) + skew(v).transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("transform composition") {
  Rng rng(2);
  const Transform t = rng.transform();
  const Transform composed = compose(t, Transform::identity());
  CHECK((composed.rotation - t.rotation).cwiseAbs().maxCoeff() == 0.0);
  CHECK((composed.translation - t.translation).cwiseAbs().maxCoeff() == 0.0);

  const Transform round = compose(t, inverse(t));
  CHECK((round.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(round.translation.cwiseAbs().maxCoeff() <= 1e-12);

  for (int i = 0; i < 100; ++i) {
    // Three chained frames against the dense 4x4 product.
    const Transform a = rng.transform(), b = rng.transform(), c = rng.transform();
    const Mat4 dense = a.embed() * b.embed() * c.embed();
    const Mat4 chained = compose(compose(a, b), c).embed();
    CHECK((dense - chained).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("transform inverse") {
  CHECK(inverse(Transform::identity()).embed().isIdentity(0.0));

  const Transform shift{Mat3::Identity(), Vec3(1, -2, 3)};
  CHECK((inverse(shift).translation + shift.translation).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Transform t = rng.transform(2.0);
    const Mat4 dense_inverse = t.embed().inverse();
    CHECK((inverse(t).embed() - dense_inverse).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("adjoint") {
  CHECK(adjoint(Transform::identity()).isIdentity(0.0));

  Rng rng(4);
  const Mat3 r = rng.rotation();
  const Mat6 ad_rot = adjoint(Transform{r, Vec3::Zero()});
  CHECK((ad_rot.topLeftCorner<3, 3>() - r).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ad_rot.bottomRightCorner<3, 3>() - r).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ad_rot.bottomLeftCorner<3, 3>().isZero(0.0));
  CHECK(ad_rot.topRightCorner<3, 3>().isZero(0.0));

  for (int i = 0; i < 100; ++i) {
    const Transform a = rng.transform(), b = rng.transform();
    CHECK((adjoint(compose(a, b)) - adjoint(a) * adjoint(b)).cwiseAbs().maxCoeff() <= 1e-12);
    // Inverse transform vs dense 6x6 inverse.
    const Mat6 dense_inverse = adjoint(a).inverse();
    CHECK((adjoint(inverse(a)) - dense_inverse).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("twist change of frame round-trips") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Transform t = rng.transform();
    Vec6 v;
    v << rng.vec3(), rng.vec3();
    const Vec6 mapped = adjoint(t) * v;
    const Vec6 back = adjoint(inverse(t)) * mapped;
    CHECK((back - v).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("body twist from transform derivative") {
  const Twist zero = body_twist_from_derivative(Transform::identity(), Mat4::Zero());
  CHECK(zero.vec().isZero(0.0));

  // Planar rotation about z at unit rate.
  const double theta = 0.8;
  const Transform t{rot_z(theta), Vec3::Zero()};
  Mat4 t_dot = Mat4::Zero();
  Mat3 dr;
  dr << -std::sin(theta), -std::cos(theta), 0, std::cos(theta), -std::sin(theta), 0, 0, 0, 0;
  t_dot.topLeftCorner<3, 3>() = dr;
  const Twist planar = body_twist_from_derivative(t, t_dot);
  CHECK((planar.angular - Vec3(0, 0, 1)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(planar.linear.cwiseAbs().maxCoeff() <= 1e-12);

  // Smooth curve: central differences vs the analytic derivative.
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const Vec3 axis_rates = rng.vec3();
    const Vec3 vel = rng.vec3();
    auto curve = [&](double s) {
      return Transform{rot_z(axis_rates.z() * s) * rot_y(axis_rates.y() * s) *
                           rot_x(axis_rates.x() * s),
                       vel * s + Vec3(0.3, -0.2, 0.1) * s * s};
    };
    const double s0 = rng.uniform(0.2, 1.0), h = 1e-6;
    const Mat4 fd = (curve(s0 + h).embed() - curve(s0 - h).embed()) / (2 * h);
    const Twist from_fd = body_twist_from_derivative(curve(s0), fd, 1e-6);
    // Analytic derivative via a much finer stencil as reference.
    const double h2 = 1e-7;
    const Mat4 fine = (curve(s0 + h2).embed() - curve(s0 - h2).embed()) / (2 * h2);
    const Twist from_fine = body_twist_from_derivative(curve(s0), fine, 1e-6);
    CHECK((from_fd.vec() - from_fine.vec()).cwiseAbs().maxCoeff() <= 1e-6);
  }

  // Corrupted derivative: the 3x3 block is far from skew.
  Mat4 bad = Mat4::Zero();
  bad(0, 1) = 1.0;  // no compensating -1 at (1,0)
  CHECK_THROWS_AS(body_twist_from_derivative(Transform::identity(), bad, 1e-8),
                  InconsistentDerivativeError);
}

TEST_CASE("rotation helpers") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    CHECK(is_rotation(rng.rotation(), 1e-12));
  }
  Mat3 nearly = rot_z(0.5);
  nearly(0, 0) += 5e-9;
  CHECK(is_rotation(orthonormalized(nearly, 1e-8), 1e-12));
  Mat3 garbage = Mat3::Constant(0.4);
  CHECK_THROWS_AS(orthonormalized(garbage, 1e-8), ValidationError);
}
