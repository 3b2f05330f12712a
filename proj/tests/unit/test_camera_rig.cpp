#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "ship3d/camera_rig.hpp"
#include "ship3d/error.hpp"

using namespace ship3d;

namespace {

Eigen::Vector4d ndc_of(const Eigen::Matrix4d& proj, const Eigen::Vector3d& cam_point) {
  const Eigen::Vector4d clip = proj * cam_point.homogeneous();
  return clip / clip.w();
}

}  // namespace

TEST_CASE("look_at on the +Z axis") {
  const auto m = look_at({0, 0, 1}, {0, 0, 0}, {0, 1, 0});
  CHECK((m.topLeftCorner<3, 3>() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::Vector4d target = m * Eigen::Vector4d(0, 0, 0, 1);
  CHECK(target.head<3>() == Eigen::Vector3d(0, 0, -1));
  const Eigen::Vector4d eye = m * Eigen::Vector4d(0, 0, 1, 1);
  CHECK(eye.head<3>().norm() == 0.0);
}

TEST_CASE("look_at on random poses") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d eye(u(rng), u(rng), u(rng)), target(u(rng), u(rng), u(rng));
    const auto m = look_at(eye, target, {0, 1, 0});
    const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
    CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((m * eye.homogeneous()).head<3>().norm() < 1e-12);
    const Eigen::Vector3d t = (m * target.homogeneous()).head<3>();
    CHECK(std::abs(t.x()) < 1e-9);
    CHECK(std::abs(t.y()) < 1e-9);
    CHECK(t.z() == doctest::Approx(-(target - eye).norm()).epsilon(1e-12));
  }
  CHECK_THROWS_AS(look_at({1, 1, 1}, {1, 1, 1}, {0, 1, 0}), Error);
  CHECK_THROWS_AS(look_at({0, 2, 0}, {0, 0, 0}, {0, 1, 0}), Error);
}

TEST_CASE("hemisphere sampling is deterministic and on the sphere") {
  const auto a = sample_hemisphere_cameras(16, 7);
  const auto b = sample_hemisphere_cameras(16, 7);
  REQUIRE(a.size() == 16);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].world_to_camera == b[i].world_to_camera);
  CHECK(sample_hemisphere_cameras(16, 8)[0].world_to_camera != a[0].world_to_camera);

  for (double radius : {kUnitCubeCircumradius, 1.0, 3.5}) {
    for (const auto& cam : sample_hemisphere_cameras(200, 99, radius)) {
      cam.validate();
      const Eigen::Matrix3d r = cam.world_to_camera.topLeftCorner<3, 3>();
      const Eigen::Vector3d eye = -r.transpose() * cam.world_to_camera.topRightCorner<3, 1>();
      CHECK(std::abs(eye.norm() - radius) < 1e-9);
      CHECK(eye.z() > 0.0);
      const Eigen::Vector4d origin = cam.world_to_camera * Eigen::Vector4d(0, 0, 0, 1);
      CHECK(origin.z() < 0.0);
    }
  }
  CHECK(kUnitCubeCircumradius == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-16));
  CHECK_THROWS_AS(sample_hemisphere_cameras(0, 1), Error);
}

TEST_CASE("hemisphere mean height is half the radius") {
  const double radius = 2.0;
  const auto cams = sample_hemisphere_cameras(100000, 2024, radius);
  double mean_z = 0.0;
  for (const auto& cam : cams) {
    const Eigen::Matrix3d r = cam.world_to_camera.topLeftCorner<3, 3>();
    mean_z += (-r.transpose() * cam.world_to_camera.topRightCorner<3, 1>()).z();
  }
  mean_z /= double(cams.size());
  CHECK(std::abs(mean_z / (radius / 2) - 1.0) < 0.01);
}

TEST_CASE("splitmix64 reference values") {
  // First outputs for seed 0 of the published SplitMix64 generator.
  SplitMix64 g(0);
  CHECK(g.next() == 0xE220A8397B1DCDAFull);
  CHECK(g.next() == 0x6E789E6AA1B965F4ull);
  CHECK(g.next() == 0x06C45D188009454Full);
  SplitMix64 h(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = h.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("projection maps near and far planes and the fov boundary") {
  const CameraIntrinsics intr;
  const auto p = projection_matrix(intr);
  CHECK(std::abs(ndc_of(p, {0, 0, -intr.z_near}).z() + 1.0) <= 1e-9);
  CHECK(std::abs(ndc_of(p, {0, 0, -intr.z_far}).z() - 1.0) <= 1e-9);
  const double half = std::tan(intr.fov_deg / 2 * std::numbers::pi / 180);
  for (double d : {0.05, 0.5, 1.9}) {
    CHECK(std::abs(ndc_of(p, {0, d * half, -d}).y() - 1.0) <= 1e-12);
    CHECK(std::abs(ndc_of(p, {0, -d * half, -d}).y() + 1.0) <= 1e-12);
  }
  CameraIntrinsics wide = intr;
  wide.width = 256;
  const auto pw = projection_matrix(wide);
  CHECK(std::abs(ndc_of(pw, {2 * half, 0, -1}).x() - 1.0) <= 1e-12);
}

TEST_CASE("intrinsics and pose validation") {
  CameraIntrinsics bad;
  bad.fov_deg = 180;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.z_near = 3.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CameraPose pose;
  pose.world_to_camera(0, 0) = -1.0;  // reflection
  CHECK_THROWS_AS(pose.validate(), Error);
}

TEST_CASE("camera json round trip") {
  const auto cams = sample_hemisphere_cameras(5, 3);
  const auto back = cameras_from_json(nlohmann::json::parse(cameras_to_json(cams).dump()));
  REQUIRE(back.size() == cams.size());
  for (std::size_t i = 0; i < cams.size(); ++i) {
    CHECK(back[i].world_to_camera == cams[i].world_to_camera);
    CHECK(back[i].intrinsics.fov_deg == cams[i].intrinsics.fov_deg);
    CHECK(back[i].intrinsics.width == cams[i].intrinsics.width);
  }
  CHECK_THROWS_AS(cameras_from_json(nlohmann::json::parse(R"({"cams": []})")), Error);
}
