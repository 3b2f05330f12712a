#include "ship3d/camera_rig.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "ship3d/error.hpp"

namespace ship3d {

void CameraIntrinsics::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) {
    throw Error(ErrorCode::kInvalidArgument, "camera: fov_deg must be in (0, 180)");
  }
  if (!(z_near > 0.0 && z_near < z_far)) {
    throw Error(ErrorCode::kInvalidArgument, "camera: require 0 < z_near < z_far");
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "camera: image size must be >= 1");
  }
}

void CameraPose::validate() const {
  intrinsics.validate();
  const Eigen::Matrix3d r = world_to_camera.topLeftCorner<3, 3>();
  const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho <= 1e-9) || !(std::abs(r.determinant() - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::kInvariantViolation, "camera: rotation block is not a proper rotation");
  }
}

Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up) {
  const Eigen::Vector3d view = target - eye;
  if (!(view.norm() > 0.0)) throw Error(ErrorCode::kDegenerateGeometry, "look_at: eye equals target");
  const Eigen::Vector3d back = -view.normalized();
  const Eigen::Vector3d side = up.cross(back);
  if (!(side.norm() > 1e-12 * up.norm())) {
    throw Error(ErrorCode::kDegenerateGeometry, "look_at: up is parallel to the view direction");
  }
  const Eigen::Vector3d right = side.normalized();
  const Eigen::Vector3d cam_up = back.cross(right);

  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<1, 3>(0, 0) = right.transpose();
  m.block<1, 3>(1, 0) = cam_up.transpose();
  m.block<1, 3>(2, 0) = back.transpose();
  m(0, 3) = -right.dot(eye);
  m(1, 3) = -cam_up.dot(eye);
  m(2, 3) = -back.dot(eye);
  return m;
}

Eigen::Matrix4d projection_matrix(const CameraIntrinsics& intr) {
  intr.validate();
  const double f = 1.0 / std::tan(intr.fov_deg * std::numbers::pi / 360.0);
  const double aspect = static_cast<double>(intr.width) / intr.height;
  const double n = intr.z_near;
  const double fa = intr.z_far;
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  p(0, 0) = f / aspect;
  p(1, 1) = f;
  p(2, 2) = (fa + n) / (n - fa);
  p(2, 3) = 2.0 * fa * n / (n - fa);
  p(3, 2) = -1.0;
  return p;
}

std::vector<CameraPose> sample_hemisphere_cameras(int n, std::uint64_t seed, double radius,
                                                  const CameraIntrinsics& intr) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "cameras: n must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "cameras: radius must be > 0");
  intr.validate();
  SplitMix64 rng(seed);
  std::vector<CameraPose> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const double u = 1.0 - rng.uniform();  // (0, 1]
    const double z = radius * u;
    const double ring = std::sqrt(std::max(0.0, radius * radius - z * z));
    const Eigen::Vector3d eye(ring * std::cos(phi), ring * std::sin(phi), z);
    const Eigen::Vector3d dir = -eye.normalized();
    Eigen::Vector3d up = Eigen::Vector3d::UnitY();
    if (dir.cross(up).norm() < 1e-6) up = Eigen::Vector3d::UnitX();
    out.push_back({look_at(eye, Eigen::Vector3d::Zero(), up), intr});
  }
  return out;
}

nlohmann::json cameras_to_json(const std::vector<CameraPose>& cams) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cams) {
    nlohmann::json m = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
      m.push_back({c.world_to_camera(r, 0), c.world_to_camera(r, 1), c.world_to_camera(r, 2),
                   c.world_to_camera(r, 3)});
    }
    arr.push_back({{"world_to_camera", std::move(m)},
                   {"intrinsics",
                    {{"fov_deg", c.intrinsics.fov_deg},
                     {"z_near", c.intrinsics.z_near},
                     {"z_far", c.intrinsics.z_far},
                     {"width", c.intrinsics.width},
                     {"height", c.intrinsics.height}}}});
  }
  return {{"cameras", std::move(arr)}};
}

std::vector<CameraPose> cameras_from_json(const nlohmann::json& j) {
  try {
    const auto& arr = j.is_array() ? j : j.at("cameras");
    std::vector<CameraPose> out;
    for (const auto& item : arr) {
      CameraPose c;
      for (int r = 0; r < 4; ++r) {
        for (int k = 0; k < 4; ++k) c.world_to_camera(r, k) = item.at("world_to_camera").at(r).at(k).get<double>();
      }
      const auto& in = item.at("intrinsics");
      c.intrinsics.fov_deg = in.at("fov_deg").get<double>();
      c.intrinsics.z_near = in.at("z_near").get<double>();
      c.intrinsics.z_far = in.at("z_far").get<double>();
      c.intrinsics.width = in.at("width").get<int>();
      c.intrinsics.height = in.at("height").get<int>();
      c.validate();
      out.push_back(c);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed camera JSON: ") + e.what());
  }
}

}  // namespace ship3d
