#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace ship3d {

struct CameraIntrinsics {
  double fov_deg = 45.0;  // vertical
  double z_near = 0.01;
  double z_far = 2.0;
  int width = 128;
  int height = 128;

  void validate() const;
};

struct CameraPose {
  Eigen::Matrix4d world_to_camera = Eigen::Matrix4d::Identity();
  CameraIntrinsics intrinsics;

  void validate() const;
};

// Camera looks down -Z, +X right, +Y up.
Eigen::Matrix4d look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                        const Eigen::Vector3d& up);

// OpenGL-style symmetric frustum; camera-space z in [-near, -far] maps to NDC
// depth [-1, 1].
Eigen::Matrix4d projection_matrix(const CameraIntrinsics& intr);

// Radius of the sphere circumscribing a unit cube centered at the origin.
inline constexpr double kUnitCubeCircumradius = 0.8660254037844386;

// Eyes on the upper (z > 0) hemisphere, area-uniform: azimuth ~ U[0, 2pi),
// z = radius * u with u ~ U(0, 1]. Each camera looks at the origin with up +Y
// (+X when the view direction is nearly parallel to +Y).
std::vector<CameraPose> sample_hemisphere_cameras(int n, std::uint64_t seed,
                                                  double radius = kUnitCubeCircumradius,
                                                  const CameraIntrinsics& intr = {});

// SplitMix64; the sequence is part of the reproducibility contract for
// sample_hemisphere_cameras.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

nlohmann::json cameras_to_json(const std::vector<CameraPose>& cams);
std::vector<CameraPose> cameras_from_json(const nlohmann::json& j);

}  // namespace ship3d
