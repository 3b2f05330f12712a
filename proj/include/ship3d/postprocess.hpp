#pragma once

#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ship3d/splat_io.hpp"

namespace ship3d {

// Per-axis angles in radians. Applied as extrinsic rotations about the world
// X, then Y, then Z axis: R = Rz(z) * Ry(y) * Rx(x), acting on column vectors.
// The viewer applies the same convention.
struct RotationAngles {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline constexpr RotationAngles kCanonicalRotation{std::numbers::pi / 2, std::numbers::pi,
                                                   std::numbers::pi};
inline constexpr double kDefaultOpacityThreshold = -3.0;
inline constexpr double kDegenerateExtent = 1e-9;

struct PostprocessConfig {
  double opacity_threshold = kDefaultOpacityThreshold;
  RotationAngles rotation_angles = kCanonicalRotation;
  double target_length_m = 0.0;

  void validate() const;
};

Eigen::Matrix3d rotation_matrix(const RotationAngles& angles);

// Keeps points whose opacity logit is strictly above `threshold`.
GaussianSplatCloud filter_by_opacity(const GaussianSplatCloud& cloud, double threshold);

struct Recentered {
  std::vector<Eigen::Vector3d> points;
  Eigen::Vector3d centroid;
};
Recentered recenter(std::span<const Eigen::Vector3d> points);

std::vector<Eigen::Vector3d> canonical_rotate(std::span<const Eigen::Vector3d> points,
                                              const RotationAngles& angles);

struct Scaled {
  std::vector<Eigen::Vector3d> points;
  double scale_factor = 1.0;
};
// Uniform scale so that max_z - min_z equals target_length_m.
Scaled scale_to_length(std::span<const Eigen::Vector3d> points, double target_length_m);

double z_extent(std::span<const Eigen::Vector3d> points);

struct ExportStats {
  std::size_t input_count = 0;
  std::size_t retained_count = 0;
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  double z_extent_before_scale = 0.0;
  double scale_factor = 1.0;
};

struct ExportResult {
  StandardPointCloud cloud;
  ExportStats stats;
};

// filter_by_opacity -> recenter -> canonical_rotate -> scale_to_length ->
// colors (stored bytes when present, otherwise sh_dc_to_rgb).
ExportResult export_chain_detailed(const GaussianSplatCloud& cloud, const PostprocessConfig& cfg);
StandardPointCloud export_chain(const GaussianSplatCloud& cloud, const PostprocessConfig& cfg);

std::vector<Eigen::Vector3d> to_points(std::span<const Float3> positions);

}  // namespace ship3d
