#include "ship3d/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "ship3d/error.hpp"
#include "render_common.hpp"

namespace ship3d {

namespace detail {

std::vector<ProjectedPoint> project_points(const StandardPointCloud& cloud, const CameraPose& cam) {
  const Eigen::Matrix4d proj = projection_matrix(cam.intrinsics);
  const double w = cam.intrinsics.width;
  const double h = cam.intrinsics.height;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cloud.size());
  std::vector<ProjectedPoint> out(cloud.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = project_one(cloud.positions[static_cast<std::size_t>(i)],
                                                   cam, proj, w, h);
  }
  return out;
}

ProjectedPoint project_one(const Eigen::Vector3d& p, const CameraPose& cam,
                           const Eigen::Matrix4d& proj, double w, double h) {
  ProjectedPoint out;
  const Eigen::Vector4d pc = cam.world_to_camera * p.homogeneous();
  if (pc.z() >= -cam.intrinsics.z_near || pc.z() < -cam.intrinsics.z_far) return out;
  const Eigen::Vector4d clip = proj * pc;
  const double nx = clip.x() / clip.w();
  const double ny = clip.y() / clip.w();
  const double fx = std::floor((nx + 1.0) * 0.5 * w);
  const double fy = std::floor((1.0 - ny) * 0.5 * h);
  // Far outside the frame: nothing a finite radius could reach.
  if (!(std::abs(fx) < 1e9 && std::abs(fy) < 1e9)) return out;
  out.visible = true;
  out.col = static_cast<long>(fx);
  out.row = static_cast<long>(fy);
  out.depth = -pc.z();
  return out;
}

}  // namespace detail

RenderResult render_points(const StandardPointCloud& cloud, const CameraPose& cam,
                           const RenderConfig& cfg) {
  cloud.validate();
  cam.validate();
  if (cfg.point_radius_px < 0) {
    throw Error(ErrorCode::kInvalidArgument, "render: point radius must be >= 0");
  }
  const int w = cam.intrinsics.width;
  const int h = cam.intrinsics.height;
  const auto projected = detail::project_points(cloud, cam);

  RenderResult res;
  res.image = RgbImage(w, h, cfg.background);
  res.depth.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                   std::numeric_limits<double>::infinity());

  // Each band owns a disjoint row range and scans the points in index order,
  // which reproduces the serial z-test exactly for any thread count.
  constexpr int kBandRows = 8;
  const int bands = (h + kBandRows - 1) / kBandRows;
  const long r = cfg.point_radius_px;
#pragma omp parallel for schedule(dynamic, 1)
  for (int band = 0; band < bands; ++band) {
    const long band_lo = static_cast<long>(band) * kBandRows;
    const long band_hi = std::min<long>(band_lo + kBandRows, h) - 1;
    for (std::size_t i = 0; i < projected.size(); ++i) {
      const auto& p = projected[i];
      if (!p.visible) continue;
      const long r0 = std::max(p.row - r, band_lo);
      const long r1 = std::min(p.row + r, band_hi);
      const long c0 = std::max(p.col - r, 0L);
      const long c1 = std::min(p.col + r, static_cast<long>(w) - 1);
      for (long y = r0; y <= r1; ++y) {
        for (long x = c0; x <= c1; ++x) {
          const std::size_t k = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                static_cast<std::size_t>(x);
          if (p.depth < res.depth[k]) {
            res.depth[k] = p.depth;
            res.image.set(static_cast<int>(x), static_cast<int>(y), cloud.colors[i]);
          }
        }
      }
    }
  }
  return res;
}

}  // namespace ship3d
