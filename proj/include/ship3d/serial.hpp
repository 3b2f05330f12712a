#pragma once

// Single-threaded reference versions of the OpenMP kernels. They take the
// plainest route through each computation and exist for cross-checking and
// benchmarking; production callers use the parallel entry points.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ship3d/metrics.hpp"
#include "ship3d/postprocess.hpp"
#include "ship3d/raster.hpp"
#include "ship3d/renderer.hpp"

namespace ship3d::serial {

Recentered recenter(std::span<const Eigen::Vector3d> points);
std::vector<Eigen::Vector3d> canonical_rotate(std::span<const Eigen::Vector3d> points,
                                              const RotationAngles& angles);
Scaled scale_to_length(std::span<const Eigen::Vector3d> points, double target_length_m);

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h);

double mse(const RgbImage& a, const RgbImage& b);
// Direct 2-D window evaluation, no separable filtering.
double ssim(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg = {});

RenderResult render_points(const StandardPointCloud& cloud, const CameraPose& cam,
                           const RenderConfig& cfg = {});

}  // namespace ship3d::serial
