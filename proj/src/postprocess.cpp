#include "ship3d/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ship3d/error.hpp"

namespace ship3d {

namespace {

// Fixed block size for reductions: partial sums are formed per block and
// combined in block order, so the result does not depend on thread count.
constexpr std::ptrdiff_t kReduceBlock = 4096;

std::ptrdiff_t block_count(std::size_t n) {
  return (static_cast<std::ptrdiff_t>(n) + kReduceBlock - 1) / kReduceBlock;
}

}  // namespace

void PostprocessConfig::validate() const {
  if (!(target_length_m > 0.0) || !std::isfinite(target_length_m)) {
    throw Error(ErrorCode::kInvalidArgument, "postprocess: target_length_m must be > 0");
  }
  if (!std::isfinite(rotation_angles.x) || !std::isfinite(rotation_angles.y) ||
      !std::isfinite(rotation_angles.z)) {
    throw Error(ErrorCode::kInvalidArgument, "postprocess: rotation angles must be finite");
  }
  if (!std::isfinite(opacity_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "postprocess: opacity threshold must be finite");
  }
}

Eigen::Matrix3d rotation_matrix(const RotationAngles& angles) {
  const double cx = std::cos(angles.x), sx = std::sin(angles.x);
  const double cy = std::cos(angles.y), sy = std::sin(angles.y);
  const double cz = std::cos(angles.z), sz = std::sin(angles.z);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0,
        0, cx, -sx,
        0, sx, cx;
  ry << cy, 0, sy,
        0, 1, 0,
        -sy, 0, cy;
  rz << cz, -sz, 0,
        sz, cz, 0,
        0, 0, 1;
  return rz * ry * rx;
}

std::vector<Eigen::Vector3d> to_points(std::span<const Float3> positions) {
  std::vector<Eigen::Vector3d> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out[i] = {positions[i][0], positions[i][1], positions[i][2]};
  }
  return out;
}

GaussianSplatCloud filter_by_opacity(const GaussianSplatCloud& cloud, double threshold) {
  cloud.validate();
  GaussianSplatCloud out;
  std::size_t kept = 0;
  for (float v : cloud.opacity_logits) kept += static_cast<double>(v) > threshold ? 1 : 0;
  out.positions.reserve(kept);
  out.opacity_logits.reserve(kept);
  out.scales.reserve(kept);
  out.rotations.reserve(kept);
  out.f_dc.reserve(kept);
  if (!cloud.colors.empty()) out.colors.reserve(kept);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!(static_cast<double>(cloud.opacity_logits[i]) > threshold)) continue;
    out.positions.push_back(cloud.positions[i]);
    out.opacity_logits.push_back(cloud.opacity_logits[i]);
    out.scales.push_back(cloud.scales[i]);
    out.rotations.push_back(cloud.rotations[i]);
    out.f_dc.push_back(cloud.f_dc[i]);
    if (!cloud.colors.empty()) out.colors.push_back(cloud.colors[i]);
  }
  return out;
}

Recentered recenter(std::span<const Eigen::Vector3d> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "recenter: empty point set");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  const std::ptrdiff_t blocks = block_count(points.size());
  std::vector<Eigen::Vector3d> partial(static_cast<std::size_t>(blocks), Eigen::Vector3d::Zero());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    const std::ptrdiff_t end = std::min(n, (b + 1) * kReduceBlock);
    for (std::ptrdiff_t i = b * kReduceBlock; i < end; ++i) s += points[static_cast<std::size_t>(i)];
    partial[static_cast<std::size_t>(b)] = s;
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& s : partial) sum += s;

  Recentered out;
  out.centroid = sum / static_cast<double>(n);
  out.points.resize(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.points[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)] - out.centroid;
  }
  return out;
}

std::vector<Eigen::Vector3d> canonical_rotate(std::span<const Eigen::Vector3d> points,
                                              const RotationAngles& angles) {
  const Eigen::Matrix3d r = rotation_matrix(angles);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<Eigen::Vector3d> out(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = r * points[static_cast<std::size_t>(i)];
  }
  return out;
}

double z_extent(std::span<const Eigen::Vector3d> points) {
  if (points.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double z = points[static_cast<std::size_t>(i)].z();
    lo = std::min(lo, z);
    hi = std::max(hi, z);
  }
  return hi - lo;
}

Scaled scale_to_length(std::span<const Eigen::Vector3d> points, double target_length_m) {
  if (!(target_length_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scale_to_length: target length must be > 0");
  }
  const double extent = z_extent(points);
  if (!(extent > kDegenerateExtent)) {
    throw Error(ErrorCode::kDegenerateGeometry, "cloud has no length axis");
  }
  Scaled out;
  out.scale_factor = target_length_m / extent;
  out.points.resize(points.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out.points[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)] * out.scale_factor;
  }
  return out;
}

ExportResult export_chain_detailed(const GaussianSplatCloud& cloud, const PostprocessConfig& cfg) {
  cfg.validate();
  ExportResult result;
  result.stats.input_count = cloud.size();

  const GaussianSplatCloud kept = filter_by_opacity(cloud, cfg.opacity_threshold);
  result.stats.retained_count = kept.size();
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no points above opacity threshold");
  }

  Recentered centered = recenter(to_points(kept.positions));
  result.stats.centroid = centered.centroid;
  const auto rotated = canonical_rotate(centered.points, cfg.rotation_angles);
  result.stats.z_extent_before_scale = z_extent(rotated);
  Scaled scaled = scale_to_length(rotated, cfg.target_length_m);
  result.stats.scale_factor = scaled.scale_factor;

  result.cloud.positions = std::move(scaled.points);
  result.cloud.colors.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    result.cloud.colors[i] = kept.colors.empty() ? sh_dc_to_rgb(kept.f_dc[i]) : kept.colors[i];
  }
  return result;
}

StandardPointCloud export_chain(const GaussianSplatCloud& cloud, const PostprocessConfig& cfg) {
  return export_chain_detailed(cloud, cfg).cloud;
}

}  // namespace ship3d
