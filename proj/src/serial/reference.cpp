#include "ship3d/serial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "../render_common.hpp"
#include "ship3d/error.hpp"

namespace ship3d::serial {

Recentered recenter(std::span<const Eigen::Vector3d> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "recenter: empty point set");
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += p;
  Recentered out;
  out.centroid = sum / static_cast<double>(points.size());
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(p - out.centroid);
  return out;
}

std::vector<Eigen::Vector3d> canonical_rotate(std::span<const Eigen::Vector3d> points,
                                              const RotationAngles& angles) {
  const Eigen::Matrix3d r = rotation_matrix(angles);
  std::vector<Eigen::Vector3d> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(r * p);
  return out;
}

Scaled scale_to_length(std::span<const Eigen::Vector3d> points, double target_length_m) {
  if (!(target_length_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scale_to_length: target length must be > 0");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : points) {
    lo = std::min(lo, p.z());
    hi = std::max(hi, p.z());
  }
  const double extent = points.empty() ? 0.0 : hi - lo;
  if (!(extent > kDegenerateExtent)) {
    throw Error(ErrorCode::kDegenerateGeometry, "cloud has no length axis");
  }
  Scaled out;
  out.scale_factor = target_length_m / extent;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(p * out.scale_factor);
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h) {
  img.validate();
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resize: output dimensions must be >= 1");
  }
  RgbImage out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int r = 0; r < out_h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      const auto v = sample_bilinear(img, (c + 0.5) * sx - 0.5, (r + 0.5) * sy - 0.5);
      out.set(c, r, Rgb{static_cast<std::uint8_t>(std::lround(v[0])),
                        static_cast<std::uint8_t>(std::lround(v[1])),
                        static_cast<std::uint8_t>(std::lround(v[2]))});
    }
  }
  return out;
}

double mse(const RgbImage& a, const RgbImage& b) {
  a.validate();
  b.validate();
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch, "metrics: image dimensions differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.pixels.size());
}

double ssim(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg) {
  a.validate();
  b.validate();
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch, "metrics: image dimensions differ");
  }
  if (cfg.window < 1 || a.width < cfg.window || a.height < cfg.window) {
    throw Error(ErrorCode::kDimensionMismatch, "ssim: image smaller than window");
  }
  const auto x = luma(a);
  const auto y = luma(b);
  const auto g = gaussian_taps(cfg.window, cfg.sigma);
  const double c1 = (cfg.k1 * cfg.peak) * (cfg.k1 * cfg.peak);
  const double c2 = (cfg.k2 * cfg.peak) * (cfg.k2 * cfg.peak);
  const int w = a.width;
  double total = 0.0;
  long windows = 0;
  for (int r = 0; r + cfg.window <= a.height; ++r) {
    for (int c = 0; c + cfg.window <= w; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < cfg.window; ++i) {
        for (int j = 0; j < cfg.window; ++j) {
          const double wt = g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)];
          const std::size_t k = static_cast<std::size_t>(r + i) * static_cast<std::size_t>(w) +
                                static_cast<std::size_t>(c + j);
          mx += wt * x[k];
          my += wt * y[k];
          sxx += wt * x[k] * x[k];
          syy += wt * y[k] * y[k];
          sxy += wt * x[k] * y[k];
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

RenderResult render_points(const StandardPointCloud& cloud, const CameraPose& cam,
                           const RenderConfig& cfg) {
  cloud.validate();
  cam.validate();
  if (cfg.point_radius_px < 0) {
    throw Error(ErrorCode::kInvalidArgument, "render: point radius must be >= 0");
  }
  const int w = cam.intrinsics.width;
  const int h = cam.intrinsics.height;
  const Eigen::Matrix4d proj = projection_matrix(cam.intrinsics);
  RenderResult res;
  res.image = RgbImage(w, h, cfg.background);
  res.depth.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                   std::numeric_limits<double>::infinity());
  const long r = cfg.point_radius_px;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = detail::project_one(cloud.positions[i], cam, proj, w, h);
    if (!p.visible) continue;
    for (long y = std::max(p.row - r, 0L); y <= std::min(p.row + r, static_cast<long>(h) - 1); ++y) {
      for (long x = std::max(p.col - r, 0L); x <= std::min(p.col + r, static_cast<long>(w) - 1); ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                              static_cast<std::size_t>(x);
        if (p.depth < res.depth[k]) {
          res.depth[k] = p.depth;
          res.image.set(static_cast<int>(x), static_cast<int>(y), cloud.colors[i]);
        }
      }
    }
  }
  return res;
}

}  // namespace ship3d::serial
