#pragma once

#include <vector>

#include "ship3d/camera_rig.hpp"
#include "ship3d/raster.hpp"
#include "ship3d/splat_io.hpp"

namespace ship3d {

struct RenderConfig {
  int point_radius_px = 1;
  Rgb background{128, 128, 128};
};

struct RenderResult {
  RgbImage image;
  // Camera-space distance along -Z per pixel; +inf where nothing was drawn.
  std::vector<double> depth;
};

// Nearest-pixel square splats of side 2r+1 with a strict-less z-test, so on
// equal depth the lower point index wins. Pixel (c, r) covers NDC cell
// [c, c+1) x [r, r+1) after mapping NDC [-1, 1] to [0, width]; row 0 is top.
RenderResult render_points(const StandardPointCloud& cloud, const CameraPose& cam,
                           const RenderConfig& cfg = {});

}  // namespace ship3d
