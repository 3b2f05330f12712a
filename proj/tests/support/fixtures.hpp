#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "ship3d/raster.hpp"
#include "ship3d/splat_io.hpp"

namespace ship3d::testing {

// Homography used to synthesize the fixture calibration: pixel -> (lon, lat)
// near a port at 8.5E 53.6N with a slight perspective term.
Eigen::Matrix3d fixture_homography();

struct FixtureSet {
  std::string scene_png;
  std::string mask_png;
  std::string gaussians_ply;
  std::string ais_json;
  std::string calib_json;
};

// Box mask cols [100, 219] x rows [120, 159] in a 320x240 scene.
BinaryMask fixture_mask();
RgbImage fixture_scene();
// Points on the surface of a 0.3 x 1.0 x 0.2 box (long axis +Y, which the
// canonical rotation maps onto Z) plus low-opacity outliers.
GaussianSplatCloud fixture_cloud();

FixtureSet write_fixture_set(const std::string& dir);

GaussianSplatCloud random_cloud(std::mt19937_64& rng, std::size_t n, bool with_colors = false);
RgbImage random_image(std::mt19937_64& rng, int w, int h);

std::string make_temp_dir(const std::string& tag);

}  // namespace ship3d::testing
