#pragma once

#include <vector>

#include "ship3d/renderer.hpp"

namespace ship3d::detail {

struct ProjectedPoint {
  bool visible = false;
  long col = 0;
  long row = 0;
  double depth = 0.0;
};

// Shared by the parallel renderer and the serial reference so both apply
// identical culling and pixel snapping.
ProjectedPoint project_one(const Eigen::Vector3d& p, const CameraPose& cam,
                           const Eigen::Matrix4d& proj, double w, double h);
std::vector<ProjectedPoint> project_points(const StandardPointCloud& cloud, const CameraPose& cam);

}  // namespace ship3d::detail
