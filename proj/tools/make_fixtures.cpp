// Writes the synthetic fixture set (scene, mask, Gaussian PLY, AIS, calibration)
// used by the end-to-end tests into the given directory.

#include <iostream>

#include "fixtures.hpp"
#include "ship3d/error.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ship3d_fixtures <output-dir>\n";
    return 2;
  }
  try {
    const auto f = ship3d::testing::write_fixture_set(argv[1]);
    std::cout << f.scene_png << "\n" << f.mask_png << "\n" << f.gaussians_ply << "\n"
              << f.ais_json << "\n" << f.calib_json << "\n";
  } catch (const ship3d::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
