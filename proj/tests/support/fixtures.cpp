#include "fixtures.hpp"

#include <filesystem>

#include <json.hpp>

#include "ship3d/pipeline.hpp"

namespace ship3d::testing {

namespace fs = std::filesystem;

Eigen::Matrix3d fixture_homography() {
  Eigen::Matrix3d h;
  h << 2.0e-5, 1.0e-6, 8.5,
       1.0e-6, -1.5e-5, 53.6,
       1.0e-8, 2.0e-8, 1.0;
  return h;
}

BinaryMask fixture_mask() {
  BinaryMask m(320, 240);
  for (int r = 120; r <= 159; ++r) {
    for (int c = 100; c <= 219; ++c) m.set(c, r, true);
  }
  return m;
}

RgbImage fixture_scene() {
  RgbImage img(320, 240);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const bool water = r >= 140;
      Rgb p = water ? Rgb{20, static_cast<std::uint8_t>(60 + r / 8), 110}
                    : Rgb{static_cast<std::uint8_t>(150 + r / 4), 190, 230};
      if (c >= 100 && c <= 219 && r >= 120 && r <= 159) {
        p = r < 132 ? Rgb{230, 230, 225} : Rgb{static_cast<std::uint8_t>(120 + (c - 100)), 40, 35};
      }
      img.set(c, r, p);
    }
  }
  return img;
}

GaussianSplatCloud fixture_cloud() {
  GaussianSplatCloud c;
  const double half[3] = {0.15, 0.5, 0.1};
  auto add = [&](float x, float y, float z, float logit, Float3 fdc) {
    c.positions.push_back({x, y, z});
    c.opacity_logits.push_back(logit);
    c.scales.push_back({-4.0f, -4.0f, -4.0f});
    c.rotations.push_back({1.0f, 0.0f, 0.0f, 0.0f});
    c.f_dc.push_back(fdc);
  };
  constexpr int kSteps = 12;
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const double sign = face % 2 ? 1.0 : -1.0;
    for (int i = 0; i <= kSteps; ++i) {
      for (int j = 0; j <= kSteps; ++j) {
        double p[3];
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        p[axis] = sign * half[axis];
        p[a1] = -half[a1] + 2.0 * half[a1] * i / kSteps;
        p[a2] = -half[a2] + 2.0 * half[a2] * j / kSteps;
        const float tint = static_cast<float>(0.3 * axis - 0.4);
        add(static_cast<float>(p[0] + 0.05), static_cast<float>(p[1] - 0.02), static_cast<float>(p[2] + 0.1),
            2.0f, {tint, 0.2f, -tint});
      }
    }
  }
  // Spurious low-confidence points well outside the hull.
  add(3.0f, 9.0f, -4.0f, -5.0f, {0, 0, 0});
  add(-6.0f, -8.0f, 2.0f, -3.0f, {0, 0, 0});
  add(0.0f, 12.0f, 0.0f, -7.5f, {0, 0, 0});
  return c;
}

FixtureSet write_fixture_set(const std::string& dir) {
  fs::create_directories(dir);
  const fs::path d(dir);
  FixtureSet f{(d / "scene.png").string(), (d / "mask.png").string(), (d / "gaussians.ply").string(),
               (d / "ais.json").string(), (d / "calib.json").string()};
  save_image(fixture_scene(), f.scene_png);
  save_mask(fixture_mask(), f.mask_png);
  write_file_bytes(f.gaussians_ply, write_gaussian_ply(fixture_cloud()));
  write_json_file(f.ais_json, {{"length_m", 50.0}, {"lat", 53.55}, {"lon", 8.55}, {"mmsi", 211000000}});

  const Eigen::Matrix3d h = fixture_homography();
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& px : {Eigen::Vector2d(0, 0), Eigen::Vector2d(319, 0), Eigen::Vector2d(319, 239),
                         Eigen::Vector2d(0, 239), Eigen::Vector2d(160, 180), Eigen::Vector2d(40, 200)}) {
    const Eigen::Vector3d q = h * px.homogeneous();
    cs.push_back({{"px", {px.x(), px.y()}}, {"geo", {q.x() / q.z(), q.y() / q.z()}}});
  }
  write_json_file(f.calib_json, {{"correspondences", cs}});
  return f;
}

GaussianSplatCloud random_cloud(std::mt19937_64& rng, std::size_t n, bool with_colors) {
  std::uniform_real_distribution<float> pos(-1.0f, 1.0f);
  std::normal_distribution<float> logit(0.0f, 3.0f);
  std::uniform_real_distribution<float> attr(-3.0f, 3.0f);
  std::uniform_int_distribution<int> byte(0, 255);
  GaussianSplatCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.positions.push_back({pos(rng), 2.0f * pos(rng), 0.5f * pos(rng)});
    c.opacity_logits.push_back(logit(rng));
    c.scales.push_back({attr(rng), attr(rng), attr(rng)});
    Float4 q{attr(rng), attr(rng), attr(rng), attr(rng)};
    if (q[0] == 0.0f && q[1] == 0.0f && q[2] == 0.0f && q[3] == 0.0f) q[0] = 1.0f;
    c.rotations.push_back(q);
    c.f_dc.push_back({attr(rng), attr(rng), attr(rng)});
    if (with_colors) {
      c.colors.push_back({static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                          static_cast<std::uint8_t>(byte(rng))});
    }
  }
  return c;
}

RgbImage random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> byte(0, 255);
  RgbImage img(w, h);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(byte(rng));
  return img;
}

std::string make_temp_dir(const std::string& tag) {
  const fs::path base = fs::temp_directory_path() / "ship3d-tests";
  std::random_device rd;
  const fs::path dir = base / (tag + "-" + std::to_string(rd()));
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace ship3d::testing
