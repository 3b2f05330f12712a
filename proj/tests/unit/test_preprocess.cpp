#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "ship3d/error.hpp"
#include "ship3d/preprocess.hpp"

using namespace ship3d;

namespace {

BinaryMask rect_mask(int w, int h, int c0, int r0, int bw, int bh) {
  BinaryMask m(w, h);
  for (int r = r0; r < r0 + bh; ++r)
    for (int c = c0; c < c0 + bw; ++c) m.set(c, r, true);
  return m;
}

bool is_gray(Rgb p, std::uint8_t g) { return p.r == g && p.g == g && p.b == g; }

}  // namespace

TEST_CASE("square bbox scales to a 103 px side") {
  std::mt19937_64 rng(1);
  const auto img = testing::random_image(rng, 200, 200);
  const auto mask = rect_mask(200, 200, 30, 60, 50, 50);
  const auto layout = compute_layout(mask, {});
  CHECK(layout.scale * 50 == doctest::Approx(std::sqrt(0.65) * 128).epsilon(1e-12));

  const auto stencil = standardized_stencil(mask);
  const auto box = mask_bbox(stencil);
  REQUIRE(box.has_value());
  CHECK(box->width() == 103);
  CHECK(box->height() == 103);
  CHECK(stencil.count() == 103u * 103u);

  const auto out = standardize_ship_image(img, mask);
  CHECK(out.width == 128);
  CHECK(out.height == 128);
}

TEST_CASE("full-frame mask at fraction 1 leaves no background") {
  std::mt19937_64 rng(2);
  const auto img = testing::random_image(rng, 128, 128);
  const BinaryMask mask(128, 128, true);
  PreprocessConfig cfg;
  cfg.target_area_fraction = 1.0;
  const auto layout = compute_layout(mask, cfg);
  CHECK(layout.scale == 1.0);
  CHECK(layout.offset_col == 0);
  CHECK(layout.offset_row == 0);
  CHECK(standardized_stencil(mask, cfg).count() == 128u * 128u);
  // Unit scale with pixel-center alignment reproduces the input exactly.
  CHECK(standardize_ship_image(img, mask, cfg) == img);
}

TEST_CASE("extreme aspect is clamped by the width term") {
  const RgbImage img(1100, 40, {200, 10, 10});
  const auto mask = rect_mask(1100, 40, 50, 15, 1000, 10);
  const auto layout = compute_layout(mask, {});
  CHECK(layout.scale == doctest::Approx(128.0 / 1000.0).epsilon(1e-15));
  const auto box = mask_bbox(standardized_stencil(mask));
  REQUIRE(box.has_value());
  CHECK(box->width() == 128);
  const auto out = standardize_ship_image(img, mask);
  CHECK(out.at(0, box->min_row) == Rgb{200, 10, 10});
  CHECK(out.at(127, box->min_row) == Rgb{200, 10, 10});
}

TEST_CASE("every output pixel is either background or stencil") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 60 + trial * 7, h = 50 + trial * 3;
    BinaryMask mask(w, h);
    // Elliptical blob so the stencil is not a rectangle.
    const double cx = w * (0.3 + 0.4 * u(rng)), cy = h * (0.3 + 0.4 * u(rng));
    const double ax = 5 + 20 * u(rng), ay = 4 + 15 * u(rng);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const double dx = (c - cx) / ax, dy = (r - cy) / ay;
        if (dx * dx + dy * dy <= 1.0) mask.set(c, r, true);
      }
    // Ship pixels never take the background value, so provenance is visible.
    const RgbImage img(w, h, {250, 5, 90});
    const auto out = standardize_ship_image(img, mask);
    const auto stencil = standardized_stencil(mask);
    std::size_t background = 0;
    for (int r = 0; r < 128; ++r)
      for (int c = 0; c < 128; ++c) {
        if (stencil.at(c, r)) {
          CHECK(out.at(c, r) == Rgb{250, 5, 90});
        } else {
          CHECK(is_gray(out.at(c, r), 128));
          ++background;
        }
      }
    CHECK(background + stencil.count() == 128u * 128u);
  }
}

TEST_CASE("non-clamped boxes are centered and hit the target fraction") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> side(10, 150);
  int checked = 0;
  while (checked < 200) {
    const int bw = side(rng), bh = side(rng);
    const double s = std::sqrt(0.65 * 128 * 128 / (double(bw) * bh));
    if (s * bw > 128 || s * bh > 128) continue;  // a clamp term is active
    ++checked;
    const auto mask = rect_mask(bw + 20, bh + 20, 10, 10, bw, bh);
    const auto box = mask_bbox(standardized_stencil(mask));
    REQUIRE(box.has_value());
    const double frac = double(box->width()) * box->height() / (128.0 * 128.0);
    CHECK(std::abs(frac / 0.65 - 1.0) <= 0.03);
    const double cx = (box->min_col + box->max_col + 1) / 2.0;
    const double cy = (box->min_row + box->max_row + 1) / 2.0;
    CHECK(std::abs(cx - 64.0) <= 1.0);
    CHECK(std::abs(cy - 64.0) <= 1.0);
  }
}

TEST_CASE("mask-pixel area mode") {
  // A half-filled 40x40 bbox: pixel-area mode scales by sqrt(2) more.
  BinaryMask mask(60, 60);
  for (int r = 10; r < 50; ++r)
    for (int c = 10; c < 50; ++c)
      if (c < 30 || r == 10 || r == 49) mask.set(c, r, true);
  PreprocessConfig cfg;
  const double bbox_scale = compute_layout(mask, cfg).scale;
  cfg.area_mode = AreaMode::kMaskPixels;
  const double pixel_scale = compute_layout(mask, cfg).scale;
  const double expected = std::sqrt(0.65 * 128 * 128 / double(mask.count()));
  CHECK(pixel_scale == doctest::Approx(std::min(expected, 128.0 / 40)).epsilon(1e-15));
  CHECK(pixel_scale > bbox_scale);
}

TEST_CASE("custom size and gray") {
  const RgbImage img(30, 30, {1, 2, 3});
  const auto mask = rect_mask(30, 30, 5, 5, 4, 4);
  PreprocessConfig cfg;
  cfg.out_size = 64;
  cfg.background_gray = 17;
  const auto out = standardize_ship_image(img, mask, cfg);
  CHECK(out.width == 64);
  CHECK(out.height == 64);
  CHECK(out.at(0, 0) == Rgb{17, 17, 17});
  CHECK(out.at(32, 32) == Rgb{1, 2, 3});
}

TEST_CASE("preprocess errors") {
  const RgbImage img(10, 10);
  try {
    standardize_ship_image(img, BinaryMask(10, 10));
    FAIL("expected empty-mask error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyMask);
    CHECK(std::string(e.what()) == "no ship in mask");
  }
  CHECK_THROWS_AS(standardize_ship_image(img, BinaryMask(10, 11, true)), Error);

  PreprocessConfig bad;
  bad.target_area_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.target_area_fraction = 1.01;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = {};
  bad.out_size = 7;
  CHECK_THROWS_AS(bad.validate(), Error);
}
