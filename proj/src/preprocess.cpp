#include "ship3d/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "ship3d/error.hpp"

namespace ship3d {

void PreprocessConfig::validate() const {
  if (!(target_area_fraction > 0.0 && target_area_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "preprocess: target_area_fraction must be in (0, 1]");
  }
  if (out_size < 8) throw Error(ErrorCode::kInvalidArgument, "preprocess: out_size must be >= 8");
}

StandardizeLayout compute_layout(const BinaryMask& mask, const PreprocessConfig& cfg) {
  cfg.validate();
  const auto box = mask_bbox(mask);
  if (!box) throw Error(ErrorCode::kEmptyMask, "no ship in mask");

  const double size = cfg.out_size;
  const double bw = box->width();
  const double bh = box->height();
  const double area = cfg.area_mode == AreaMode::kBoundingBox
                          ? bw * bh
                          : static_cast<double>(mask.count());

  StandardizeLayout layout;
  layout.source_box = *box;
  layout.scale = std::min({std::sqrt(cfg.target_area_fraction * size * size / area),
                           size / bw, size / bh});
  layout.offset_col = static_cast<int>(std::floor((size - layout.scale * bw) / 2.0));
  layout.offset_row = static_cast<int>(std::floor((size - layout.scale * bh) / 2.0));
  return layout;
}

namespace {

// Continuous source offset (relative to the bbox origin edge) of an output
// pixel center.
inline double source_offset(int out_index, int offset, double scale) {
  return (out_index + 0.5 - offset) / scale;
}

}  // namespace

BinaryMask standardized_stencil(const BinaryMask& mask, const PreprocessConfig& cfg) {
  const StandardizeLayout layout = compute_layout(mask, cfg);
  const PixelBox& box = layout.source_box;
  BinaryMask out(cfg.out_size, cfg.out_size);
  for (int r = 0; r < cfg.out_size; ++r) {
    const double dv = source_offset(r, layout.offset_row, layout.scale);
    if (dv < 0.0 || dv >= box.height()) continue;
    const int src_r = box.min_row + static_cast<int>(std::floor(dv));
    for (int c = 0; c < cfg.out_size; ++c) {
      const double du = source_offset(c, layout.offset_col, layout.scale);
      if (du < 0.0 || du >= box.width()) continue;
      const int src_c = box.min_col + static_cast<int>(std::floor(du));
      out.set(c, r, mask.at(src_c, src_r));
    }
  }
  return out;
}

RgbImage standardize_ship_image(const RgbImage& img, const BinaryMask& mask,
                                const PreprocessConfig& cfg) {
  img.validate();
  if (img.width != mask.width || img.height != mask.height) {
    throw Error(ErrorCode::kDimensionMismatch, "image and mask dimensions differ");
  }
  const StandardizeLayout layout = compute_layout(mask, cfg);
  const BinaryMask stencil = standardized_stencil(mask, cfg);
  const PixelBox& box = layout.source_box;
  const std::uint8_t g = cfg.background_gray;
  RgbImage out(cfg.out_size, cfg.out_size, Rgb{g, g, g});

#pragma omp parallel for schedule(static)
  for (int r = 0; r < cfg.out_size; ++r) {
    const double y = box.min_row + source_offset(r, layout.offset_row, layout.scale) - 0.5;
    for (int c = 0; c < cfg.out_size; ++c) {
      if (!stencil.at(c, r)) continue;
      const double x = box.min_col + source_offset(c, layout.offset_col, layout.scale) - 0.5;
      const auto v = sample_bilinear(img, x, y);
      out.set(c, r, Rgb{static_cast<std::uint8_t>(std::lround(v[0])),
                        static_cast<std::uint8_t>(std::lround(v[1])),
                        static_cast<std::uint8_t>(std::lround(v[2]))});
    }
  }
  return out;
}

}  // namespace ship3d
