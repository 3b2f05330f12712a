#pragma once

#include <cstdint>

#include "ship3d/raster.hpp"

namespace ship3d {

// Which mask area is scaled to `target_area_fraction` of the output frame.
enum class AreaMode {
  kBoundingBox,  // the mask's bounding box
  kMaskPixels,   // the count of set mask pixels
};

struct PreprocessConfig {
  double target_area_fraction = 0.65;
  int out_size = 128;
  std::uint8_t background_gray = 128;
  AreaMode area_mode = AreaMode::kBoundingBox;

  void validate() const;
};

// Placement of the mask bounding box inside the square output.
struct StandardizeLayout {
  PixelBox source_box;
  double scale = 1.0;
  int offset_col = 0;
  int offset_row = 0;
};

StandardizeLayout compute_layout(const BinaryMask& mask, const PreprocessConfig& cfg);

// Cuts the masked ship out of `img`, scales it about its bounding box and
// centers it on a uniform gray square. The mask is resampled nearest-neighbor
// and used as a stencil; ship pixels are resampled bilinearly.
RgbImage standardize_ship_image(const RgbImage& img, const BinaryMask& mask,
                                const PreprocessConfig& cfg = {});

// Output-space stencil matching standardize_ship_image (true = ship pixel).
BinaryMask standardized_stencil(const BinaryMask& mask, const PreprocessConfig& cfg = {});

}  // namespace ship3d
