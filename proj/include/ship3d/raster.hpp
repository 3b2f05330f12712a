#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ship3d/splat_io.hpp"

namespace ship3d {

// Row-major, 3 bytes per pixel.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});

  Rgb at(int col, int row) const {
    const std::size_t i = index(col, row);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int col, int row, Rgb c) {
    const std::size_t i = index(col, row);
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }
  std::size_t index(int col, int row) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(col)) * 3;
  }
  void validate() const;

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

// One byte per pixel, 0 or 1.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false);

  bool at(int col, int row) const {
    return bits[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col)] != 0;
  }
  void set(int col, int row, bool v) {
    bits[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
         static_cast<std::size_t>(col)] = v ? 1 : 0;
  }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// Inclusive pixel bounds.
struct PixelBox {
  int min_col = 0;
  int min_row = 0;
  int max_col = 0;
  int max_row = 0;

  int width() const { return max_col - min_col + 1; }
  int height() const { return max_row - min_row + 1; }
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// 8-bit PNG only; grayscale is promoted to (v, v, v), alpha is dropped.
RgbImage load_image(const std::string& path);
void save_image(const RgbImage& img, const std::string& path);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

BinaryMask load_mask(const std::string& path, std::uint8_t threshold = 128);
// Written as a 0/255 grayscale PNG.
void save_mask(const BinaryMask& mask, const std::string& path);

std::optional<PixelBox> mask_bbox(const BinaryMask& mask);

// Half-pixel-center bilinear resampling, rounded to nearest byte.
RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h);

// Bilinear sample at continuous source coordinates (pixel centers at
// integers), clamped to the image. Returns per-channel doubles.
std::array<double, 3> sample_bilinear(const RgbImage& img, double x, double y);

}  // namespace ship3d
