#include "ship3d/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "ship3d/error.hpp"

namespace ship3d {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw Error(ErrorCode::kInvalidArgument, "image dimensions must be >= 1");
  pixels.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

void RgbImage::validate() const {
  if (width < 1 || height < 1 ||
      pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    throw Error(ErrorCode::kInvariantViolation, "image: pixel count does not match dimensions");
  }
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be >= 0");
  bits.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

// RAII wrapper over the simplified libpng read API.
class PngReader {
 public:
  explicit PngReader(const std::string& path) {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image_, path.c_str())) {
      const std::string msg = image_.message;
      png_image_free(&image_);
      throw Error(ErrorCode::kIo, "cannot read PNG '" + path + "': " + msg);
    }
    path_ = path;
  }
  ~PngReader() { png_image_free(&image_); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  bool is_16bit() const { return (image_.format & PNG_FORMAT_FLAG_LINEAR) != 0; }

  RgbImage finish_rgb() {
    image_.format = PNG_FORMAT_RGB;
    RgbImage img(static_cast<int>(image_.width), static_cast<int>(image_.height));
    if (!png_image_finish_read(&image_, nullptr, img.pixels.data(), 0, nullptr)) {
      throw Error(ErrorCode::kIo, "cannot decode PNG '" + path_ + "': " + image_.message);
    }
    return img;
  }

 private:
  png_image image_;
  std::string path_;
};

void write_png(const std::string& path, int w, int h, png_uint_32 format,
               const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot write PNG '" + path + "': " + msg);
  }
}

}  // namespace

RgbImage load_image(const std::string& path) {
  PngReader reader(path);
  if (reader.is_16bit()) {
    throw Error(ErrorCode::kUnsupportedDepth, "'" + path + "': only 8-bit PNG is supported");
  }
  return reader.finish_rgb();
}

void save_image(const RgbImage& img, const std::string& path) {
  img.validate();
  write_png(path, img.width, img.height, PNG_FORMAT_RGB, img.pixels.data());
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  img.validate();
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

BinaryMask load_mask(const std::string& path, std::uint8_t threshold) {
  // Accept 16-bit masks too; the RGB8 conversion is adequate for a threshold.
  PngReader reader(path);
  const RgbImage img = reader.finish_rgb();
  BinaryMask mask(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const Rgb p = img.at(c, r);
      // Integer BT.601 luma; exact for gray pixels.
      const int luma = (299 * p.r + 587 * p.g + 114 * p.b + 500) / 1000;
      mask.set(c, r, luma >= threshold);
    }
  }
  return mask;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
  std::vector<std::uint8_t> gray(mask.bits.size());
  std::transform(mask.bits.begin(), mask.bits.end(), gray.begin(),
                 [](std::uint8_t b) { return b ? std::uint8_t{255} : std::uint8_t{0}; });
  write_png(path, mask.width, mask.height, PNG_FORMAT_GRAY, gray.data());
}

std::optional<PixelBox> mask_bbox(const BinaryMask& mask) {
  std::optional<PixelBox> box;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(c, r)) continue;
      if (!box) {
        box = PixelBox{c, r, c, r};
        continue;
      }
      box->min_col = std::min(box->min_col, c);
      box->max_col = std::max(box->max_col, c);
      box->max_row = r;
    }
  }
  return box;
}

std::array<double, 3> sample_bilinear(const RgbImage& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const std::uint8_t* p00 = &img.pixels[img.index(x0, y0)];
  const std::uint8_t* p10 = &img.pixels[img.index(x1, y0)];
  const std::uint8_t* p01 = &img.pixels[img.index(x0, y1)];
  const std::uint8_t* p11 = &img.pixels[img.index(x1, y1)];
  std::array<double, 3> out{};
  for (int k = 0; k < 3; ++k) {
    const double top = p00[k] + fx * (p10[k] - p00[k]);
    const double bottom = p01[k] + fx * (p11[k] - p01[k]);
    out[k] = top + fy * (bottom - top);
  }
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
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out_h; ++r) {
    const double y = (r + 0.5) * sy - 0.5;
    for (int c = 0; c < out_w; ++c) {
      const double x = (c + 0.5) * sx - 0.5;
      const auto v = sample_bilinear(img, x, y);
      const std::size_t i = out.index(c, r);
      for (int k = 0; k < 3; ++k) {
        out.pixels[i + k] = static_cast<std::uint8_t>(std::lround(v[k]));
      }
    }
  }
  return out;
}

}  // namespace ship3d
