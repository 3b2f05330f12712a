#pragma once

#include <limits>
#include <vector>

#include "ship3d/raster.hpp"

namespace ship3d {

struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double peak = 255.0;
};

struct MetricsReport {
  double mse = 0.0;
  double psnr_db = std::numeric_limits<double>::infinity();  // +inf iff mse == 0
  double ssim = 1.0;
};

double mse(const RgbImage& a, const RgbImage& b);
// 10 log10(peak^2 / mse); +inf when the images are identical.
double psnr(const RgbImage& a, const RgbImage& b, double peak = 255.0);
// Mean SSIM over all fully-inside windows of the BT.601 luma, Gaussian
// weighted.
double ssim(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg = {});

MetricsReport evaluate(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg = {});

std::vector<double> luma(const RgbImage& img);
// Normalized 1-D Gaussian taps (sum 1); the 2-D window is their outer product.
std::vector<double> gaussian_taps(int window, double sigma);

}  // namespace ship3d
