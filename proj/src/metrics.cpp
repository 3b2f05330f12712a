#include "ship3d/metrics.hpp"

#include <cmath>

#include "ship3d/error.hpp"

namespace ship3d {

namespace {

void require_same_size(const RgbImage& a, const RgbImage& b) {
  a.validate();
  b.validate();
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch, "metrics: image dimensions differ");
  }
}

}  // namespace

std::vector<double> luma(const RgbImage& img) {
  std::vector<double> out(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] + 0.114 * img.pixels[3 * i + 2];
  }
  return out;
}

std::vector<double> gaussian_taps(int window, double sigma) {
  std::vector<double> g(static_cast<std::size_t>(window));
  const double c = (window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - c;
    g[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= sum;
  return g;
}

double mse(const RgbImage& a, const RgbImage& b) {
  require_same_size(a, b);
  const std::size_t rows = static_cast<std::size_t>(a.height);
  const std::size_t row_len = static_cast<std::size_t>(a.width) * 3;
  std::vector<double> row_sum(rows, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * row_len;
    // Squared byte differences are integers; the row sum is exact.
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < row_len; ++k) {
      const int d = static_cast<int>(a.pixels[base + k]) - static_cast<int>(b.pixels[base + k]);
      s += static_cast<std::uint64_t>(d * d);
    }
    row_sum[static_cast<std::size_t>(r)] = static_cast<double>(s);
  }
  double total = 0.0;
  for (double s : row_sum) total += s;
  return total / static_cast<double>(a.pixels.size());
}

double psnr(const RgbImage& a, const RgbImage& b, double peak) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double ssim(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg) {
  require_same_size(a, b);
  if (cfg.window < 1 || a.width < cfg.window || a.height < cfg.window) {
    throw Error(ErrorCode::kDimensionMismatch, "ssim: image smaller than window");
  }
  const int w = a.width;
  const int h = a.height;
  const int win = cfg.window;
  const int out_w = w - win + 1;
  const int out_h = h - win + 1;
  const auto x = luma(a);
  const auto y = luma(b);
  const auto g = gaussian_taps(win, cfg.sigma);
  const double c1 = (cfg.k1 * cfg.peak) * (cfg.k1 * cfg.peak);
  const double c2 = (cfg.k2 * cfg.peak) * (cfg.k2 * cfg.peak);

  // Horizontal pass of the five moment images, valid columns only.
  constexpr int kMoments = 5;
  const std::size_t plane = static_cast<std::size_t>(out_w) * static_cast<std::size_t>(h);
  std::vector<double> horiz(kMoments * plane);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      double m[kMoments] = {0, 0, 0, 0, 0};
      for (int k = 0; k < win; ++k) {
        const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(w) +
                              static_cast<std::size_t>(c + k);
        const double gk = g[static_cast<std::size_t>(k)];
        m[0] += gk * x[i];
        m[1] += gk * y[i];
        m[2] += gk * x[i] * x[i];
        m[3] += gk * y[i] * y[i];
        m[4] += gk * x[i] * y[i];
      }
      const std::size_t o = static_cast<std::size_t>(r) * static_cast<std::size_t>(out_w) +
                            static_cast<std::size_t>(c);
      for (int q = 0; q < kMoments; ++q) horiz[static_cast<std::size_t>(q) * plane + o] = m[q];
    }
  }

  std::vector<double> row_sum(static_cast<std::size_t>(out_h), 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < out_h; ++r) {
    double acc = 0.0;
    for (int c = 0; c < out_w; ++c) {
      double m[kMoments] = {0, 0, 0, 0, 0};
      for (int k = 0; k < win; ++k) {
        const std::size_t o = static_cast<std::size_t>(r + k) * static_cast<std::size_t>(out_w) +
                              static_cast<std::size_t>(c);
        const double gk = g[static_cast<std::size_t>(k)];
        for (int q = 0; q < kMoments; ++q) m[q] += gk * horiz[static_cast<std::size_t>(q) * plane + o];
      }
      const double mx = m[0], my = m[1];
      const double vx = m[2] - mx * mx;
      const double vy = m[3] - my * my;
      const double cxy = m[4] - mx * my;
      acc += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    row_sum[static_cast<std::size_t>(r)] = acc;
  }
  double total = 0.0;
  for (double s : row_sum) total += s;
  return total / (static_cast<double>(out_w) * static_cast<double>(out_h));
}

MetricsReport evaluate(const RgbImage& a, const RgbImage& b, const SsimConfig& cfg) {
  MetricsReport r;
  r.mse = mse(a, b);
  r.psnr_db = r.mse == 0.0 ? std::numeric_limits<double>::infinity()
                           : 10.0 * std::log10(cfg.peak * cfg.peak / r.mse);
  r.ssim = ssim(a, b, cfg);
  return r;
}

}  // namespace ship3d
