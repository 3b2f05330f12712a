// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "ship3d/camera_rig.hpp"
#include "ship3d/metrics.hpp"
#include "ship3d/postprocess.hpp"
#include "ship3d/raster.hpp"
#include "ship3d/renderer.hpp"
#include "ship3d/serial.hpp"

using namespace ship3d;

namespace {

std::vector<Eigen::Vector3d> make_points(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

RgbImage make_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> b(0, 255);
  RgbImage img(w, h);
  for (auto& v : img.pixels) v = static_cast<std::uint8_t>(b(rng));
  return img;
}

StandardPointCloud make_cloud(std::size_t n) {
  StandardPointCloud c;
  c.positions = make_points(n);
  for (auto& p : c.positions) p *= 0.5;
  c.colors.assign(n, Rgb{200, 40, 40});
  return c;
}

void BM_Recenter(benchmark::State& s) {
  const auto pts = make_points(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(recenter(pts));
}
void BM_RecenterSerial(benchmark::State& s) {
  const auto pts = make_points(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(serial::recenter(pts));
}

void BM_Rotate(benchmark::State& s) {
  const auto pts = make_points(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(canonical_rotate(pts, kCanonicalRotation));
}
void BM_RotateSerial(benchmark::State& s) {
  const auto pts = make_points(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(serial::canonical_rotate(pts, kCanonicalRotation));
}

void BM_Resize(benchmark::State& s) {
  const auto img = make_image(640, 480, 2);
  for (auto _ : s) benchmark::DoNotOptimize(resize_bilinear(img, 128, 128));
}
void BM_ResizeSerial(benchmark::State& s) {
  const auto img = make_image(640, 480, 2);
  for (auto _ : s) benchmark::DoNotOptimize(serial::resize_bilinear(img, 128, 128));
}

void BM_Ssim(benchmark::State& s) {
  const auto a = make_image(128, 128, 3), b = make_image(128, 128, 4);
  for (auto _ : s) benchmark::DoNotOptimize(ssim(a, b));
}
void BM_SsimSerial(benchmark::State& s) {
  const auto a = make_image(128, 128, 3), b = make_image(128, 128, 4);
  for (auto _ : s) benchmark::DoNotOptimize(serial::ssim(a, b));
}

void BM_Render(benchmark::State& s) {
  const auto cloud = make_cloud(static_cast<std::size_t>(s.range(0)));
  const auto cam = sample_hemisphere_cameras(1, 5)[0];
  for (auto _ : s) benchmark::DoNotOptimize(render_points(cloud, cam));
}
void BM_RenderSerial(benchmark::State& s) {
  const auto cloud = make_cloud(static_cast<std::size_t>(s.range(0)));
  const auto cam = sample_hemisphere_cameras(1, 5)[0];
  for (auto _ : s) benchmark::DoNotOptimize(serial::render_points(cloud, cam));
}

}  // namespace

BENCHMARK(BM_Recenter)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_RecenterSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Rotate)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_RotateSerial)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_Resize);
BENCHMARK(BM_ResizeSerial);
BENCHMARK(BM_Ssim);
BENCHMARK(BM_SsimSerial);
BENCHMARK(BM_Render)->Arg(1 << 16);
BENCHMARK(BM_RenderSerial)->Arg(1 << 16);

BENCHMARK_MAIN();
