#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ship3d/pipeline.hpp"
#include "ship3d/raster.hpp"
#include "ship3d/splat_io.hpp"

using namespace ship3d;
namespace fs = std::filesystem;

namespace {

PipelineConfig fixture_config(const testing::FixtureSet& f, const std::string& out_dir) {
  PipelineConfig cfg;
  cfg.scene_image = f.scene_png;
  cfg.mask = f.mask_png;
  cfg.gaussian_ply = f.gaussians_ply;
  cfg.ais_json = f.ais_json;
  cfg.calibration_json = f.calib_json;
  cfg.output_dir = out_dir;
  return cfg;
}

oracle::Mat3 fixture_h() {
  const auto h = testing::fixture_homography();
  oracle::Mat3 o{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) o[i][j] = h(i, j);
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("SHIP3D_LOG=quiet ") + SHIP3D_CLI_PATH + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture_cli(const std::string& args) {
  const std::string cmd = std::string("SHIP3D_LOG=quiet ") + SHIP3D_CLI_PATH + " " + args + " 2>&1";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  pclose(p);
  return out;
}

}  // namespace

TEST_CASE("fixture run writes all outputs") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  const auto out = run_pipeline(fixture_config(f, dir + "/out"));
  for (const auto& p : {out.standardized_png, out.ship_ply, out.placement_geojson, out.manifest_json}) {
    CHECK(fs::exists(p));
  }
  const auto img = load_image(out.standardized_png);
  CHECK(img.width == 128);
  CHECK(img.height == 128);
  CHECK(img.at(0, 0) == Rgb{128, 128, 128});

  const auto cloud = read_standard_ply(read_file_bytes(out.ship_ply));
  CHECK(cloud.size() == testing::fixture_cloud().size() - 3);
  double lo = 1e300, hi = -1e300;
  for (const auto& p : cloud.positions) {
    lo = std::min(lo, p.z());
    hi = std::max(hi, p.z());
  }
  CHECK(hi - lo == doctest::Approx(50.0).epsilon(1e-6));

  const auto m = read_json_file(out.manifest_json);
  CHECK(m["version"] == kToolVersion);
  CHECK(m["inputs"]["gaussian_ply"]["sha256"] == sha256_hex(read_file_bytes(f.gaussians_ply)));
  CHECK(m["stats"]["postprocess"]["retained_points"].get<std::size_t>() == cloud.size());
  CHECK(m["stats"]["georef"]["source"] == "homography");
}

TEST_CASE("placement equals the homography oracle at the key pixel") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  const auto out = run_pipeline(fixture_config(f, dir + "/out"));
  const auto gj = read_json_file(out.placement_geojson);
  REQUIRE(gj["features"].size() == 1);
  const auto& feat = gj["features"][0];
  // Mask spans cols 100..219, rows 120..159: bottom row 159, midpoint col 159.
  CHECK(feat["properties"]["source_pixel"][0].get<int>() == 159);
  CHECK(feat["properties"]["source_pixel"][1].get<int>() == 159);
  const auto expected = oracle::project(fixture_h(), 159, 159);
  CHECK(std::abs(feat["geometry"]["coordinates"][0].get<double>() - expected[0]) <= 1e-9);
  CHECK(std::abs(feat["geometry"]["coordinates"][1].get<double>() - expected[1]) <= 1e-9);
  CHECK(feat["properties"]["length_m"].get<double>() == 50.0);
  CHECK(feat["properties"]["model_uri"] == "ship.ply");
  CHECK(feat["properties"]["identity"] == "211000000");
}

TEST_CASE("ais fallback without calibration") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  auto cfg = fixture_config(f, dir + "/out");
  cfg.calibration_json.reset();
  const auto out = run_pipeline(cfg);
  const auto gj = read_json_file(out.placement_geojson);
  CHECK(gj["features"][0]["geometry"]["coordinates"][0].get<double>() == 8.55);
  CHECK(gj["features"][0]["geometry"]["coordinates"][1].get<double>() == 53.55);
  CHECK(out.manifest["stats"]["georef"]["source"] == "ais");
}

TEST_CASE("missing ais length fails in the georef stage") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  write_json_file(f.ais_json, {{"lat", 53.55}, {"lon", 8.55}});
  auto cfg = fixture_config(f, dir + "/out");
  try {
    run_pipeline(cfg);
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(e.stage() == "georef");
    CHECK(std::string(e.what()) == "georef: length_m required");
  }
  cfg.postprocess.target_length_m = 33.0;
  const auto out = run_pipeline(cfg);
  CHECK(out.manifest["config"]["postprocess"]["target_length_m"].get<double>() == 33.0);
}

TEST_CASE("empty mask fails in the preprocess stage") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  save_mask(BinaryMask(320, 240), f.mask_png);
  try {
    run_pipeline(fixture_config(f, dir + "/out"));
    FAIL("expected a pipeline error");
  } catch (const PipelineError& e) {
    CHECK(std::string(e.what()) == "preprocess: no ship in mask");
  }
}

TEST_CASE("reruns are byte identical") {
  const auto dir = testing::make_temp_dir("pipeline");
  const auto f = testing::write_fixture_set(dir + "/in");
  const auto cfg = fixture_config(f, dir + "/out");
  const auto a = run_pipeline(cfg);
  const auto bytes_png = read_file_bytes(a.standardized_png);
  const auto bytes_ply = read_file_bytes(a.ship_ply);
  const auto bytes_geo = read_file_bytes(a.placement_geojson);
  const auto bytes_man = read_file_bytes(a.manifest_json);
  const auto b = run_pipeline(cfg);
  CHECK(read_file_bytes(b.standardized_png) == bytes_png);
  CHECK(read_file_bytes(b.ship_ply) == bytes_ply);
  CHECK(read_file_bytes(b.placement_geojson) == bytes_geo);
  CHECK(read_file_bytes(b.manifest_json) == bytes_man);
}

TEST_CASE("sha256 and enum names") {
  const std::string abc = "abc";
  CHECK(sha256_hex(std::vector<std::uint8_t>(abc.begin(), abc.end())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(parse_key_pixel_strategy(to_string(KeyPixelStrategy::kBottomOfCentroidColumn)) ==
        KeyPixelStrategy::kBottomOfCentroidColumn);
  CHECK(parse_area_mode(to_string(AreaMode::kMaskPixels)) == AreaMode::kMaskPixels);
  CHECK_THROWS_AS(parse_area_mode("circle"), Error);
  CHECK_THROWS_AS(parse_key_pixel_strategy("top"), Error);
}

TEST_CASE("cli subcommands and exit codes") {
  const auto dir = testing::make_temp_dir("cli");
  const auto f = testing::write_fixture_set(dir + "/in");
  const std::string o = dir + "/o";
  fs::create_directories(o);

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("preprocess --image " + f.scene_png + " --mask " + f.mask_png + " --out " + o + "/std.png") == 0);
  CHECK(load_image(o + "/std.png").width == 128);
  CHECK(run_cli("postprocess --in " + f.gaussians_ply + " --out " + o + "/ship.ply --length-m 50") == 0);
  CHECK(run_cli("georef --mask " + f.mask_png + " --calib " + f.calib_json + " --ais " + f.ais_json +
                " --model ship.ply --out " + o + "/p.geojson") == 0);
  CHECK(run_cli("cameras --n 4 --seed 3 --out " + o + "/cams.json") == 0);
  CHECK(run_cli("render --ply " + o + "/ship.ply --camera " + o + "/cams.json#2 --out " + o + "/view.png") == 0);
  CHECK(run_cli("render --ply " + o + "/ship.ply --camera " + o + "/cams.json#9 --out " + o + "/bad.png") == 1);
  CHECK(run_cli("run --image " + f.scene_png + " --mask " + f.mask_png + " --gaussians " + f.gaussians_ply +
                " --ais " + f.ais_json + " --calib " + f.calib_json + " --out-dir " + o + "/run") == 0);

  // The CLI and library agree on the placement.
  const auto lib = run_pipeline(fixture_config(f, dir + "/lib"));
  CHECK(read_file_bytes(o + "/run/placement.geojson") == read_file_bytes(lib.placement_geojson));
  CHECK(read_file_bytes(o + "/run/ship.ply") == read_file_bytes(lib.ship_ply));
  CHECK(read_file_bytes(o + "/p.geojson") == read_file_bytes(lib.placement_geojson));

  const auto same = capture_cli("metrics --a " + f.scene_png + " --b " + f.scene_png + " --json");
  const auto j = nlohmann::json::parse(same);
  CHECK(j["mse"].get<double>() == 0.0);
  CHECK(j["psnr_db"] == "inf");
  CHECK(j["ssim"].get<double>() == doctest::Approx(1.0));

  {
    std::ofstream cfg(o + "/run.toml");
    cfg << "[run]\nfraction = 0.5\nlength-m = 40\n";
  }
  const std::string base = "run --image " + f.scene_png + " --mask " + f.mask_png + " --gaussians " +
                           f.gaussians_ply + " --ais " + f.ais_json + " --config " + o + "/run.toml";
  REQUIRE(run_cli(base + " --out-dir " + o + "/cfg") == 0);
  const auto from_file = read_json_file(o + "/cfg/manifest.json")["config"];
  CHECK(from_file["preprocess"]["target_area_fraction"].get<double>() == 0.5);
  CHECK(from_file["postprocess"]["target_length_m"].get<double>() == 40.0);
  REQUIRE(run_cli(base + " --fraction 0.6 --out-dir " + o + "/cfg2") == 0);
  CHECK(read_json_file(o + "/cfg2/manifest.json")["config"]["preprocess"]["target_area_fraction"].get<double>() ==
        0.6);

  write_json_file(f.ais_json, {{"lat", 53.55}, {"lon", 8.55}});
  const auto err = capture_cli("run --image " + f.scene_png + " --mask " + f.mask_png + " --gaussians " +
                               f.gaussians_ply + " --ais " + f.ais_json + " --out-dir " + o + "/run2");
  CHECK(err.find("georef: length_m required") != std::string::npos);
  CHECK(run_cli("run --image " + f.scene_png + " --mask " + f.mask_png + " --gaussians " + f.gaussians_ply +
                " --ais " + f.ais_json + " --out-dir " + o + "/run2") == 1);
  CHECK(run_cli("postprocess --in /nonexistent.ply --out x.ply --length-m 5") != 0);
}
