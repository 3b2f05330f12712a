// ship3d command-line front end. Log verbosity comes from SHIP3D_LOG
// (quiet | info | debug; default info).

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ship3d/camera_rig.hpp"
#include "ship3d/error.hpp"
#include "ship3d/georef.hpp"
#include "ship3d/metrics.hpp"
#include "ship3d/pipeline.hpp"
#include "ship3d/postprocess.hpp"
#include "ship3d/preprocess.hpp"
#include "ship3d/raster.hpp"
#include "ship3d/renderer.hpp"
#include "ship3d/splat_io.hpp"

namespace {

using namespace ship3d;

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("SHIP3D_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "quiet" || v == "0") return LogLevel::kQuiet;
  if (v == "debug" || v == "2") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void log(LogLevel level, const std::string& msg) {
  if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << "\n";
}

RotationAngles parse_rotation(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "--rot: '" + item + "' is not a number");
    }
  }
  if (v.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--rot expects three comma-separated radians");
  return {v[0], v[1], v[2]};
}

std::string format_rotation(const RotationAngles& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.x << "," << r.y << "," << r.z;
  return os.str();
}

void print_metrics(const MetricsReport& m, bool json) {
  if (json) {
    nlohmann::json j = {{"mse", m.mse}, {"ssim", m.ssim}};
    // JSON has no infinity; identical images report the string "inf".
    if (std::isinf(m.psnr_db)) j["psnr_db"] = "inf";
    else j["psnr_db"] = m.psnr_db;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ostringstream os;
  os.precision(10);
  os << "mse " << m.mse << "\npsnr_db " << (std::isinf(m.psnr_db) ? std::string("inf") : std::to_string(m.psnr_db))
     << "\nssim " << m.ssim << "\n";
  std::cout << os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-view ship reconstruction postprocessing and georeferencing toolkit"};
  app.require_subcommand(1);
  // Options for `run` may also come from the [run] section of this file.
  app.set_config("--config", "", "TOML/INI file; command-line flags take precedence");
  app.set_version_flag("--version", std::string(kToolVersion));

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Standardize a ship image for the reconstruction network");
  std::string pre_image, pre_mask, pre_out, pre_area = "bbox";
  PreprocessConfig pre_cfg;
  int pre_gray = pre_cfg.background_gray;
  pre->add_option("--image", pre_image, "Scene image (PNG)")->required()->check(CLI::ExistingFile);
  pre->add_option("--mask", pre_mask, "Ship mask (PNG, >=128 is ship)")->required()->check(CLI::ExistingFile);
  pre->add_option("--out", pre_out, "Output PNG")->required();
  pre->add_option("--fraction", pre_cfg.target_area_fraction, "Target area fraction")->capture_default_str();
  pre->add_option("--size", pre_cfg.out_size, "Output side length in pixels")->capture_default_str();
  pre->add_option("--gray", pre_gray, "Background gray level")->check(CLI::Range(0, 255))->capture_default_str();
  pre->add_option("--area-mode", pre_area, "bbox | mask-pixels")->capture_default_str();

  // postprocess
  auto* post = app.add_subcommand("postprocess", "Filter, align and scale a Gaussian splat PLY");
  std::string post_in, post_out, post_rot = format_rotation(kCanonicalRotation);
  PostprocessConfig post_cfg;
  post->add_option("--in", post_in, "Gaussian splat PLY")->required()->check(CLI::ExistingFile);
  post->add_option("--out", post_out, "Standard PLY output")->required();
  post->add_option("--length-m", post_cfg.target_length_m, "Ship length in meters")->required();
  post->add_option("--opacity-threshold", post_cfg.opacity_threshold, "Opacity logit threshold")->capture_default_str();
  post->add_option("--rot", post_rot, "Rotation angles x,y,z in radians")->capture_default_str();

  // georef
  auto* geo = app.add_subcommand("georef", "Place a model on the map from its mask");
  std::string geo_mask, geo_calib, geo_ais, geo_model, geo_out, geo_strategy = "bottom-center-bbox";
  std::string geo_rot = format_rotation(kCanonicalRotation);
  geo->add_option("--mask", geo_mask, "Ship mask (PNG)")->required()->check(CLI::ExistingFile);
  geo->add_option("--calib", geo_calib, "Calibration JSON (correspondences or matrix)")->check(CLI::ExistingFile);
  geo->add_option("--ais", geo_ais, "AIS JSON")->required()->check(CLI::ExistingFile);
  geo->add_option("--model", geo_model, "Model URI written into the placement")->required();
  geo->add_option("--out", geo_out, "Placement GeoJSON")->required();
  geo->add_option("--strategy", geo_strategy, "bottom-center-bbox | bottom-of-centroid-column")->capture_default_str();
  geo->add_option("--rot", geo_rot, "Rotation angles recorded for the viewer")->capture_default_str();

  // cameras
  auto* cams = app.add_subcommand("cameras", "Sample hemisphere cameras for synthetic renders");
  int cam_n = 16;
  std::uint64_t cam_seed = 0;
  double cam_radius = kUnitCubeCircumradius;
  std::string cam_out;
  CameraIntrinsics cam_intr;
  cams->add_option("--n", cam_n, "Number of cameras")->capture_default_str();
  cams->add_option("--seed", cam_seed, "Generator seed")->capture_default_str();
  cams->add_option("--radius", cam_radius, "Hemisphere radius")->capture_default_str();
  cams->add_option("--fov", cam_intr.fov_deg, "Vertical FOV in degrees")->capture_default_str();
  cams->add_option("--near", cam_intr.z_near, "Near plane")->capture_default_str();
  cams->add_option("--far", cam_intr.z_far, "Far plane")->capture_default_str();
  cams->add_option("--width", cam_intr.width, "Image width")->capture_default_str();
  cams->add_option("--height", cam_intr.height, "Image height")->capture_default_str();
  cams->add_option("--out", cam_out, "Output JSON")->required();

  // render
  auto* ren = app.add_subcommand("render", "Rasterize a standard PLY from a camera");
  std::string ren_ply, ren_cam, ren_out;
  RenderConfig ren_cfg;
  ren->add_option("--ply", ren_ply, "Standard PLY")->required()->check(CLI::ExistingFile);
  ren->add_option("--camera", ren_cam, "cams.json#index")->required();
  ren->add_option("--out", ren_out, "Output PNG")->required();
  ren->add_option("--point-radius", ren_cfg.point_radius_px, "Splat radius in pixels")->capture_default_str();

  // metrics
  auto* met = app.add_subcommand("metrics", "MSE / PSNR / SSIM between two images");
  std::string met_a, met_b;
  bool met_json = false;
  met->add_option("--a", met_a, "First image")->required()->check(CLI::ExistingFile);
  met->add_option("--b", met_b, "Second image")->required()->check(CLI::ExistingFile);
  met->add_flag("--json", met_json, "Print JSON");

  // run
  auto* run = app.add_subcommand("run", "End-to-end pipeline for one ship");
  run->fallthrough();
  PipelineConfig run_cfg;
  std::string run_calib, run_rot = format_rotation(kCanonicalRotation), run_strategy = "bottom-center-bbox";
  std::string run_area = "bbox";
  int run_gray = run_cfg.preprocess.background_gray;
  int run_mask_threshold = run_cfg.mask_threshold;
  run->add_option("--image", run_cfg.scene_image, "Scene image (PNG)")->required()->check(CLI::ExistingFile);
  run->add_option("--mask", run_cfg.mask, "Ship mask (PNG)")->required()->check(CLI::ExistingFile);
  run->add_option("--gaussians", run_cfg.gaussian_ply, "Reconstructed Gaussian PLY")->required()->check(CLI::ExistingFile);
  run->add_option("--ais", run_cfg.ais_json, "AIS JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--calib", run_calib, "Calibration JSON")->check(CLI::ExistingFile);
  run->add_option("--out-dir", run_cfg.output_dir, "Output directory")->required();
  run->add_option("--fraction", run_cfg.preprocess.target_area_fraction)->capture_default_str();
  run->add_option("--size", run_cfg.preprocess.out_size)->capture_default_str();
  run->add_option("--gray", run_gray)->check(CLI::Range(0, 255))->capture_default_str();
  run->add_option("--area-mode", run_area)->capture_default_str();
  run->add_option("--mask-threshold", run_mask_threshold)->check(CLI::Range(0, 255))->capture_default_str();
  run->add_option("--opacity-threshold", run_cfg.postprocess.opacity_threshold)->capture_default_str();
  run->add_option("--rot", run_rot)->capture_default_str();
  run->add_option("--length-m", run_cfg.postprocess.target_length_m, "Override the AIS length");
  run->add_option("--strategy", run_strategy)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (cmd == "preprocess") {
      pre_cfg.background_gray = static_cast<std::uint8_t>(pre_gray);
      pre_cfg.area_mode = parse_area_mode(pre_area);
      const RgbImage out = standardize_ship_image(load_image(pre_image), load_mask(pre_mask), pre_cfg);
      save_image(out, pre_out);
      log(LogLevel::kInfo, "wrote " + pre_out);
    } else if (cmd == "postprocess") {
      post_cfg.rotation_angles = parse_rotation(post_rot);
      const auto cloud = read_gaussian_ply(read_file_bytes(post_in));
      const ExportResult res = export_chain_detailed(cloud, post_cfg);
      write_file_bytes(post_out, write_standard_ply(res.cloud));
      log(LogLevel::kInfo, "kept " + std::to_string(res.stats.retained_count) + " of " +
                               std::to_string(res.stats.input_count) + " points, scale " +
                               std::to_string(res.stats.scale_factor) + "; wrote " + post_out);
    } else if (cmd == "georef") {
      const BinaryMask mask = load_mask(geo_mask);
      const PixelCoord key = select_key_pixel(mask, parse_key_pixel_strategy(geo_strategy));
      const AisRecord ais = parse_ais(read_json_file(geo_ais));
      if (!ais.length_m) throw PipelineError("georef", Error(ErrorCode::kInvalidArgument, "length_m required"));
      GeoPoint g;
      if (!geo_calib.empty()) {
        const Calibration cal = parse_calibration(read_json_file(geo_calib));
        g = apply_homography(cal.fit.homography, Eigen::Vector2d(key.col, key.row));
        log(LogLevel::kDebug, "homography mean residual " + std::to_string(cal.fit.mean_residual));
      } else if (ais.lat && ais.lon) {
        g = {*ais.lat, *ais.lon};
      } else {
        throw Error(ErrorCode::kInvalidArgument, "need --calib or AIS lat/lon");
      }
      const auto rec = make_placement(g, ais, geo_model, parse_rotation(geo_rot), key);
      write_json_file(geo_out, to_feature_collection({rec}));
      log(LogLevel::kInfo, "key pixel (" + std::to_string(key.col) + ", " + std::to_string(key.row) +
                               "); wrote " + geo_out);
    } else if (cmd == "cameras") {
      write_json_file(cam_out, cameras_to_json(sample_hemisphere_cameras(cam_n, cam_seed, cam_radius, cam_intr)));
      log(LogLevel::kInfo, "wrote " + std::to_string(cam_n) + " cameras to " + cam_out);
    } else if (cmd == "render") {
      const auto hash = ren_cam.rfind('#');
      const std::string cam_path = hash == std::string::npos ? ren_cam : ren_cam.substr(0, hash);
      std::size_t index = 0;
      if (hash != std::string::npos) {
        try {
          index = std::stoul(ren_cam.substr(hash + 1));
        } catch (const std::exception&) {
          throw Error(ErrorCode::kInvalidArgument, "--camera: bad index in '" + ren_cam + "'");
        }
      }
      const auto poses = cameras_from_json(read_json_file(cam_path));
      if (index >= poses.size()) {
        throw Error(ErrorCode::kOutOfRange, "--camera: index " + std::to_string(index) + " out of range");
      }
      const auto cloud = read_standard_ply(read_file_bytes(ren_ply));
      save_image(render_points(cloud, poses[index], ren_cfg).image, ren_out);
      log(LogLevel::kInfo, "wrote " + ren_out);
    } else if (cmd == "metrics") {
      print_metrics(evaluate(load_image(met_a), load_image(met_b)), met_json);
    } else if (cmd == "run") {
      if (!run_calib.empty()) run_cfg.calibration_json = run_calib;
      run_cfg.preprocess.background_gray = static_cast<std::uint8_t>(run_gray);
      run_cfg.preprocess.area_mode = parse_area_mode(run_area);
      run_cfg.mask_threshold = static_cast<std::uint8_t>(run_mask_threshold);
      run_cfg.postprocess.rotation_angles = parse_rotation(run_rot);
      run_cfg.key_pixel = parse_key_pixel_strategy(run_strategy);
      const PipelineOutputs out = run_pipeline(run_cfg);
      log(LogLevel::kInfo, "wrote " + out.standardized_png + ", " + out.ship_ply + ", " +
                               out.placement_geojson + ", " + out.manifest_json);
      log(LogLevel::kDebug, out.manifest.dump(2));
    }
  } catch (const Error& e) {
    std::cerr << "ship3d " << cmd << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
