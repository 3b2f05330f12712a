#include "ship3d/pipeline.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ship3d/splat_io.hpp"

namespace ship3d {

namespace fs = std::filesystem;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

nlohmann::json read_json_file(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  const std::string text = j.dump(2) + "\n";
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

const char* to_string(KeyPixelStrategy s) {
  return s == KeyPixelStrategy::kBottomCenterBbox ? "bottom-center-bbox" : "bottom-of-centroid-column";
}

KeyPixelStrategy parse_key_pixel_strategy(const std::string& s) {
  if (s == "bottom-center-bbox") return KeyPixelStrategy::kBottomCenterBbox;
  if (s == "bottom-of-centroid-column") return KeyPixelStrategy::kBottomOfCentroidColumn;
  throw Error(ErrorCode::kInvalidArgument, "unknown key pixel strategy '" + s + "'");
}

const char* to_string(AreaMode m) { return m == AreaMode::kBoundingBox ? "bbox" : "mask-pixels"; }

AreaMode parse_area_mode(const std::string& s) {
  if (s == "bbox") return AreaMode::kBoundingBox;
  if (s == "mask-pixels") return AreaMode::kMaskPixels;
  throw Error(ErrorCode::kInvalidArgument, "unknown area mode '" + s + "'");
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e);
  }
}

nlohmann::json input_entry(const std::string& path, std::span<const std::uint8_t> bytes) {
  return {{"path", path}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}};
}

}  // namespace

PipelineOutputs run_pipeline(const PipelineConfig& cfg) {
  PipelineOutputs out;
  nlohmann::json inputs;
  nlohmann::json stats;

  stage("setup", [&] {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create output directory '" + cfg.output_dir + "'");
    return 0;
  });
  const fs::path dir(cfg.output_dir);
  out.standardized_png = (dir / "standardized.png").string();
  out.ship_ply = (dir / "ship.ply").string();
  out.placement_geojson = (dir / "placement.geojson").string();
  out.manifest_json = (dir / "manifest.json").string();

  const BinaryMask mask = stage("preprocess", [&] {
    const RgbImage scene = load_image(cfg.scene_image);
    BinaryMask m = load_mask(cfg.mask, cfg.mask_threshold);
    inputs["scene_image"] = input_entry(cfg.scene_image, read_file_bytes(cfg.scene_image));
    inputs["mask"] = input_entry(cfg.mask, read_file_bytes(cfg.mask));
    const StandardizeLayout layout = compute_layout(m, cfg.preprocess);
    save_image(standardize_ship_image(scene, m, cfg.preprocess), out.standardized_png);
    stats["preprocess"] = {
        {"mask_bbox", {layout.source_box.min_col, layout.source_box.min_row,
                       layout.source_box.max_col, layout.source_box.max_row}},
        {"scale", layout.scale},
        {"offset", {layout.offset_col, layout.offset_row}},
        {"mask_pixels", m.count()},
    };
    return m;
  });

  const AisRecord ais = stage("georef", [&] {
    const auto bytes = read_file_bytes(cfg.ais_json);
    inputs["ais"] = input_entry(cfg.ais_json, bytes);
    AisRecord a = parse_ais(nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false));
    if (!a.length_m && !(cfg.postprocess.target_length_m > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "length_m required");
    }
    if (cfg.postprocess.target_length_m > 0.0) a.length_m = cfg.postprocess.target_length_m;
    return a;
  });

  PostprocessConfig post = cfg.postprocess;
  post.target_length_m = *ais.length_m;
  stage("postprocess", [&] {
    const auto bytes = read_file_bytes(cfg.gaussian_ply);
    inputs["gaussian_ply"] = input_entry(cfg.gaussian_ply, bytes);
    const GaussianSplatCloud cloud = read_gaussian_ply(bytes);
    const ExportResult res = export_chain_detailed(cloud, post);
    write_file_bytes(out.ship_ply, write_standard_ply(res.cloud));
    stats["postprocess"] = {
        {"input_points", res.stats.input_count},
        {"retained_points", res.stats.retained_count},
        {"centroid", {res.stats.centroid.x(), res.stats.centroid.y(), res.stats.centroid.z()}},
        {"z_extent_before_scale", res.stats.z_extent_before_scale},
        {"scale_factor", res.stats.scale_factor},
    };
    return 0;
  });

  stage("georef", [&] {
    const PixelCoord key = select_key_pixel(mask, cfg.key_pixel);
    GeoPoint geo;
    nlohmann::json georef_stats = {{"key_pixel", {key.col, key.row}}};
    if (cfg.calibration_json) {
      const auto bytes = read_file_bytes(*cfg.calibration_json);
      inputs["calibration"] = input_entry(*cfg.calibration_json, bytes);
      const nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "calibration is not valid JSON");
      const Calibration cal = parse_calibration(j);
      geo = apply_homography(cal.fit.homography, Eigen::Vector2d(key.col, key.row));
      const auto& h = cal.fit.homography.matrix();
      georef_stats["source"] = "homography";
      georef_stats["correspondences"] = cal.correspondence_count;
      georef_stats["mean_residual"] = cal.fit.mean_residual;
      georef_stats["max_residual"] = cal.fit.max_residual;
      georef_stats["homography"] = {{h(0, 0), h(0, 1), h(0, 2)},
                                    {h(1, 0), h(1, 1), h(1, 2)},
                                    {h(2, 0), h(2, 1), h(2, 2)}};
    } else {
      if (!ais.lat || !ais.lon) {
        throw Error(ErrorCode::kInvalidArgument, "no calibration given and AIS record has no lat/lon");
      }
      geo = {*ais.lat, *ais.lon};
      georef_stats["source"] = "ais";
    }
    const PlacementRecord rec = make_placement(geo, ais, fs::path(out.ship_ply).filename().string(),
                                               post.rotation_angles, key);
    write_json_file(out.placement_geojson, to_feature_collection({rec}));
    georef_stats["position"] = {{"lon", geo.lon}, {"lat", geo.lat}};
    stats["georef"] = std::move(georef_stats);
    return 0;
  });

  out.manifest = {
      {"tool", "ship3d"},
      {"version", kToolVersion},
      {"inputs", inputs},
      {"config",
       {{"preprocess",
         {{"target_area_fraction", cfg.preprocess.target_area_fraction},
          {"out_size", cfg.preprocess.out_size},
          {"background_gray", cfg.preprocess.background_gray},
          {"area_mode", to_string(cfg.preprocess.area_mode)},
          {"mask_threshold", cfg.mask_threshold}}},
        {"postprocess",
         {{"opacity_threshold", post.opacity_threshold},
          {"rotation_angles", {post.rotation_angles.x, post.rotation_angles.y, post.rotation_angles.z}},
          {"rotation_convention", "extrinsic X then Y then Z (R = Rz*Ry*Rx)"},
          {"target_length_m", post.target_length_m}}},
        {"georef", {{"key_pixel_strategy", to_string(cfg.key_pixel)}}}}},
      {"stats", stats},
      {"outputs",
       {{"standardized_png", out.standardized_png},
        {"ship_ply", out.ship_ply},
        {"placement_geojson", out.placement_geojson}}},
  };
  stage("manifest", [&] {
    write_json_file(out.manifest_json, out.manifest);
    return 0;
  });
  return out;
}

}  // namespace ship3d
