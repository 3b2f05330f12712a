#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "ship3d/error.hpp"
#include "ship3d/georef.hpp"
#include "ship3d/postprocess.hpp"
#include "ship3d/preprocess.hpp"

namespace ship3d {

inline constexpr const char* kToolVersion = "0.3.0";

struct PipelineConfig {
  std::string scene_image;
  std::string mask;
  std::string gaussian_ply;
  std::string ais_json;
  std::optional<std::string> calibration_json;  // AIS lat/lon used when absent
  std::string output_dir;

  PreprocessConfig preprocess;
  // target_length_m <= 0 means "take it from the AIS record".
  PostprocessConfig postprocess{kDefaultOpacityThreshold, kCanonicalRotation, 0.0};
  KeyPixelStrategy key_pixel = KeyPixelStrategy::kBottomCenterBbox;
  std::uint8_t mask_threshold = 128;
};

struct PipelineOutputs {
  std::string standardized_png;
  std::string ship_ply;
  std::string placement_geojson;
  std::string manifest_json;
  nlohmann::json manifest;
};

// Failure in one pipeline stage; what() is "<stage>: <detail>".
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// preprocess -> (reconstruction supplied as a Gaussian PLY) -> export chain ->
// key pixel + homography -> placement. Writes standardized.png, ship.ply,
// placement.geojson and manifest.json into cfg.output_dir.
PipelineOutputs run_pipeline(const PipelineConfig& cfg);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

const char* to_string(KeyPixelStrategy s);
KeyPixelStrategy parse_key_pixel_strategy(const std::string& s);
const char* to_string(AreaMode m);
AreaMode parse_area_mode(const std::string& s);

}  // namespace ship3d
