#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "ship3d/postprocess.hpp"
#include "ship3d/raster.hpp"

namespace ship3d {

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  // Throws Error(kOutOfRange) unless finite with |lat| <= 90, |lon| <= 180.
  void validate() const;
};

struct PixelCoord {
  int col = 0;
  int row = 0;
  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Maps homogeneous pixel (u, v, 1) to homogeneous (lon, lat, w).
class Homography {
 public:
  Homography() : h_(Eigen::Matrix3d::Identity()) {}
  // Rescales so that h(2,2) == 1 when h(2,2) != 0; throws kRankDeficient for
  // numerically singular or non-finite matrices.
  explicit Homography(const Eigen::Matrix3d& h);

  const Eigen::Matrix3d& matrix() const { return h_; }
  // Unchecked projection; throws kPointAtInfinity when |w| <= 1e-12.
  Eigen::Vector2d project(const Eigen::Vector2d& pixel) const;

 private:
  Eigen::Matrix3d h_;
};

struct Correspondence {
  Eigen::Vector2d pixel;  // (u, v)
  Eigen::Vector2d geo;    // (lon, lat)
};

struct HomographyFit {
  Homography homography;
  double mean_residual = 0.0;
  double max_residual = 0.0;
};

HomographyFit estimate_homography(const std::vector<Correspondence>& correspondences);

// Projects and range-checks into a GeoPoint.
GeoPoint apply_homography(const Homography& h, const Eigen::Vector2d& pixel);

enum class KeyPixelStrategy { kBottomCenterBbox, kBottomOfCentroidColumn };

PixelCoord select_key_pixel(const BinaryMask& mask,
                            KeyPixelStrategy strategy = KeyPixelStrategy::kBottomCenterBbox);

struct AisRecord {
  std::optional<double> length_m;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<std::string> identity;
};

AisRecord parse_ais(const nlohmann::json& j);

struct PlacementRecord {
  GeoPoint position;
  double length_m = 0.0;
  RotationAngles rotation_angles;
  std::string model_uri;
  PixelCoord source_pixel;
  std::optional<std::string> identity;
};

PlacementRecord make_placement(const GeoPoint& geo, const AisRecord& ais, std::string model_uri,
                               const RotationAngles& rotation_angles, const PixelCoord& source_pixel);

nlohmann::json to_geojson_feature(const PlacementRecord& record);
nlohmann::json to_feature_collection(const std::vector<PlacementRecord>& records);
PlacementRecord placement_from_feature(const nlohmann::json& feature);

// Calibration files hold either {"correspondences": [{"px": [u, v], "geo": [lon, lat]}, ...]}
// or {"matrix": [[...], [...], [...]]}.
struct Calibration {
  HomographyFit fit;
  std::size_t correspondence_count = 0;  // 0 for a literal matrix
};
Calibration parse_calibration(const nlohmann::json& j);

// Spherical web mercator on R = 6378137 m.
inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr double kMaxMercatorLat = 85.051129;
Eigen::Vector2d lonlat_to_mercator(const GeoPoint& geo);
GeoPoint mercator_to_lonlat(const Eigen::Vector2d& xy);

}  // namespace ship3d
