#include "ship3d/georef.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "ship3d/error.hpp"

namespace ship3d {

void GeoPoint::validate() const {
  if (!std::isfinite(lat) || !std::isfinite(lon) || std::abs(lat) > 90.0 ||
      std::abs(lon) > 180.0) {
    throw Error(ErrorCode::kOutOfRange, "geo point out of range (lat " + std::to_string(lat) +
                                            ", lon " + std::to_string(lon) + ")");
  }
}

Homography::Homography(const Eigen::Matrix3d& h) : h_(h) {
  if (!h_.allFinite()) throw Error(ErrorCode::kRankDeficient, "homography has non-finite entries");
  if (h_(2, 2) != 0.0) h_ /= h_(2, 2);
  // Pixel-to-degree maps have tiny linear terms next to O(100) offsets, so
  // singularity is judged on the singular value ratio rather than det(H).
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h_);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-14 * sv(0))) {
    throw Error(ErrorCode::kRankDeficient, "homography is singular");
  }
}

Eigen::Vector2d Homography::project(const Eigen::Vector2d& pixel) const {
  const Eigen::Vector3d q = h_ * pixel.homogeneous();
  if (std::abs(q.z()) <= 1e-12) {
    throw Error(ErrorCode::kPointAtInfinity, "pixel maps to a point at infinity");
  }
  return q.head<2>() / q.z();
}

namespace {

// Similarity taking the points' centroid to the origin and their mean
// distance from it to sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(pts.size());
  if (!(mean_dist > 0.0)) {
    throw Error(ErrorCode::kRankDeficient, "homography: all points coincide");
  }
  const double s = std::numbers::sqrt2 / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x(),
       0, s, -s * c.y(),
       0, 0, 1;
  return t;
}

bool has_collinear_triple(const std::vector<Eigen::Vector2d>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      for (std::size_t k = j + 1; k < pts.size(); ++k) {
        const Eigen::Vector2d a = pts[j] - pts[i];
        const Eigen::Vector2d b = pts[k] - pts[i];
        const double cross = a.x() * b.y() - a.y() * b.x();
        const double scale = a.squaredNorm() + b.squaredNorm();
        if (std::abs(cross) <= 1e-12 * scale) return true;
      }
    }
  }
  return false;
}

}  // namespace

HomographyFit estimate_homography(const std::vector<Correspondence>& correspondences) {
  const std::size_t n = correspondences.size();
  if (n < 4) {
    throw Error(ErrorCode::kInsufficientPoints,
                "homography: need at least 4 correspondences, got " + std::to_string(n));
  }
  std::vector<Eigen::Vector2d> px(n), geo(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = correspondences[i].pixel;
    geo[i] = correspondences[i].geo;
    if (!px[i].allFinite() || !geo[i].allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "homography: non-finite correspondence");
    }
  }
  if (n == 4 && (has_collinear_triple(px) || has_collinear_triple(geo))) {
    throw Error(ErrorCode::kRankDeficient, "homography: three of four points are collinear");
  }

  const Eigen::Matrix3d tp = normalizing_transform(px);
  const Eigen::Matrix3d tg = normalizing_transform(geo);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p = tp * px[i].homogeneous();
    const Eigen::Vector3d q = tg * geo[i].homogeneous();
    const double x = p.x(), y = p.y();
    const double xq = q.x(), yq = q.y();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << 0, 0, 0, -x, -y, -1, yq * x, yq * y, yq;
    a.row(r + 1) << x, y, 1, 0, 0, 0, -xq * x, -xq * y, -xq;
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::kRankDeficient, "homography: correspondences do not determine a unique map");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2),
        h(3), h(4), h(5),
        h(6), h(7), h(8);
  if (!(std::abs((hn / hn.norm()).determinant()) > 1e-12)) {
    throw Error(ErrorCode::kRankDeficient, "homography: estimated map is singular");
  }

  HomographyFit fit;
  fit.homography = Homography(tg.inverse() * hn * tp);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (fit.homography.project(px[i]) - geo[i]).norm();
    sum += e;
    fit.max_residual = std::max(fit.max_residual, e);
  }
  fit.mean_residual = sum / static_cast<double>(n);
  return fit;
}

GeoPoint apply_homography(const Homography& h, const Eigen::Vector2d& pixel) {
  const Eigen::Vector2d lonlat = h.project(pixel);
  GeoPoint g{lonlat.y(), lonlat.x()};
  g.validate();
  return g;
}

PixelCoord select_key_pixel(const BinaryMask& mask, KeyPixelStrategy strategy) {
  const auto box = mask_bbox(mask);
  if (!box) throw Error(ErrorCode::kEmptyMask, "no ship in mask");

  if (strategy == KeyPixelStrategy::kBottomCenterBbox) {
    const int row = box->max_row;
    int lo = -1, hi = -1;
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(c, row)) continue;
      if (lo < 0) lo = c;
      hi = c;
    }
    const int mid = (lo + hi) / 2;
    // Snap to the nearest set pixel in the row (lower column on ties).
    for (int d = 0;; ++d) {
      if (mid - d >= lo && mask.at(mid - d, row)) return {mid - d, row};
      if (mid + d <= hi && mask.at(mid + d, row)) return {mid + d, row};
    }
  }

  double col_sum = 0.0;
  std::size_t count = 0;
  std::vector<int> column_bottom(static_cast<std::size_t>(mask.width), -1);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(c, r)) continue;
      col_sum += c;
      ++count;
      column_bottom[static_cast<std::size_t>(c)] = r;
    }
  }
  const int centroid_col = static_cast<int>(std::lround(col_sum / static_cast<double>(count)));
  for (int d = 0;; ++d) {
    for (int c : {centroid_col - d, centroid_col + d}) {
      if (c < 0 || c >= mask.width) continue;
      const int bottom = column_bottom[static_cast<std::size_t>(c)];
      if (bottom >= 0) return {c, bottom};
    }
  }
}

AisRecord parse_ais(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "AIS record must be a JSON object");
  AisRecord ais;
  auto number = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) {
      throw Error(ErrorCode::kInvalidArgument, std::string("AIS field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
  };
  ais.length_m = number("length_m");
  ais.lat = number("lat");
  ais.lon = number("lon");
  if (ais.length_m && !(*ais.length_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "AIS length_m must be > 0");
  }
  if (j.contains("identity") && j.at("identity").is_string()) {
    ais.identity = j.at("identity").get<std::string>();
  } else if (j.contains("mmsi") && !j.at("mmsi").is_null()) {
    ais.identity = j.at("mmsi").is_string() ? j.at("mmsi").get<std::string>() : j.at("mmsi").dump();
  }
  return ais;
}

PlacementRecord make_placement(const GeoPoint& geo, const AisRecord& ais, std::string model_uri,
                               const RotationAngles& rotation_angles, const PixelCoord& source_pixel) {
  geo.validate();
  if (!ais.length_m) throw Error(ErrorCode::kInvalidArgument, "length_m required");
  if (!(*ais.length_m > 0.0) || !std::isfinite(*ais.length_m)) {
    throw Error(ErrorCode::kInvalidArgument, "length_m must be > 0");
  }
  PlacementRecord rec;
  rec.position = geo;
  rec.length_m = *ais.length_m;
  rec.rotation_angles = rotation_angles;
  rec.model_uri = std::move(model_uri);
  rec.source_pixel = source_pixel;
  rec.identity = ais.identity;
  return rec;
}

nlohmann::json to_geojson_feature(const PlacementRecord& r) {
  nlohmann::json props = {
      {"length_m", r.length_m},
      {"rotation_angles", {r.rotation_angles.x, r.rotation_angles.y, r.rotation_angles.z}},
      {"model_uri", r.model_uri},
      {"source_pixel", {r.source_pixel.col, r.source_pixel.row}},
  };
  if (r.identity) props["identity"] = *r.identity;
  return {
      {"type", "Feature"},
      {"geometry", {{"type", "Point"}, {"coordinates", {r.position.lon, r.position.lat}}}},
      {"properties", std::move(props)},
  };
}

nlohmann::json to_feature_collection(const std::vector<PlacementRecord>& records) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& r : records) features.push_back(to_geojson_feature(r));
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

PlacementRecord placement_from_feature(const nlohmann::json& f) {
  try {
    PlacementRecord r;
    const auto& coords = f.at("geometry").at("coordinates");
    r.position = {coords.at(1).get<double>(), coords.at(0).get<double>()};
    r.position.validate();
    const auto& p = f.at("properties");
    r.length_m = p.at("length_m").get<double>();
    const auto& a = p.at("rotation_angles");
    r.rotation_angles = {a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    r.model_uri = p.at("model_uri").get<std::string>();
    r.source_pixel = {p.at("source_pixel").at(0).get<int>(), p.at("source_pixel").at(1).get<int>()};
    if (p.contains("identity")) r.identity = p.at("identity").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed placement feature: ") + e.what());
  }
}

Calibration parse_calibration(const nlohmann::json& j) {
  try {
    Calibration cal;
    if (j.contains("matrix")) {
      Eigen::Matrix3d m;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m(r, c) = j.at("matrix").at(r).at(c).get<double>();
      }
      cal.fit.homography = Homography(m);
      return cal;
    }
    std::vector<Correspondence> cs;
    for (const auto& item : j.at("correspondences")) {
      cs.push_back({{item.at("px").at(0).get<double>(), item.at("px").at(1).get<double>()},
                    {item.at("geo").at(0).get<double>(), item.at("geo").at(1).get<double>()}});
    }
    cal.fit = estimate_homography(cs);
    cal.correspondence_count = cs.size();
    return cal;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed calibration: ") + e.what());
  }
}

Eigen::Vector2d lonlat_to_mercator(const GeoPoint& geo) {
  geo.validate();
  if (!(std::abs(geo.lat) < kMaxMercatorLat)) {
    throw Error(ErrorCode::kOutOfRange, "latitude outside the web mercator domain");
  }
  constexpr double deg = std::numbers::pi / 180.0;
  return {kEarthRadiusM * geo.lon * deg,
          kEarthRadiusM * std::log(std::tan(std::numbers::pi / 4 + geo.lat * deg / 2))};
}

GeoPoint mercator_to_lonlat(const Eigen::Vector2d& xy) {
  constexpr double rad = 180.0 / std::numbers::pi;
  return {(2.0 * std::atan(std::exp(xy.y() / kEarthRadiusM)) - std::numbers::pi / 2) * rad,
          xy.x() / kEarthRadiusM * rad};
}

}  // namespace ship3d
