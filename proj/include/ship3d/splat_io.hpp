#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ship3d {

using Float3 = std::array<float, 3>;
using Float4 = std::array<float, 4>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Raw reconstruction output. Scales and rotations are carried through
// untouched; opacity is a pre-sigmoid logit.
//
// `colors` is either empty or the same length as `positions`. It is filled
// when the source file already stores red/green/blue bytes and then takes
// precedence over the SH-DC coefficients at export.
struct GaussianSplatCloud {
  std::vector<Float3> positions;
  std::vector<float> opacity_logits;
  std::vector<Float3> scales;
  std::vector<Float4> rotations;
  std::vector<Float3> f_dc;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }

  // Throws Error(kInvariantViolation) on length mismatch, non-finite values
  // or a zero-norm quaternion.
  void validate() const;

  friend bool operator==(const GaussianSplatCloud&,
                         const GaussianSplatCloud&) = default;
};

// Export form: metric positions, byte colors, normals that are always zero
// (kept implicit and written as zeros).
struct StandardPointCloud {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }
  void validate() const;
};

GaussianSplatCloud read_gaussian_ply(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_gaussian_ply(const GaussianSplatCloud& cloud);

std::vector<std::uint8_t> write_standard_ply(const StandardPointCloud& cloud);
// Accepts any PLY with x/y/z and red/green/blue vertex properties. Normals,
// when present, are read and discarded.
StandardPointCloud read_standard_ply(std::span<const std::uint8_t> bytes);

// Degree-0 spherical harmonic coefficient to display color.
inline constexpr double kShC0 = 0.28209479177387814;
Rgb sh_dc_to_rgb(const Float3& f_dc);
// Inverse used when a file supplies bytes but no f_dc; sh_dc_to_rgb of the
// result reproduces the input exactly.
Float3 rgb_to_sh_dc(const Rgb& rgb);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace ship3d
