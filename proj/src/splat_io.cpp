#include "ship3d/splat_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string_view>

#include "ship3d/error.hpp"

namespace ship3d {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kMissingProperty: return "missing property";
    case ErrorCode::kTruncatedData: return "truncated data";
    case ErrorCode::kInvariantViolation: return "invariant violation";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kUnsupportedDepth: return "unsupported bit depth";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kEmptyMask: return "empty mask";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kDegenerateGeometry: return "degenerate geometry";
    case ErrorCode::kInsufficientPoints: return "insufficient points";
    case ErrorCode::kRankDeficient: return "rank deficient";
    case ErrorCode::kPointAtInfinity: return "point at infinity";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kInvalidArgument: return "invalid argument";
  }
  return "unknown";
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32,
                        kFloat32, kFloat64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::kInt8;
  if (name == "uchar" || name == "uint8") return ScalarType::kUInt8;
  if (name == "short" || name == "int16") return ScalarType::kInt16;
  if (name == "ushort" || name == "uint16") return ScalarType::kUInt16;
  if (name == "int" || name == "int32") return ScalarType::kInt32;
  if (name == "uint" || name == "uint32") return ScalarType::kUInt32;
  if (name == "float" || name == "float32") return ScalarType::kFloat32;
  if (name == "double" || name == "float64") return ScalarType::kFloat64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUInt8: return 1;
    case ScalarType::kInt16:
    case ScalarType::kUInt16: return 2;
    case ScalarType::kInt32:
    case ScalarType::kUInt32:
    case ScalarType::kFloat32: return 4;
    case ScalarType::kFloat64: return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

enum class Format { kAscii, kBinaryLittleEndian };

struct Header {
  Format format = Format::kAscii;
  std::vector<Element> elements;
  std::size_t payload_offset = 0;
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, "ply: " + msg);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_count(std::string_view s, std::size_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

Header parse_header(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                              bytes.size());
  Header header;
  std::size_t pos = 0;
  bool have_format = false;
  bool first = true;
  while (true) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) fail(ErrorCode::kMalformedHeader, "missing end_header");
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;

    if (first) {
      if (line != "ply") fail(ErrorCode::kMalformedHeader, "missing 'ply' magic");
      first = false;
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() != 3) fail(ErrorCode::kMalformedHeader, "bad format line");
      if (tok[1] == "ascii") {
        header.format = Format::kAscii;
      } else if (tok[1] == "binary_little_endian") {
        header.format = Format::kBinaryLittleEndian;
      } else if (tok[1] == "binary_big_endian") {
        fail(ErrorCode::kUnsupportedFormat, "binary_big_endian is not supported");
      } else {
        fail(ErrorCode::kMalformedHeader, "unknown format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      Element e;
      if (tok.size() != 3 || !parse_count(tok[2], e.count)) {
        fail(ErrorCode::kMalformedHeader, "bad element line");
      }
      e.name = std::string(tok[1]);
      header.elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (header.elements.empty()) fail(ErrorCode::kMalformedHeader, "property before element");
      Property p;
      if (tok.size() == 5 && tok[1] == "list") {
        auto ct = parse_scalar_type(tok[2]);
        auto vt = parse_scalar_type(tok[3]);
        if (!ct || !vt) fail(ErrorCode::kMalformedHeader, "bad list property types");
        p.is_list = true;
        p.count_type = *ct;
        p.type = *vt;
        p.name = std::string(tok[4]);
      } else if (tok.size() == 3) {
        auto t = parse_scalar_type(tok[1]);
        if (!t) fail(ErrorCode::kMalformedHeader, "unknown property type '" + std::string(tok[1]) + "'");
        p.type = *t;
        p.name = std::string(tok[2]);
      } else {
        fail(ErrorCode::kMalformedHeader, "bad property line");
      }
      header.elements.back().properties.push_back(std::move(p));
    } else {
      fail(ErrorCode::kMalformedHeader, "unexpected header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_format) fail(ErrorCode::kMalformedHeader, "missing format line");
  header.payload_offset = pos;
  return header;
}

template <typename T>
T load_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double decode_binary(ScalarType t, const std::uint8_t* p) {
  switch (t) {
    case ScalarType::kInt8: return load_le<std::int8_t>(p);
    case ScalarType::kUInt8: return load_le<std::uint8_t>(p);
    case ScalarType::kInt16: return load_le<std::int16_t>(p);
    case ScalarType::kUInt16: return load_le<std::uint16_t>(p);
    case ScalarType::kInt32: return load_le<std::int32_t>(p);
    case ScalarType::kUInt32: return load_le<std::uint32_t>(p);
    case ScalarType::kFloat32: return load_le<float>(p);
    case ScalarType::kFloat64: return load_le<double>(p);
  }
  return 0.0;
}

// Cursor over the payload; every read is bounds-checked against the buffer.
class BinaryCursor {
 public:
  BinaryCursor(std::span<const std::uint8_t> bytes, std::size_t offset)
      : bytes_(bytes), pos_(offset) {}

  double read(ScalarType t) {
    const std::size_t n = scalar_size(t);
    if (pos_ + n > bytes_.size()) {
      fail(ErrorCode::kTruncatedData, "declared vertex count exceeds available data");
    }
    const double v = decode_binary(t, bytes_.data() + pos_);
    pos_ += n;
    return v;
  }

  void skip(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      fail(ErrorCode::kTruncatedData, "declared element count exceeds available data");
    }
    pos_ += n;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

class AsciiCursor {
 public:
  AsciiCursor(std::span<const std::uint8_t> bytes, std::size_t offset)
      : text_(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
        pos_(offset) {}

  std::string_view next_token() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    if (pos_ >= text_.size()) {
      fail(ErrorCode::kTruncatedData, "declared vertex count exceeds available data");
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  double read(ScalarType t) {
    const std::string_view tok = next_token();
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (t == ScalarType::kFloat32) {
      float v = 0.0f;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) bad_token(tok);
      return v;
    }
    if (t == ScalarType::kFloat64) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) bad_token(tok);
      return v;
    }
    long long v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) bad_token(tok);
    return static_cast<double>(v);
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  }
  [[noreturn]] static void bad_token(std::string_view tok) {
    fail(ErrorCode::kMalformedHeader, "unparseable value '" + std::string(tok) + "'");
  }

  std::string_view text_;
  std::size_t pos_;
};

// Vertex rows flattened to doubles. Every supported PLY scalar type converts
// to double exactly, so narrowing back to the declared type is lossless.
struct VertexTable {
  std::vector<std::string> names;
  std::size_t count = 0;
  std::vector<double> values;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    return std::nullopt;
  }
  double at(std::size_t row, std::size_t col) const {
    return values[row * names.size() + col];
  }
};

template <typename Cursor>
void skip_element(Cursor& cur, const Element& e) {
  for (std::size_t i = 0; i < e.count; ++i) {
    for (const auto& p : e.properties) {
      if (p.is_list) {
        const auto n = static_cast<std::size_t>(cur.read(p.count_type));
        for (std::size_t k = 0; k < n; ++k) cur.read(p.type);
      } else {
        cur.read(p.type);
      }
    }
  }
}

template <typename Cursor>
VertexTable read_vertices(Cursor& cur, const Header& header) {
  for (const auto& e : header.elements) {
    if (e.name != "vertex") {
      skip_element(cur, e);
      continue;
    }
    VertexTable table;
    table.count = e.count;
    std::vector<std::size_t> scalar_props;
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
      if (!e.properties[i].is_list) {
        scalar_props.push_back(i);
        table.names.push_back(e.properties[i].name);
      }
    }
    table.values.reserve(std::min<std::size_t>(e.count, 1u << 24) * table.names.size());
    for (std::size_t row = 0; row < e.count; ++row) {
      for (const auto& p : e.properties) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(cur.read(p.count_type));
          for (std::size_t k = 0; k < n; ++k) cur.read(p.type);
        } else {
          table.values.push_back(cur.read(p.type));
        }
      }
    }
    return table;
  }
  fail(ErrorCode::kMissingProperty, "no vertex element");
}

VertexTable parse_vertex_table(std::span<const std::uint8_t> bytes) {
  const Header header = parse_header(bytes);
  if (header.format == Format::kAscii) {
    AsciiCursor cur(bytes, header.payload_offset);
    return read_vertices(cur, header);
  }
  BinaryCursor cur(bytes, header.payload_offset);
  return read_vertices(cur, header);
}

std::size_t require(const VertexTable& t, std::string_view name) {
  auto c = t.column(name);
  if (!c) fail(ErrorCode::kMissingProperty, "missing required property '" + std::string(name) + "'");
  return *c;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

struct ByteWriter {
  std::vector<std::uint8_t> out;

  void text(std::string_view s) { out.insert(out.end(), s.begin(), s.end()); }
  template <typename T>
  void put(T v) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
  }
};

bool all_finite(const float* v, std::size_t n) {
  return std::all_of(v, v + n, [](float x) { return std::isfinite(x); });
}

}  // namespace

void GaussianSplatCloud::validate() const {
  const std::size_t n = positions.size();
  if (opacity_logits.size() != n || scales.size() != n || rotations.size() != n ||
      f_dc.size() != n || (!colors.empty() && colors.size() != n)) {
    throw Error(ErrorCode::kInvariantViolation, "gaussian cloud: per-point list lengths differ");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!all_finite(positions[i].data(), 3) || !std::isfinite(opacity_logits[i]) ||
        !all_finite(scales[i].data(), 3) || !all_finite(rotations[i].data(), 4) ||
        !all_finite(f_dc[i].data(), 3)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "gaussian cloud: non-finite value at point " + std::to_string(i));
    }
    const auto& q = rotations[i];
    if (q[0] == 0.0f && q[1] == 0.0f && q[2] == 0.0f && q[3] == 0.0f) {
      throw Error(ErrorCode::kInvariantViolation,
                  "gaussian cloud: zero quaternion at point " + std::to_string(i));
    }
  }
}

void StandardPointCloud::validate() const {
  if (colors.size() != positions.size()) {
    throw Error(ErrorCode::kInvariantViolation, "point cloud: positions/colors length differ");
  }
  for (const auto& p : positions) {
    if (!p.allFinite()) throw Error(ErrorCode::kInvariantViolation, "point cloud: non-finite position");
  }
}

GaussianSplatCloud read_gaussian_ply(std::span<const std::uint8_t> bytes) {
  const VertexTable t = parse_vertex_table(bytes);

  const std::size_t x = require(t, "x"), y = require(t, "y"), z = require(t, "z");
  const std::size_t op = require(t, "opacity");
  const std::size_t s0 = require(t, "scale_0"), s1 = require(t, "scale_1"),
                    s2 = require(t, "scale_2");
  const std::size_t r0 = require(t, "rot_0"), r1 = require(t, "rot_1"),
                    r2 = require(t, "rot_2"), r3 = require(t, "rot_3");
  const auto red = t.column("red"), green = t.column("green"), blue = t.column("blue");
  const bool has_rgb = red && green && blue;
  const auto f0 = t.column("f_dc_0"), f1 = t.column("f_dc_1"), f2 = t.column("f_dc_2");
  const bool has_fdc = f0 && f1 && f2;
  if (!has_fdc && !has_rgb) {
    for (const char* name : {"f_dc_0", "f_dc_1", "f_dc_2"}) require(t, name);
  }

  GaussianSplatCloud c;
  const std::size_t n = t.count;
  c.positions.resize(n);
  c.opacity_logits.resize(n);
  c.scales.resize(n);
  c.rotations.resize(n);
  c.f_dc.resize(n);
  if (has_rgb) c.colors.resize(n);
  auto f = [&](std::size_t row, std::size_t col) { return static_cast<float>(t.at(row, col)); };
  for (std::size_t i = 0; i < n; ++i) {
    c.positions[i] = {f(i, x), f(i, y), f(i, z)};
    c.opacity_logits[i] = f(i, op);
    c.scales[i] = {f(i, s0), f(i, s1), f(i, s2)};
    c.rotations[i] = {f(i, r0), f(i, r1), f(i, r2), f(i, r3)};
    if (has_rgb) {
      c.colors[i] = {to_byte(t.at(i, *red)), to_byte(t.at(i, *green)), to_byte(t.at(i, *blue))};
    }
    c.f_dc[i] = has_fdc ? Float3{f(i, *f0), f(i, *f1), f(i, *f2)} : rgb_to_sh_dc(c.colors[i]);
  }
  return c;
}

std::vector<std::uint8_t> write_gaussian_ply(const GaussianSplatCloud& cloud) {
  cloud.validate();
  const bool rgb = !cloud.colors.empty();
  ByteWriter w;
  std::ostringstream h;
  h << "ply\nformat binary_little_endian 1.0\n"
    << "element vertex " << cloud.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n"
    << "property float nx\nproperty float ny\nproperty float nz\n"
    << "property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n"
    << "property float opacity\n"
    << "property float scale_0\nproperty float scale_1\nproperty float scale_2\n"
    << "property float rot_0\nproperty float rot_1\nproperty float rot_2\nproperty float rot_3\n";
  if (rgb) h << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  h << "end_header\n";
  w.text(h.str());
  w.out.reserve(w.out.size() + cloud.size() * (17 * 4 + 3));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (float v : cloud.positions[i]) w.put(v);
    for (int k = 0; k < 3; ++k) w.put(0.0f);
    for (float v : cloud.f_dc[i]) w.put(v);
    w.put(cloud.opacity_logits[i]);
    for (float v : cloud.scales[i]) w.put(v);
    for (float v : cloud.rotations[i]) w.put(v);
    if (rgb) {
      w.put(cloud.colors[i].r);
      w.put(cloud.colors[i].g);
      w.put(cloud.colors[i].b);
    }
  }
  return std::move(w.out);
}

std::vector<std::uint8_t> write_standard_ply(const StandardPointCloud& cloud) {
  cloud.validate();
  ByteWriter w;
  std::ostringstream h;
  h << "ply\nformat binary_little_endian 1.0\n"
    << "element vertex " << cloud.size() << "\n"
    << "property float x\nproperty float y\nproperty float z\n"
    << "property float nx\nproperty float ny\nproperty float nz\n"
    << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
    << "end_header\n";
  w.text(h.str());
  w.out.reserve(w.out.size() + cloud.size() * 27);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    w.put(static_cast<float>(p.x()));
    w.put(static_cast<float>(p.y()));
    w.put(static_cast<float>(p.z()));
    w.put(0.0f);
    w.put(0.0f);
    w.put(0.0f);
    w.put(cloud.colors[i].r);
    w.put(cloud.colors[i].g);
    w.put(cloud.colors[i].b);
  }
  return std::move(w.out);
}

StandardPointCloud read_standard_ply(std::span<const std::uint8_t> bytes) {
  const VertexTable t = parse_vertex_table(bytes);
  const std::size_t x = require(t, "x"), y = require(t, "y"), z = require(t, "z");
  const std::size_t r = require(t, "red"), g = require(t, "green"), b = require(t, "blue");
  StandardPointCloud c;
  c.positions.resize(t.count);
  c.colors.resize(t.count);
  for (std::size_t i = 0; i < t.count; ++i) {
    c.positions[i] = {t.at(i, x), t.at(i, y), t.at(i, z)};
    c.colors[i] = {to_byte(t.at(i, r)), to_byte(t.at(i, g)), to_byte(t.at(i, b))};
  }
  return c;
}

Rgb sh_dc_to_rgb(const Float3& f_dc) {
  auto channel = [](float f) {
    const double v = std::clamp(0.5 + kShC0 * static_cast<double>(f), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * v));
  };
  return {channel(f_dc[0]), channel(f_dc[1]), channel(f_dc[2])};
}

Float3 rgb_to_sh_dc(const Rgb& rgb) {
  auto coeff = [](std::uint8_t c) {
    return static_cast<float>((static_cast<double>(c) / 255.0 - 0.5) / kShC0);
  };
  return {coeff(rgb.r), coeff(rgb.g), coeff(rgb.b)};
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace ship3d
