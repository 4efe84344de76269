#include "vigg/io.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

namespace vigg::io {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "file codecs assume a little-endian host");

std::string where(std::string_view name) { return std::string(name) + ": "; }

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

std::optional<double> to_double(std::string_view tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

// Splits off the next line (without its terminator); returns false at the end.
bool next_line(std::string_view text, std::size_t& pos, std::string_view& line) {
  if (pos >= text.size()) return false;
  std::size_t end = text.find('\n', pos);
  if (end == std::string_view::npos) end = text.size();
  line = text.substr(pos, end - pos);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  pos = end + 1;
  return true;
}

// ---------------------------------------------------------------- PLY

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

std::optional<PlyType> ply_type(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::kInt8;
  if (s == "uchar" || s == "uint8") return PlyType::kUint8;
  if (s == "short" || s == "int16") return PlyType::kInt16;
  if (s == "ushort" || s == "uint16") return PlyType::kUint16;
  if (s == "int" || s == "int32") return PlyType::kInt32;
  if (s == "uint" || s == "uint32") return PlyType::kUint32;
  if (s == "float" || s == "float32") return PlyType::kFloat32;
  if (s == "double" || s == "float64") return PlyType::kFloat64;
  return std::nullopt;
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUint16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

double ply_load(PlyType t, const char* p) {
  switch (t) {
    case PlyType::kInt8:
      return load<std::int8_t>(p);
    case PlyType::kUint8:
      return load<std::uint8_t>(p);
    case PlyType::kInt16:
      return load<std::int16_t>(p);
    case PlyType::kUint16:
      return load<std::uint16_t>(p);
    case PlyType::kInt32:
      return load<std::int32_t>(p);
    case PlyType::kUint32:
      return load<std::uint32_t>(p);
    case PlyType::kFloat32:
      return load<float>(p);
    case PlyType::kFloat64:
      return load<double>(p);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

struct VertexLayout {
  int x = -1, y = -1, z = -1, nx = -1, ny = -1, nz = -1;
  bool normals() const { return nx >= 0 && ny >= 0 && nz >= 0; }
};

VertexLayout vertex_layout(const PlyElement& e, std::string_view name) {
  VertexLayout l;
  for (std::size_t i = 0; i < e.props.size(); ++i) {
    const auto& p = e.props[i];
    int* slot = p.name == "x"    ? &l.x
                : p.name == "y"  ? &l.y
                : p.name == "z"  ? &l.z
                : p.name == "nx" ? &l.nx
                : p.name == "ny" ? &l.ny
                : p.name == "nz" ? &l.nz
                                 : nullptr;
    if (!slot) continue;
    const bool real = p.type == PlyType::kFloat32 || p.type == PlyType::kFloat64;
    if (p.is_list || !real) {
      throw FormatError(where(name) + "element 'vertex': property '" + p.name +
                        "' must be a float or double scalar");
    }
    *slot = static_cast<int>(i);
  }
  if (l.x < 0 || l.y < 0 || l.z < 0) {
    throw FormatError(where(name) + "element 'vertex' lacks x/y/z properties");
  }
  return l;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

PointCloud parse_ply(std::string_view bytes, std::string_view name) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::string_view line;
  auto fail = [&](const std::string& msg) {
    throw FormatError(where(name) + "line " + std::to_string(line_no) + ": " + msg);
  };

  if (!next_line(bytes, pos, line) || line != "ply") {
    throw FormatError(where(name) + "line 1: missing 'ply' magic");
  }
  line_no = 1;
  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    if (!next_line(bytes, pos, line)) fail("header ended without end_header");
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() != 3) fail("malformed format line");
      if (tok[1] == "ascii") {
        binary = false;
      } else if (tok[1] == "binary_little_endian") {
        binary = true;
      } else {
        fail("unsupported format '" + std::string(tok[1]) + "'");
      }
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) fail("malformed element line");
      PlyElement e;
      e.name = tok[1];
      const auto count = to_double(tok[2]);
      if (!count || *count < 0 || *count != std::floor(*count)) {
        fail("element '" + e.name + "' has an invalid count");
      }
      e.count = static_cast<std::size_t>(*count);
      elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (elements.empty()) fail("property outside any element");
      auto& e = elements.back();
      PlyProperty p;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = ply_type(tok[2]);
        const auto vt = ply_type(tok[3]);
        if (!ct || !vt) fail("element '" + e.name + "': unknown list property type");
        p = {std::string(tok[4]), *vt, true, *ct};
      } else if (tok.size() == 3) {
        const auto t = ply_type(tok[1]);
        if (!t) {
          fail("element '" + e.name + "': unknown property type '" + std::string(tok[1]) + "'");
        }
        p = {std::string(tok[2]), *t, false, PlyType::kUint8};
      } else {
        fail("element '" + e.name + "': malformed property line");
      }
      e.props.push_back(std::move(p));
    } else {
      fail("unknown header keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_format) fail("header has no format line");

  const PlyElement* vertex = nullptr;
  for (const auto& e : elements) {
    if (e.name == "vertex") vertex = &e;
  }
  if (!vertex) throw FormatError(where(name) + "no 'vertex' element");
  const VertexLayout layout = vertex_layout(*vertex, name);

  PointCloud cloud;
  cloud.points.reserve(vertex->count);
  if (layout.normals()) cloud.normals.reserve(vertex->count);
  std::vector<double> values;

  for (const auto& e : elements) {
    const bool is_vertex = &e == vertex;
    for (std::size_t n = 0; n < e.count; ++n) {
      values.assign(e.props.size(), 0.0);
      if (binary) {
        auto need = [&](std::size_t k) {
          if (pos > bytes.size() || bytes.size() - pos < k) {
            throw FormatError(where(name) + "element '" + e.name + "' truncated at byte offset " +
                              std::to_string(pos));
          }
        };
        for (std::size_t k = 0; k < e.props.size(); ++k) {
          const auto& p = e.props[k];
          std::size_t items = 1;
          if (p.is_list) {
            need(ply_size(p.count_type));
            const double c = ply_load(p.count_type, bytes.data() + pos);
            if (c < 0) {
              throw FormatError(where(name) + "element '" + e.name +
                                "' has a negative list count at byte offset " + std::to_string(pos));
            }
            pos += ply_size(p.count_type);
            items = static_cast<std::size_t>(c);
          }
          need(items * ply_size(p.type));
          if (!p.is_list) values[k] = ply_load(p.type, bytes.data() + pos);
          pos += items * ply_size(p.type);
        }
      } else {
        if (!next_line(bytes, pos, line)) {
          throw FormatError(where(name) + "element '" + e.name + "' ends early after line " +
                            std::to_string(line_no));
        }
        ++line_no;
        const auto tok = split_ws(line);
        std::size_t t = 0;
        auto take = [&]() -> double {
          if (t >= tok.size()) fail("element '" + e.name + "': too few values");
          const auto v = to_double(tok[t]);
          if (!v) fail("element '" + e.name + "': bad number '" + std::string(tok[t]) + "'");
          ++t;
          return *v;
        };
        for (std::size_t k = 0; k < e.props.size(); ++k) {
          if (e.props[k].is_list) {
            const double c = take();
            if (c < 0 || c != std::floor(c)) fail("element '" + e.name + "': bad list count");
            for (std::size_t i = 0; i < static_cast<std::size_t>(c); ++i) take();
          } else {
            values[k] = take();
          }
        }
        if (t != tok.size()) fail("element '" + e.name + "': too many values");
      }
      if (is_vertex) {
        cloud.points.emplace_back(values[layout.x], values[layout.y], values[layout.z]);
        if (layout.normals()) {
          cloud.normals.emplace_back(values[layout.nx], values[layout.ny], values[layout.nz]);
        }
      }
    }
  }
  return cloud;
}

std::string encode_ply(const PointCloud& cloud) {
  const bool normals = cloud.has_normals();
  std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                    std::to_string(cloud.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\n";
  if (normals) out += "property double nx\nproperty double ny\nproperty double nz\n";
  out += "end_header\n";
  out.reserve(out.size() + cloud.size() * (normals ? 48 : 24));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int k = 0; k < 3; ++k) store(out, cloud.points[i][k]);
    if (normals) {
      for (int k = 0; k < 3; ++k) store(out, cloud.normals[i][k]);
    }
  }
  return out;
}

PointCloud read_ply(const fs::path& path) { return parse_ply(read_file(path), path.string()); }

void write_ply(const fs::path& path, const PointCloud& cloud) { write_file(path, encode_ply(cloud)); }

// ---------------------------------------------------------------- VGF1

FeatureSet parse_features(std::string_view bytes, std::string_view name) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "VGF1") {
    throw FormatError(where(name) + "missing VGF1 header");
  }
  const auto count = load<std::uint32_t>(bytes.data() + 4);
  const auto dim = load<std::uint32_t>(bytes.data() + 8);
  if (dim == 0 && count > 0) throw FormatError(where(name) + "zero feature dimension");
  const std::uint64_t expected = 12 + 4ull * count * dim;
  if (bytes.size() != expected) {
    throw FormatError(where(name) + "expected " + std::to_string(expected) + " bytes for " +
                      std::to_string(count) + " x " + std::to_string(dim) + " features, found " +
                      std::to_string(bytes.size()));
  }
  FeatureSet f(dim, count);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = load<float>(bytes.data() + 12 + 4 * i);
  }
  return f;
}

std::string encode_features(const FeatureSet& f) {
  std::string out = "VGF1";
  store(out, static_cast<std::uint32_t>(f.size()));
  store(out, static_cast<std::uint32_t>(f.dim));
  out.reserve(out.size() + 4 * f.values.size());
  for (double v : f.values) store(out, static_cast<float>(v));
  return out;
}

FeatureSet read_features(const fs::path& path) {
  return parse_features(read_file(path), path.string());
}

void write_features(const fs::path& path, const FeatureSet& f) {
  write_file(path, encode_features(f));
}

// ---------------------------------------------------------------- VGM1

MatchFile parse_matches(std::string_view text, std::string_view name) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::string_view line;
  MatchFile m;
  bool have_header = false;
  while (next_line(text, pos, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw FormatError(where(name) + "line " + std::to_string(line_no) + ": " + msg);
    };
    if (!have_header) {
      if (tok.size() != 4 || tok[0] != "#" || tok[1] != "vigg-matches" || tok[2] != "v1") {
        fail("missing '# vigg-matches v1 mode=...' header");
      }
      if (tok[3] == "mode=pixel") {
        m.mode = MatchMode::kPixel;
      } else if (tok[3] == "mode=lifted") {
        m.mode = MatchMode::kLifted;
      } else {
        fail("unknown match mode '" + std::string(tok[3]) + "'");
      }
      have_header = true;
      continue;
    }
    if (tok[0].front() == '#') continue;
    const std::size_t want = m.mode == MatchMode::kPixel ? 5 : 7;
    if (tok.size() != want) {
      fail("expected " + std::to_string(want) + " values, found " + std::to_string(tok.size()));
    }
    double v[7];
    for (std::size_t k = 0; k < want; ++k) {
      const auto d = to_double(tok[k]);
      if (!d) fail("bad number '" + std::string(tok[k]) + "'");
      v[k] = *d;
    }
    const double score = v[want - 1];
    if (!(score >= 0.0)) fail("score must be nonnegative");
    if (m.mode == MatchMode::kPixel) {
      m.pixels.push_back({v[0], v[1], v[2], v[3], score});
    } else {
      m.lifted.push_back({Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5]), score,
                          Provenance::kVisual});
    }
  }
  if (!have_header) throw FormatError(where(name) + "empty match file");
  return m;
}

std::string format_matches(const MatchFile& m) {
  std::string out = m.mode == MatchMode::kPixel ? "# vigg-matches v1 mode=pixel\n"
                                                : "# vigg-matches v1 mode=lifted\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out += buf;
  };
  if (m.mode == MatchMode::kPixel) {
    for (const auto& p : m.pixels) {
      put(p.u1, ' ');
      put(p.v1, ' ');
      put(p.u2, ' ');
      put(p.v2, ' ');
      put(p.score, '\n');
    }
  } else {
    for (const auto& c : m.lifted) {
      for (int k = 0; k < 3; ++k) put(c.src[k], ' ');
      for (int k = 0; k < 3; ++k) put(c.dst[k], ' ');
      put(c.weight, '\n');
    }
  }
  return out;
}

MatchFile read_matches(const fs::path& path) { return parse_matches(read_file(path), path.string()); }

void write_matches(const fs::path& path, const MatchFile& m) { write_file(path, format_matches(m)); }

// ---------------------------------------------------------------- depth

DepthImage parse_depth(std::string_view bytes, std::string_view name) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) throw FormatError(where(name) + "missing depth header line");
  const auto tok = split_ws(bytes.substr(0, eol));
  if (tok.size() != 3) throw FormatError(where(name) + "depth header must be 'width height scale'");
  const auto w = to_double(tok[0]);
  const auto h = to_double(tok[1]);
  const auto scale = to_double(tok[2]);
  if (!w || !h || !scale || *w < 1 || *h < 1 || *w != std::floor(*w) || *h != std::floor(*h) ||
      !(*scale > 0.0)) {
    throw FormatError(where(name) + "invalid depth header values");
  }
  DepthImage d;
  d.width = static_cast<int>(*w);
  d.height = static_cast<int>(*h);
  const std::size_t n = static_cast<std::size_t>(d.width) * static_cast<std::size_t>(d.height);
  const std::size_t body = bytes.size() - eol - 1;
  if (body != 2 * n) {
    throw FormatError(where(name) + "expected " + std::to_string(2 * n) + " depth bytes after offset " +
                      std::to_string(eol + 1) + ", found " + std::to_string(body));
  }
  d.depth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.depth[i] = load<std::uint16_t>(bytes.data() + eol + 1 + 2 * i) / *scale;
  }
  return d;
}

std::string encode_depth(const DepthImage& depth, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("depth scale must be positive");
  char head[96];
  std::snprintf(head, sizeof head, "%d %d %.17g\n", depth.width, depth.height, scale);
  std::string out = head;
  for (double v : depth.depth) {
    std::uint16_t raw = 0;
    if (std::isfinite(v) && v != 0.0) {
      const double r = std::round(v * scale);
      if (r < 1.0 || r > 65535.0) throw InvalidArgument("depth value not representable at this scale");
      raw = static_cast<std::uint16_t>(r);
    }
    store(out, raw);
  }
  return out;
}

DepthImage read_depth(const fs::path& path) { return parse_depth(read_file(path), path.string()); }

// ---------------------------------------------------------------- JSON

namespace {

json parse_json(std::string_view text, std::string_view name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(where(name) + "invalid JSON at byte " + std::to_string(e.byte));
  }
}

json matrix_json(const RigidTransform& t) {
  const Matrix4 m = t.matrix();
  json a = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) a.push_back(m(r, c));
  }
  return a;
}

RigidTransform matrix_from_json(const json& a, std::string_view name, const char* field) {
  if (!a.is_array() || a.size() != 16) {
    throw FormatError(where(name) + "'" + field + "' must be 16 numbers");
  }
  Matrix4 m;
  for (int k = 0; k < 16; ++k) {
    if (!a[k].is_number()) throw FormatError(where(name) + "'" + field + "' must be 16 numbers");
    m(k / 4, k % 4) = a[k].get<double>();
  }
  try {
    return RigidTransform::from_matrix(m);
  } catch (const Error& e) {
    throw FormatError(where(name) + "'" + field + "': " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, std::string_view name) {
  if (!j.contains(key)) throw FormatError(where(name) + "missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where(name) + "field '" + key + "' has the wrong type");
  }
}

Camera camera_from_json(const json& j, std::string_view name) {
  if (!j.is_object()) throw FormatError(where(name) + "camera must be a JSON object");
  Camera c;
  c.intrinsics.fx = field<double>(j, "fx", name);
  c.intrinsics.fy = field<double>(j, "fy", name);
  c.intrinsics.cx = field<double>(j, "cx", name);
  c.intrinsics.cy = field<double>(j, "cy", name);
  c.intrinsics.width = field<int>(j, "width", name);
  c.intrinsics.height = field<int>(j, "height", name);
  if (j.contains("extrinsic")) c.extrinsic = matrix_from_json(j["extrinsic"], name, "extrinsic");
  try {
    c.intrinsics.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(where(name) + e.what());
  }
  return c;
}

json camera_json(const Camera& c) {
  return {{"fx", c.intrinsics.fx},         {"fy", c.intrinsics.fy},
          {"cx", c.intrinsics.cx},         {"cy", c.intrinsics.cy},
          {"width", c.intrinsics.width},   {"height", c.intrinsics.height},
          {"extrinsic", matrix_json(c.extrinsic)}};
}

json spec_json(const SceneSpec& s) {
  json j = {{"point_count", s.point_count},
            {"extent", s.extent},
            {"overlap_fraction", s.overlap_fraction},
            {"visual_match_count", s.visual_match_count},
            {"visual_inlier_ratio", s.visual_inlier_ratio},
            {"match_noise_sigma", s.match_noise_sigma},
            {"feature_noise_sigma", s.feature_noise_sigma},
            {"point_jitter_sigma", s.point_jitter_sigma},
            {"surface_roughness", s.surface_roughness},
            {"relief_amplitude", s.relief_amplitude},
            {"descriptor",
             {{"normal_radius", s.descriptor.normal_radius},
              {"feature_radius", s.descriptor.feature_radius},
              {"bins_per_angle", s.descriptor.bins_per_angle}}},
            {"seed", s.seed}};
  if (s.ambiguity_cluster) {
    j["ambiguity_cluster"] = {{"size", s.ambiguity_cluster->size},
                              {"offset", matrix_json(s.ambiguity_cluster->offset)}};
  } else {
    j["ambiguity_cluster"] = nullptr;
  }
  return j;
}

}  // namespace

Camera parse_camera(std::string_view text, std::string_view name) {
  return camera_from_json(parse_json(text, name), name);
}

std::string format_camera(const Camera& c) { return camera_json(c).dump(2) + "\n"; }

std::pair<Camera, Camera> read_cameras(const fs::path& path) {
  const std::string name = path.string();
  const json j = parse_json(read_file(path), name);
  if (j.is_object() && j.contains("source") && j.contains("target")) {
    return {camera_from_json(j["source"], name), camera_from_json(j["target"], name)};
  }
  const Camera c = camera_from_json(j, name);
  return {c, c};
}

Truth parse_truth(std::string_view text, std::string_view name) {
  const json j = parse_json(text, name);
  if (!j.is_object() || !j.contains("transform")) {
    throw FormatError(where(name) + "missing field 'transform'");
  }
  Truth t;
  t.transform = matrix_from_json(j["transform"], name, "transform");
  t.spec_json = j.contains("spec") ? j["spec"].dump() : "null";
  return t;
}

std::string format_truth(const RigidTransform& t, const SceneSpec* spec) {
  json j = {{"transform", matrix_json(t)}};
  j["spec"] = spec ? spec_json(*spec) : json(nullptr);
  return j.dump(2) + "\n";
}

Truth read_truth(const fs::path& path) { return parse_truth(read_file(path), path.string()); }

std::string spec_to_json(const SceneSpec& spec) { return spec_json(spec).dump(); }

SceneSpec parse_spec(std::string_view text, const SceneSpec& base, std::string_view name) {
  const json j = parse_json(text, name);
  if (!j.is_object()) throw FormatError(where(name) + "scene spec must be a JSON object");
  SceneSpec s = base;
  auto opt = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = field<std::decay_t<decltype(slot)>>(j, key, name);
  };
  opt("point_count", s.point_count);
  opt("extent", s.extent);
  opt("overlap_fraction", s.overlap_fraction);
  opt("visual_match_count", s.visual_match_count);
  opt("visual_inlier_ratio", s.visual_inlier_ratio);
  opt("match_noise_sigma", s.match_noise_sigma);
  opt("feature_noise_sigma", s.feature_noise_sigma);
  opt("point_jitter_sigma", s.point_jitter_sigma);
  opt("surface_roughness", s.surface_roughness);
  opt("relief_amplitude", s.relief_amplitude);
  opt("seed", s.seed);
  if (j.contains("descriptor")) {
    const json& d = j["descriptor"];
    if (!d.is_object()) throw FormatError(where(name) + "'descriptor' must be an object");
    if (d.contains("normal_radius")) s.descriptor.normal_radius = field<double>(d, "normal_radius", name);
    if (d.contains("feature_radius")) s.descriptor.feature_radius = field<double>(d, "feature_radius", name);
    if (d.contains("bins_per_angle")) s.descriptor.bins_per_angle = field<int>(d, "bins_per_angle", name);
  }
  if (j.contains("ambiguity_cluster")) {
    const json& a = j["ambiguity_cluster"];
    if (a.is_null()) {
      s.ambiguity_cluster.reset();
    } else {
      AmbiguityCluster c;
      if (a.contains("size")) c.size = field<std::size_t>(a, "size", name);
      if (a.contains("offset")) c.offset = matrix_from_json(a["offset"], name, "offset");
      s.ambiguity_cluster = c;
    }
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(where(name) + e.what());
  }
  return s;
}

void write_scene_bundle(const fs::path& dir, const Scene& scene) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_ply(dir / "cloud_p.ply", scene.p);
  write_ply(dir / "cloud_q.ply", scene.q);
  write_features(dir / "features_p.vgf", scene.fp);
  write_features(dir / "features_q.vgf", scene.fq);
  MatchFile m;
  m.mode = MatchMode::kLifted;
  m.lifted = scene.c_vis;
  write_matches(dir / "matches.vgm", m);
  write_file(dir / "truth.json", format_truth(scene.truth, &scene.spec));
}

}  // namespace vigg::io
