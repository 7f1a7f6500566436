// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "pamopt/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace pamopt {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what, long line = -1) {
  std::string msg = path + ": " + what;
  if (line >= 0) msg += " (line " + std::to_string(line) + ")";
  throw std::runtime_error(msg);
}

std::string lowercase_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void add_polygon(IndexedMesh& mesh, const std::vector<int>& poly, LoadStats& stats) {
  if (poly.size() > 3) stats.polygons_triangulated++;
  for (size_t k = 1; k + 1 < poly.size(); ++k) {
    const int a = poly[0], b = poly[k], c = poly[k + 1];
    if (a == b || b == c || a == c) {
      stats.degenerate_faces_dropped++;
      continue;
    }
    mesh.faces.push_back(Vec3i(a, b, c));
  }
}

// ---- OBJ ----

IndexedMesh load_obj(const std::string& path, LoadStats& stats) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  IndexedMesh mesh;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3d p;
      if (!(ss >> p[0] >> p[1] >> p[2])) fail(path, "malformed vertex", lineno);
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ss >> tok) {
        // index may carry /vt/vn suffixes
        const std::string head = tok.substr(0, tok.find('/'));
        int idx = 0;
        auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || p != head.data() + head.size())
          fail(path, "malformed face index '" + tok + "'", lineno);
        if (idx < 0) idx = mesh.vertex_count() + idx;  // relative indexing
        else idx -= 1;                                  // OBJ is 1-based
        if (idx < 0 || idx >= mesh.vertex_count())
          fail(path, "face index out of range", lineno);
        poly.push_back(idx);
      }
      if (poly.size() < 3) fail(path, "face with fewer than 3 vertices", lineno);
      add_polygon(mesh, poly, stats);
    }
  }
  return mesh;
}

void save_obj(const std::string& path, const IndexedMesh& mesh) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out.precision(17);
  for (const Vec3d& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  for (const Vec3i& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

// ---- PLY ----

struct PlyProperty {
  std::string type;
  std::string name;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  long count = 0;
  std::vector<PlyProperty> props;
};

size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw std::runtime_error("unknown ply type: " + t);
}

double read_binary_scalar(std::istream& in, const std::string& type) {
  unsigned char buf[8];
  const size_t n = ply_type_size(type);
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
  auto as = [&]<class T>(T) {
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return static_cast<double>(v);
  };
  if (type == "char" || type == "int8") return as(std::int8_t{});
  if (type == "uchar" || type == "uint8") return as(std::uint8_t{});
  if (type == "short" || type == "int16") return as(std::int16_t{});
  if (type == "ushort" || type == "uint16") return as(std::uint16_t{});
  if (type == "int" || type == "int32") return as(std::int32_t{});
  if (type == "uint" || type == "uint32") return as(std::uint32_t{});
  if (type == "float" || type == "float32") return as(float{});
  return as(double{});
}

IndexedMesh load_ply(const std::string& path, LoadStats& stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");

  std::string line;
  long lineno = 0;
  if (!std::getline(in, line) || line.substr(0, 3) != "ply") fail(path, "missing ply magic", 1);
  ++lineno;

  std::string format;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "comment" || tag == "obj_info" || tag.empty()) continue;
    if (tag == "format") {
      ss >> format;
      if (format != "ascii" && format != "binary_little_endian")
        fail(path, "unsupported ply format '" + format + "'", lineno);
    } else if (tag == "element") {
      PlyElement el;
      ss >> el.name >> el.count;
      elements.push_back(el);
    } else if (tag == "property") {
      if (elements.empty()) fail(path, "property before element", lineno);
      PlyProperty p;
      std::string t;
      ss >> t;
      if (t == "list") {
        p.is_list = true;
        ss >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ss >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (tag == "end_header") {
      break;
    } else {
      fail(path, "unexpected header line '" + tag + "'", lineno);
    }
  }

  IndexedMesh mesh;
  const bool binary = (format == "binary_little_endian");
  for (const PlyElement& el : elements) {
    const bool is_vertex = (el.name == "vertex");
    const bool is_face = (el.name == "face");
    int xi = -1, yi = -1, zi = -1;
    for (size_t i = 0; i < el.props.size(); ++i) {
      if (el.props[i].name == "x") xi = static_cast<int>(i);
      if (el.props[i].name == "y") yi = static_cast<int>(i);
      if (el.props[i].name == "z") zi = static_cast<int>(i);
    }
    if (is_vertex && (xi < 0 || yi < 0 || zi < 0)) fail(path, "vertex element lacks x/y/z");

    for (long r = 0; r < el.count; ++r) {
      std::vector<double> scalars;
      std::vector<long> list;
      if (binary) {
        for (const PlyProperty& p : el.props) {
          if (p.is_list) {
            const long n = static_cast<long>(read_binary_scalar(in, p.count_type));
            for (long k = 0; k < n; ++k)
              list.push_back(static_cast<long>(read_binary_scalar(in, p.type)));
          } else {
            scalars.push_back(read_binary_scalar(in, p.type));
          }
        }
        if (!in) fail(path, "truncated binary body at element '" + el.name + "' row " +
                                std::to_string(r));
      } else {
        if (!std::getline(in, line))
          fail(path, "truncated ascii body at element '" + el.name + "' row " + std::to_string(r));
        ++lineno;
        std::istringstream ss(line);
        for (const PlyProperty& p : el.props) {
          if (p.is_list) {
            long n = 0;
            if (!(ss >> n)) fail(path, "malformed list count", lineno);
            for (long k = 0; k < n; ++k) {
              long v;
              if (!(ss >> v)) fail(path, "malformed list entry", lineno);
              list.push_back(v);
            }
          } else {
            double v;
            if (!(ss >> v)) fail(path, "malformed scalar", lineno);
            scalars.push_back(v);
          }
        }
      }
      if (is_vertex) {
        mesh.vertices.push_back(Vec3d(scalars[xi], scalars[yi], scalars[zi]));
      } else if (is_face && !list.empty()) {
        std::vector<int> poly;
        for (long v : list) {
          if (v < 0 || v >= mesh.vertex_count()) fail(path, "face index out of range");
          poly.push_back(static_cast<int>(v));
        }
        if (poly.size() >= 3) add_polygon(mesh, poly, stats);
      }
    }
  }
  return mesh;
}

void save_ply(const std::string& path, const IndexedMesh& mesh, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
  out << "element vertex " << mesh.vertex_count() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  out << "element face " << mesh.face_count() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  if (binary) {
    for (const Vec3d& v : mesh.vertices)
      out.write(reinterpret_cast<const char*>(v.data()), 24);
    for (const Vec3i& f : mesh.faces) {
      const unsigned char n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      const std::int32_t idx[3] = {f[0], f[1], f[2]};
      out.write(reinterpret_cast<const char*>(idx), 12);
    }
  } else {
    out.precision(17);
    for (const Vec3d& v : mesh.vertices) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const Vec3i& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  }
}

// ---- STL ----

struct PointKey {
  double x, y, z;
  bool operator==(const PointKey&) const = default;
};
struct PointKeyHash {
  size_t operator()(const PointKey& k) const {
    auto h = [](double d) {
      std::uint64_t u;
      std::memcpy(&u, &d, 8);
      return u;
    };
    size_t s = std::hash<std::uint64_t>{}(h(k.x));
    s ^= std::hash<std::uint64_t>{}(h(k.y)) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= std::hash<std::uint64_t>{}(h(k.z)) + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    return s;
  }
};

class StlWelder {
 public:
  explicit StlWelder(IndexedMesh& mesh, LoadStats& stats) : mesh_(mesh), stats_(stats) {}
  int add(const Vec3d& p) {
    const PointKey key{p[0], p[1], p[2]};
    auto [it, inserted] = index_.try_emplace(key, mesh_.vertex_count());
    if (inserted) mesh_.vertices.push_back(p);
    else stats_.vertices_welded++;
    return it->second;
  }

 private:
  IndexedMesh& mesh_;
  LoadStats& stats_;
  std::unordered_map<PointKey, int, PointKeyHash> index_;
};

IndexedMesh load_stl(const std::string& path, LoadStats& stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  char head[6] = {};
  in.read(head, 5);
  in.seekg(0);

  IndexedMesh mesh;
  StlWelder weld(mesh, stats);

  const bool ascii = std::strncmp(head, "solid", 5) == 0;
  if (ascii) {
    // a binary file can also start with "solid"; verify by scanning for "facet"
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.find("facet") != std::string::npos) {
      std::istringstream ss(content);
      std::string tok;
      std::vector<int> tri;
      long word = 0;
      while (ss >> tok) {
        ++word;
        if (tok == "vertex") {
          Vec3d p;
          if (!(ss >> p[0] >> p[1] >> p[2])) fail(path, "malformed vertex at word " + std::to_string(word));
          tri.push_back(weld.add(p));
          if (tri.size() == 3) {
            add_polygon(mesh, tri, stats);
            tri.clear();
          }
        }
      }
      if (!tri.empty()) fail(path, "dangling vertices at end of ascii stl");
      return mesh;
    }
    in.clear();
    in.seekg(0);
  }

  // binary: 80-byte header, uint32 count, then 50-byte records
  char header[80];
  in.read(header, 80);
  std::uint32_t count = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  if (!in) fail(path, "truncated binary stl header");
  for (std::uint32_t i = 0; i < count; ++i) {
    float rec[12];
    in.read(reinterpret_cast<char*>(rec), 48);
    char attr[2];
    in.read(attr, 2);
    if (!in) fail(path, "truncated binary stl at facet " + std::to_string(i) + " (offset " +
                            std::to_string(84 + 50l * i) + ")");
    std::vector<int> tri;
    for (int k = 0; k < 3; ++k)
      tri.push_back(weld.add(Vec3d(rec[3 + 3 * k], rec[4 + 3 * k], rec[5 + 3 * k])));
    add_polygon(mesh, tri, stats);
  }
  return mesh;
}

}  // namespace

IndexedMesh load_mesh(const std::string& path, LoadStats* stats) {
  LoadStats local;
  LoadStats& s = stats ? *stats : local;
  s = LoadStats{};
  const std::string ext = lowercase_ext(path);
  IndexedMesh mesh;
  if (ext == "obj") mesh = load_obj(path, s);
  else if (ext == "ply") mesh = load_ply(path, s);
  else if (ext == "stl") mesh = load_stl(path, s);
  else fail(path, "unsupported mesh format '" + ext + "'");
  if (mesh.faces.empty()) fail(path, "empty mesh (no faces)");
  const std::string err = mesh.validate();
  if (!err.empty()) fail(path, err);
  return mesh;
}

void save_mesh(const std::string& path, const IndexedMesh& mesh, bool ply_binary) {
  const std::string ext = lowercase_ext(path);
  if (ext == "obj") save_obj(path, mesh);
  else if (ext == "ply") save_ply(path, mesh, ply_binary);
  else fail(path, "unsupported output format '" + ext + "'");
}

NormalizationTransform normalize_unit_cube(IndexedMesh& mesh, Real padding) {
  if (mesh.vertices.empty()) throw std::runtime_error("normalize_unit_cube: empty mesh");
  if (padding < 0 || padding >= 0.5)
    throw std::runtime_error("normalize_unit_cube: padding must be in [0, 0.5)");
  const Aabb box = mesh.bounds();
  const Vec3d ext = box.extent();
  const Real longest = ext.maxCoeff();
  if (!(longest > 0)) throw std::runtime_error("normalize_unit_cube: all vertices coincide");

  NormalizationTransform t;
  t.padding = padding;
  t.scale = (1.0 - 2.0 * padding) / longest;
  t.translation = Vec3d::Constant(0.5) - box.center() * t.scale;
  for (Vec3d& v : mesh.vertices) v = t.apply(v);
  return t;
}

void denormalize(IndexedMesh& mesh, const NormalizationTransform& t) {
  for (Vec3d& v : mesh.vertices) v = t.invert(v);
}

}  // namespace pamopt
