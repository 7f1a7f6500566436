// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "pamopt/mesh.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace pamopt {

Vec3d IndexedMesh::face_normal(int f) const {
  const Vec3i& t = faces[f];
  return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
}

Real IndexedMesh::face_area(int f) const { return 0.5 * face_normal(f).norm(); }

Real IndexedMesh::total_area() const {
  Real area = 0;
  for (int f = 0; f < face_count(); ++f) area += face_area(f);
  return area;
}

Aabb IndexedMesh::bounds() const {
  Aabb box;
  for (const Vec3d& v : vertices) box.expand(v);
  return box;
}

std::string IndexedMesh::validate() const {
  const int n = vertex_count();
  for (int f = 0; f < face_count(); ++f) {
    const Vec3i& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n)
        return "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]);
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      return "face " + std::to_string(f) + " has repeated vertex indices";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Static topology analysis

namespace {

struct EdgeInfo {
  std::vector<int> faces;
};

std::map<EdgeKey, EdgeInfo> collect_edges(const IndexedMesh& mesh) {
  std::map<EdgeKey, EdgeInfo> edges;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3i& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) edges[EdgeKey(t[k], t[(k + 1) % 3])].faces.push_back(f);
  }
  return edges;
}

// A vertex one-ring is a single fan when its incident faces form one
// connected component under shared-at-v manifold edges, and the component is
// a simple chain or cycle (no face has three neighbors at v).
bool vertex_is_single_fan(const IndexedMesh& mesh, int v, const std::vector<int>& inc_faces,
                          const std::map<EdgeKey, EdgeInfo>& edges) {
  if (inc_faces.empty()) return true;
  const int m = static_cast<int>(inc_faces.size());
  std::map<int, int> local;  // face id -> local index
  for (int i = 0; i < m; ++i) local[inc_faces[i]] = i;

  std::vector<std::vector<int>> nbr(m);
  for (int i = 0; i < m; ++i) {
    const Vec3i& t = mesh.faces[inc_faces[i]];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a != v && b != v) continue;
      const EdgeInfo& info = edges.at(EdgeKey(a, b));
      if (info.faces.size() != 2) continue;  // boundary or non-manifold edge
      for (int g : info.faces) {
        if (g == inc_faces[i]) continue;
        auto it = local.find(g);
        if (it != local.end()) nbr[i].push_back(it->second);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    std::sort(nbr[i].begin(), nbr[i].end());
    nbr[i].erase(std::unique(nbr[i].begin(), nbr[i].end()), nbr[i].end());
    if (nbr[i].size() > 2) return false;
  }
  // connectivity
  std::vector<char> seen(m, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j : nbr[i])
      if (!seen[j]) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
  }
  return count == m;
}

}  // namespace

TopologySummary analyze_topology(const IndexedMesh& mesh) {
  TopologySummary out;
  auto edges = collect_edges(mesh);

  bool edges_ok = true;
  for (const auto& [key, info] : edges) {
    const size_t deg = info.faces.size();
    if (deg == 1) ++out.boundary_edge_count;
    if (deg != 1 && deg != 2) {
      out.nonmanifold_edges.push_back(key);
      edges_ok = false;
    }
  }

  std::vector<std::vector<int>> inc(mesh.vertex_count());
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) inc[mesh.faces[f][k]].push_back(f);

  bool vertices_ok = true;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    std::sort(inc[v].begin(), inc[v].end());
    inc[v].erase(std::unique(inc[v].begin(), inc[v].end()), inc[v].end());
    if (!vertex_is_single_fan(mesh, v, inc[v], edges)) {
      out.nonmanifold_vertices.push_back(v);
      vertices_ok = false;
    }
  }

  out.manifold = edges_ok && vertices_ok;
  out.watertight = out.manifold && out.boundary_edge_count == 0;

  int used_vertices = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    if (!inc[v].empty()) ++used_vertices;
  out.euler_characteristic =
      used_vertices - static_cast<int>(edges.size()) + mesh.face_count();
  return out;
}

HalfEdgeView make_halfedge_view(const IndexedMesh& mesh) {
  HalfEdgeView view;
  view.twin.assign(mesh.face_count() * 3, -1);
  view.vertex_out.assign(mesh.vertex_count(), -1);

  std::map<std::pair<int, int>, int> directed;  // (from,to) -> halfedge
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3i& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const int h = 3 * f + k;
      const int from = t[k], to = t[(k + 1) % 3];
      directed[{from, to}] = h;
      if (view.vertex_out[from] < 0) view.vertex_out[from] = h;
    }
  }
  std::map<EdgeKey, int> undirected_count;
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Vec3i& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) undirected_count[EdgeKey(t[k], t[(k + 1) % 3])]++;
  }
  for (const auto& [key, h] : directed) {
    auto opp = directed.find({key.second, key.first});
    if (opp == directed.end()) continue;
    if (undirected_count.at(EdgeKey(key.first, key.second)) != 2) continue;
    view.twin[h] = opp->second;
    view.twin[opp->second] = h;
  }
  return view;
}

// ---------------------------------------------------------------------------
// HalfEdgeAdjacency

HalfEdgeAdjacency::HalfEdgeAdjacency(IndexedMesh& mesh) : mesh_(&mesh) {
  const std::string err = mesh.validate();
  if (!err.empty()) throw std::invalid_argument("invalid mesh: " + err);

  vertex_faces_.assign(mesh.vertex_count(), {});
  vertex_alive_.assign(mesh.vertex_count(), 1);
  face_alive_.assign(mesh.face_count(), 1);
  alive_faces_ = mesh.face_count();
  alive_vertices_ = mesh.vertex_count();
  for (int f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k) vertex_faces_[mesh.faces[f][k]].push_back(f);
  for (auto& list : vertex_faces_) std::sort(list.begin(), list.end());
}

HalfEdgeAdjacency build_adjacency(IndexedMesh& mesh) { return HalfEdgeAdjacency(mesh); }

void HalfEdgeAdjacency::erase_incidence(int v, int f) {
  auto& list = vertex_faces_[v];
  auto it = std::lower_bound(list.begin(), list.end(), f);
  if (it != list.end() && *it == f) list.erase(it);
}

void HalfEdgeAdjacency::insert_incidence(int v, int f) {
  auto& list = vertex_faces_[v];
  auto it = std::lower_bound(list.begin(), list.end(), f);
  if (it == list.end() || *it != f) list.insert(it, f);
}

bool HalfEdgeAdjacency::edge_exists(int a, int b) const {
  if (a == b) return false;
  const auto& fa = vertex_faces_[a];
  for (int f : fa) {
    const Vec3i& t = mesh_->faces[f];
    if (t[0] == b || t[1] == b || t[2] == b) return true;
  }
  return false;
}

std::vector<int> HalfEdgeAdjacency::faces_of_edge(int a, int b) const {
  std::vector<int> out;
  for (int f : vertex_faces_[a]) {
    const Vec3i& t = mesh_->faces[f];
    if (t[0] == b || t[1] == b || t[2] == b) out.push_back(f);
  }
  return out;  // vertex_faces_ sorted => out sorted
}

bool HalfEdgeAdjacency::is_boundary_edge(int a, int b) const {
  return faces_of_edge(a, b).size() == 1;
}

bool HalfEdgeAdjacency::is_boundary_vertex(int v) const {
  // count directed edges around v; an undirected edge at v seen by only one
  // incident face is a boundary edge
  std::vector<int> ring;
  for (int f : vertex_faces_[v]) {
    const Vec3i& t = mesh_->faces[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] != v) ring.push_back(t[k]);
  }
  std::sort(ring.begin(), ring.end());
  for (size_t i = 0; i < ring.size();) {
    size_t j = i;
    while (j < ring.size() && ring[j] == ring[i]) ++j;
    if (j - i == 1) return true;
    i = j;
  }
  return false;
}

std::vector<EdgeKey> HalfEdgeAdjacency::nonmanifold_edges() const {
  std::map<EdgeKey, int> count;
  for (int f = 0; f < mesh_->face_count(); ++f) {
    if (!face_alive_[f]) continue;
    const Vec3i& t = mesh_->faces[f];
    for (int k = 0; k < 3; ++k) count[EdgeKey(t[k], t[(k + 1) % 3])]++;
  }
  std::vector<EdgeKey> out;
  for (const auto& [key, c] : count)
    if (c != 1 && c != 2) out.push_back(key);
  return out;
}

std::vector<int> HalfEdgeAdjacency::nonmanifold_vertices() const {
  return topology_summary().nonmanifold_vertices;
}

int HalfEdgeAdjacency::boundary_edge_count() const {
  return topology_summary().boundary_edge_count;
}

TopologySummary HalfEdgeAdjacency::topology_summary() const { return analyze_topology(compact()); }

IndexedMesh HalfEdgeAdjacency::compact() const {
  IndexedMesh out;
  std::vector<int> remap(mesh_->vertex_count(), -1);
  for (int v = 0; v < mesh_->vertex_count(); ++v) {
    if (!vertex_alive_[v] || vertex_faces_[v].empty()) continue;
    remap[v] = out.vertex_count();
    out.vertices.push_back(mesh_->vertices[v]);
  }
  for (int f = 0; f < mesh_->face_count(); ++f) {
    if (!face_alive_[f]) continue;
    const Vec3i& t = mesh_->faces[f];
    out.faces.push_back(Vec3i(remap[t[0]], remap[t[1]], remap[t[2]]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Link condition

namespace {
constexpr int kVirtualBoundaryVertex = -2;
}

bool HalfEdgeAdjacency::link_condition_holds(int a, int b) const {
  if (!edge_exists(a, b)) throw std::invalid_argument("link_condition_holds: unknown edge");

  // link vertices of a vertex v: every other vertex of each incident face,
  // plus the virtual vertex when v lies on the boundary
  auto link_vertices = [&](int v) {
    std::set<int> out;
    for (int f : vertex_faces_[v]) {
      const Vec3i& t = mesh_->faces[f];
      for (int k = 0; k < 3; ++k)
        if (t[k] != v) out.insert(t[k]);
    }
    if (is_boundary_vertex(v)) out.insert(kVirtualBoundaryVertex);
    return out;
  };

  const std::set<int> la = link_vertices(a);
  const std::set<int> lb = link_vertices(b);

  std::set<int> common;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(),
                        std::inserter(common, common.begin()));

  // link of edge ab: opposite vertices of its incident faces, plus the
  // virtual vertex when ab is a boundary edge
  std::set<int> link_ab;
  for (int f : faces_of_edge(a, b)) {
    const Vec3i& t = mesh_->faces[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] != a && t[k] != b) link_ab.insert(t[k]);
  }
  if (is_boundary_edge(a, b)) link_ab.insert(kVirtualBoundaryVertex);

  if (common != link_ab) return false;

  // No edge may lie in link(a) n link(b): an edge (x,y) is in link(v) iff
  // face (v,x,y) exists. Such a shared edge cannot be in link(ab), which
  // contains vertices only.
  for (int x : common) {
    if (x == kVirtualBoundaryVertex) continue;
    for (int y : common) {
      if (y == kVirtualBoundaryVertex || y <= x) continue;
      bool in_la = false, in_lb = false;
      for (int f : faces_of_edge(x, y)) {
        const Vec3i& t = mesh_->faces[f];
        if (t[0] == a || t[1] == a || t[2] == a) in_la = true;
        if (t[0] == b || t[1] == b || t[2] == b) in_lb = true;
      }
      if (in_la && in_lb) return false;
    }
    // virtual edge (virtual, x) is in link(v) iff (v, x) is a boundary edge;
    // shared for a and b means the collapse would pinch the boundary at x
    if (common.count(kVirtualBoundaryVertex)) {
      if (is_boundary_edge(a, x) && is_boundary_edge(b, x)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Collapse / undo

std::optional<CollapseRecord> HalfEdgeAdjacency::collapse_edge(int a, int b,
                                                               const Vec3d& new_position) {
  if (!link_condition_holds(a, b)) return std::nullopt;

  CollapseRecord rec;
  rec.kept = a;
  rec.removed = b;
  rec.kept_old_position = mesh_->vertices[a];

  const std::vector<int> b_faces = vertex_faces_[b];  // copy: mutated below
  for (int f : b_faces) {
    const Vec3i t = mesh_->faces[f];
    rec.modified_faces.emplace_back(f, t);
    const bool has_a = (t[0] == a || t[1] == a || t[2] == a);
    if (has_a) {
      rec.deleted_faces.push_back(f);
      face_alive_[f] = 0;
      --alive_faces_;
      for (int k = 0; k < 3; ++k) erase_incidence(t[k], f);
    } else {
      Vec3i nt = t;
      for (int k = 0; k < 3; ++k)
        if (nt[k] == b) nt[k] = a;
      mesh_->faces[f] = nt;
      erase_incidence(b, f);
      insert_incidence(a, f);
    }
  }
  mesh_->vertices[a] = new_position;
  vertex_alive_[b] = 0;
  --alive_vertices_;
  return rec;
}

void HalfEdgeAdjacency::undo_collapse(const CollapseRecord& rec) {
  // detach every touched face from its current incidences
  for (const auto& [f, original] : rec.modified_faces) {
    if (face_alive_[f]) {
      const Vec3i& t = mesh_->faces[f];
      for (int k = 0; k < 3; ++k) erase_incidence(t[k], f);
    }
  }
  for (int f : rec.deleted_faces) {
    face_alive_[f] = 1;
    ++alive_faces_;
  }
  for (const auto& [f, original] : rec.modified_faces) {
    mesh_->faces[f] = original;
    for (int k = 0; k < 3; ++k) insert_incidence(original[k], f);
  }
  mesh_->vertices[rec.kept] = rec.kept_old_position;
  vertex_alive_[rec.removed] = 1;
  ++alive_vertices_;
}

}  // namespace pamopt
