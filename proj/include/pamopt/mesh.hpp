// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pamopt/types.hpp"

namespace pamopt {

/// Triangle mesh as vertex positions plus index triples. Faces may form an
/// arbitrary soup; topological guarantees are established by analysis, not
/// by construction.
struct IndexedMesh {
  std::vector<Vec3d> vertices;
  std::vector<Vec3i> faces;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int face_count() const { return static_cast<int>(faces.size()); }

  Vec3d face_normal(int f) const;  // unnormalized (2x area vector)
  Real face_area(int f) const;
  Real total_area() const;
  Aabb bounds() const;

  /// Checks index ranges and repeated indices within faces.
  /// Returns an empty string when the mesh is structurally valid.
  std::string validate() const;
};

/// Undirected edge identified by its sorted endpoint indices.
struct EdgeKey {
  int a = -1, b = -1;
  EdgeKey() = default;
  EdgeKey(int u, int v) : a(u < v ? u : v), b(u < v ? v : u) {}
  bool operator==(const EdgeKey&) const = default;
  auto operator<=>(const EdgeKey&) const = default;
};

struct TopologySummary {
  bool manifold = false;
  bool watertight = false;
  int euler_characteristic = 0;
  int boundary_edge_count = 0;
  std::vector<EdgeKey> nonmanifold_edges;  // incident-face count not in {1,2}
  std::vector<int> nonmanifold_vertices;   // one-ring is not a single fan
};

/// Exact state needed to reverse one edge collapse.
struct CollapseRecord {
  int kept = -1;    // surviving vertex (a)
  int removed = -1; // tombstoned vertex (b)
  Vec3d kept_old_position;
  std::vector<std::pair<int, Vec3i>> modified_faces;  // face id -> pre-collapse triple
  std::vector<int> deleted_faces;                     // subset of modified_faces ids
};

/// Halfedge view of a static mesh, materialized on demand. Halfedge h of
/// face f corner k has id 3*f + k and runs from corner k to corner (k+1)%3.
struct HalfEdgeView {
  std::vector<int> twin;        // -1 on boundary or non-manifold edges
  std::vector<int> vertex_out;  // one outgoing halfedge per vertex, -1 if isolated
  int next(int h) const { return (h / 3) * 3 + (h % 3 + 1) % 3; }
  int face(int h) const { return h / 3; }
};

/// Vertex/edge adjacency over an IndexedMesh, valid for non-manifold soups
/// and maintained exactly through edge collapses and their undos. Vertex and
/// face ids are stable: removals tombstone, compact() produces a dense copy.
class HalfEdgeAdjacency {
 public:
  explicit HalfEdgeAdjacency(IndexedMesh& mesh);

  const IndexedMesh& mesh() const { return *mesh_; }

  bool vertex_alive(int v) const { return vertex_alive_[v] != 0; }
  bool face_alive(int f) const { return face_alive_[f] != 0; }
  int alive_face_count() const { return alive_faces_; }
  int alive_vertex_count() const { return alive_vertices_; }

  /// Incident alive faces of a vertex, sorted ascending.
  const std::vector<int>& faces_of_vertex(int v) const { return vertex_faces_[v]; }

  bool edge_exists(int a, int b) const;
  /// Alive faces containing both endpoints, sorted ascending.
  std::vector<int> faces_of_edge(int a, int b) const;
  bool is_boundary_vertex(int v) const;
  bool is_boundary_edge(int a, int b) const;

  std::vector<EdgeKey> nonmanifold_edges() const;
  std::vector<int> nonmanifold_vertices() const;
  int boundary_edge_count() const;

  /// link(a) n link(b) == link(ab) over vertices and edges, with the open
  /// boundary treated as a virtual vertex adjacent to all boundary vertices.
  /// Throws std::invalid_argument when the edge does not exist.
  bool link_condition_holds(int a, int b) const;

  /// Merges b into a at new_position. Returns the undo record, or nullopt
  /// (mesh untouched) when the link condition fails.
  std::optional<CollapseRecord> collapse_edge(int a, int b, const Vec3d& new_position);
  void undo_collapse(const CollapseRecord& record);

  TopologySummary topology_summary() const;

  /// Dense copy of the alive submesh, preserving relative order.
  IndexedMesh compact() const;

 private:
  void erase_incidence(int v, int f);
  void insert_incidence(int v, int f);

  IndexedMesh* mesh_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<std::uint8_t> vertex_alive_;
  std::vector<std::uint8_t> face_alive_;
  int alive_faces_ = 0;
  int alive_vertices_ = 0;
};

HalfEdgeAdjacency build_adjacency(IndexedMesh& mesh);

/// Manifold/watertight classification and Euler characteristic of a soup.
TopologySummary analyze_topology(const IndexedMesh& mesh);

/// Twin/next halfedge arrays for a static mesh (twin only across 2-manifold
/// edges). Intended for structural audits.
HalfEdgeView make_halfedge_view(const IndexedMesh& mesh);

}  // namespace pamopt
