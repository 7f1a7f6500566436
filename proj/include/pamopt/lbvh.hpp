// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "pamopt/mesh.hpp"

namespace pamopt {

/// Linear BVH over axis-aligned boxes: Morton-sorted leaves under a radix
/// tree, with a deterministic layout (duplicate codes broken by primitive
/// id). n leaves, exactly n-1 internal nodes.
class Bvh {
 public:
  struct Node {
    Aabb box;
    std::int32_t left = -1;   // child node index, or ~primitive for leaves
    std::int32_t right = -1;
    bool leaf() const { return left == right; }
  };

  static Bvh build(std::span<const Aabb> leaf_boxes);

  /// Recomputes node boxes from new leaf boxes; topology unchanged.
  void refit(std::span<const Aabb> leaf_boxes);

  bool empty() const { return nodes_.empty(); }
  int leaf_count() const { return leaf_count_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return 0; }

  /// Primitive ids whose box overlaps the query (closed intervals: touching
  /// counts), excluding exclude_id. Output sorted ascending.
  std::vector<int> query_overlaps(const Aabb& query, int exclude_id = -1) const;

  template <class F>
  void for_each_overlap(const Aabb& query, F&& fn) const {
    if (nodes_.empty()) return;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[stack[--top]];
      if (!node.box.overlaps(query)) continue;
      if (node.leaf()) {
        fn(~node.left);
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
  }

 private:
  std::vector<Node> nodes_;  // nodes_[0] is the root
  int leaf_count_ = 0;
  std::vector<int> leaf_node_of_prim_;  // prim id -> node index
};

struct NearestHit {
  int primitive = -1;
  double distance = 0;
  Vec3d point = Vec3d::Zero();
};

/// BVH over the triangles of a mesh. Query boxes are inflated by a fixed
/// slack so exactly-touching pairs cannot drop out of the broad phase.
class TriangleBvh {
 public:
  static constexpr double kInflation = 1e-7;

  TriangleBvh() = default;
  static TriangleBvh build(const IndexedMesh& mesh);
  /// Builds over a subset of faces (ids into mesh.faces).
  static TriangleBvh build(const IndexedMesh& mesh, std::vector<int> face_ids);

  /// Recompute boxes after vertex moves (same face set).
  void refit(const IndexedMesh& mesh);

  std::vector<int> query_overlaps(const Aabb& query, int exclude_id = -1) const;

  /// Exact nearest triangle by branch-and-bound; ties by lowest face id.
  NearestHit nearest_primitive(const IndexedMesh& mesh, const Vec3d& point) const;

  const std::vector<int>& face_ids() const { return face_ids_; }
  const Bvh& tree() const { return tree_; }

 private:
  Bvh tree_;
  std::vector<int> face_ids_;  // bvh primitive -> mesh face id
};

}  // namespace pamopt
