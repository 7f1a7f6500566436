// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "pamopt/lbvh.hpp"

#include <algorithm>
#include <bit>

#include "pamopt/distance.hpp"
#include "pamopt/parallel.hpp"

namespace pamopt {
namespace {

std::uint32_t expand_bits(std::uint32_t v) {
  v = (v * 0x00010001u) & 0xFF0000FFu;
  v = (v * 0x00000101u) & 0x0F00F00Fu;
  v = (v * 0x00000011u) & 0xC30C30C3u;
  v = (v * 0x00000005u) & 0x49249249u;
  return v;
}

// 30-bit Morton code, 10 bits per axis, from a point in [0,1]^3.
std::uint32_t morton3(const Vec3d& unit) {
  auto quantize = [](double x) {
    return static_cast<std::uint32_t>(std::clamp(x * 1024.0, 0.0, 1023.0));
  };
  return (expand_bits(quantize(unit[0])) << 2) | (expand_bits(quantize(unit[1])) << 1) |
         expand_bits(quantize(unit[2]));
}

}  // namespace

Bvh Bvh::build(std::span<const Aabb> leaf_boxes) {
  Bvh bvh;
  const int n = static_cast<int>(leaf_boxes.size());
  bvh.leaf_count_ = n;
  if (n == 0) return bvh;

  Aabb scene;
  for (const Aabb& b : leaf_boxes) scene.expand(b);
  const Vec3d ext = scene.extent().cwiseMax(1e-300);

  // unique 64-bit keys: morton code in the high bits, primitive id below
  std::vector<std::uint64_t> keys(n);
  parallel_for(0, n, [&](std::int64_t i) {
    const Vec3d c = leaf_boxes[i].center();
    const Vec3d unit = (c - scene.lo).cwiseQuotient(ext);
    keys[i] = (static_cast<std::uint64_t>(morton3(unit)) << 32) | static_cast<std::uint32_t>(i);
  });
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<std::uint64_t> sorted_keys(n);
  for (int i = 0; i < n; ++i) sorted_keys[i] = keys[order[i]];

  if (n == 1) {
    Node leaf;
    leaf.box = leaf_boxes[0];
    leaf.left = leaf.right = ~0;
    bvh.nodes_.push_back(leaf);
    bvh.leaf_node_of_prim_ = {0};
    return bvh;
  }

  // Karras 2012 radix tree: internal nodes 0..n-2, leaves n-1..2n-2.
  const int internal = n - 1;
  bvh.nodes_.assign(2 * n - 1, Node{});
  std::vector<std::int32_t> parent(2 * n - 1, -1);
  bvh.leaf_node_of_prim_.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    Node& leaf = bvh.nodes_[internal + i];
    leaf.left = leaf.right = ~order[i];
    bvh.leaf_node_of_prim_[order[i]] = internal + i;
  }

  auto delta = [&](int i, int j) -> int {
    if (j < 0 || j >= n) return -1;
    const std::uint64_t x = sorted_keys[i] ^ sorted_keys[j];
    return std::countl_zero(x);  // keys are unique, x != 0 for i != j
  };

  parallel_for(0, internal, [&](std::int64_t i_) {
    const int i = static_cast<int>(i_);
    const int d = delta(i, i + 1) > delta(i, i - 1) ? 1 : -1;
    const int delta_min = delta(i, i - d);
    int lmax = 2;
    while (delta(i, i + lmax * d) > delta_min) lmax *= 2;
    int l = 0;
    for (int t = lmax / 2; t >= 1; t /= 2)
      if (delta(i, i + (l + t) * d) > delta_min) l += t;
    const int j = i + l * d;
    const int delta_node = delta(i, j);
    int s = 0;
    for (int t = (l + 1) / 2; ; t = (t + 1) / 2) {
      if (delta(i, i + (s + t) * d) > delta_node) s += t;
      if (t == 1) break;
    }
    const int gamma = i + s * d + std::min(d, 0);
    const int left = (std::min(i, j) == gamma) ? internal + gamma : gamma;
    const int right = (std::max(i, j) == gamma + 1) ? internal + gamma + 1 : gamma + 1;
    bvh.nodes_[i].left = left;
    bvh.nodes_[i].right = right;
    parent[left] = i;
    parent[right] = i;
  });

  bvh.refit(leaf_boxes);
  return bvh;
}

void Bvh::refit(std::span<const Aabb> leaf_boxes) {
  if (nodes_.empty()) return;
  // nodes are stored with every internal node at a lower index than both of
  // its children only in the leaf block; walk bottom-up by index order:
  // internal nodes form a tree where children always have a HIGHER index
  // than... not guaranteed by Karras layout, so recurse instead.
  struct Frame {
    int node;
    bool expanded;
  };
  std::vector<Frame> stack;
  stack.push_back({0, false});
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    Node& nd = nodes_[node];
    if (nd.leaf()) {
      nd.box = leaf_boxes[~nd.left];
      continue;
    }
    if (expanded) {
      nd.box = nodes_[nd.left].box;
      nd.box.expand(nodes_[nd.right].box);
    } else {
      stack.push_back({node, true});
      stack.push_back({nd.left, false});
      stack.push_back({nd.right, false});
    }
  }
}

std::vector<int> Bvh::query_overlaps(const Aabb& query, int exclude_id) const {
  std::vector<int> out;
  for_each_overlap(query, [&](int prim) {
    if (prim != exclude_id) out.push_back(prim);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

TriangleBvh TriangleBvh::build(const IndexedMesh& mesh) {
  std::vector<int> ids(mesh.face_count());
  for (int i = 0; i < mesh.face_count(); ++i) ids[i] = i;
  return build(mesh, std::move(ids));
}

TriangleBvh TriangleBvh::build(const IndexedMesh& mesh, std::vector<int> face_ids) {
  TriangleBvh out;
  out.face_ids_ = std::move(face_ids);
  std::vector<Aabb> boxes(out.face_ids_.size());
  parallel_for(0, static_cast<std::int64_t>(boxes.size()), [&](std::int64_t i) {
    const Vec3i& t = mesh.faces[out.face_ids_[i]];
    boxes[i] = triangle_aabb(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    boxes[i].inflate(kInflation);
  });
  out.tree_ = Bvh::build(boxes);
  return out;
}

void TriangleBvh::refit(const IndexedMesh& mesh) {
  std::vector<Aabb> boxes(face_ids_.size());
  parallel_for(0, static_cast<std::int64_t>(boxes.size()), [&](std::int64_t i) {
    const Vec3i& t = mesh.faces[face_ids_[i]];
    boxes[i] = triangle_aabb(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    boxes[i].inflate(kInflation);
  });
  tree_.refit(boxes);
}

std::vector<int> TriangleBvh::query_overlaps(const Aabb& query, int exclude_id) const {
  std::vector<int> out;
  tree_.for_each_overlap(query, [&](int prim) {
    const int face = face_ids_[prim];
    if (face != exclude_id) out.push_back(face);
  });
  std::sort(out.begin(), out.end());
  return out;
}

NearestHit TriangleBvh::nearest_primitive(const IndexedMesh& mesh, const Vec3d& point) const {
  NearestHit best;
  best.distance = kInf;
  if (tree_.empty()) return best;
  double best_sq = kInf;

  // depth-first with nearer child first; prune on strictly-worse bounds so
  // an equal-distance lower id deeper in the tree still wins
  struct Entry {
    int node;
    double bound;
  };
  std::vector<Entry> stack;
  stack.push_back({tree_.root(), tree_.nodes()[tree_.root()].box.sq_distance(point)});
  while (!stack.empty()) {
    const Entry e = stack.back();
    stack.pop_back();
    if (e.bound > best_sq) continue;
    const Bvh::Node& node = tree_.nodes()[e.node];
    if (node.leaf()) {
      const int face = face_ids_[~node.left];
      const Vec3i& t = mesh.faces[face];
      Vec3d closest;
      const double d2 = point_triangle_sq_distance<double>(
          point, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], &closest);
      if (d2 < best_sq || (d2 == best_sq && face < best.primitive)) {
        best_sq = d2;
        best.primitive = face;
        best.point = closest;
      }
      continue;
    }
    const double dl = tree_.nodes()[node.left].box.sq_distance(point);
    const double dr = tree_.nodes()[node.right].box.sq_distance(point);
    // push the farther child first
    if (dl <= dr) {
      if (dr <= best_sq) stack.push_back({node.right, dr});
      if (dl <= best_sq) stack.push_back({node.left, dl});
    } else {
      if (dl <= best_sq) stack.push_back({node.left, dl});
      if (dr <= best_sq) stack.push_back({node.right, dr});
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace pamopt
