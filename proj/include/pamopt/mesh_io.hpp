// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pamopt/mesh.hpp"

namespace pamopt {

struct LoadStats {
  int degenerate_faces_dropped = 0;
  int polygons_triangulated = 0;
  int vertices_welded = 0;  // STL only
};

/// Loads OBJ (v/f), PLY (ascii or binary little-endian) or STL (ascii or
/// binary), dispatched on extension with content sniffing for STL/PLY.
/// Polygons are fan-triangulated, faces with repeated indices dropped, and
/// STL corners welded by exact coordinate equality.
/// Throws std::runtime_error with line/offset context on parse failure and
/// on empty meshes.
IndexedMesh load_mesh(const std::string& path, LoadStats* stats = nullptr);

/// Writes OBJ (positions + faces) or PLY by extension. Binary PLY stores
/// double-precision coordinates so write->load round-trips bit-exactly.
void save_mesh(const std::string& path, const IndexedMesh& mesh, bool ply_binary = true);

/// Similarity transform mapping a mesh into the unit cube and back.
struct NormalizationTransform {
  Real scale = 1.0;        // applied first
  Vec3d translation = Vec3d::Zero();
  Real padding = 0.0;

  Vec3d apply(const Vec3d& p) const { return p * scale + translation; }
  Vec3d invert(const Vec3d& p) const { return (p - translation) / scale; }
};

/// Uniformly scales and translates the mesh so every vertex lands in
/// [padding, 1-padding]^3, centered on the longest axis. Throws when all
/// vertices coincide. Flat (planar) input is valid.
NormalizationTransform normalize_unit_cube(IndexedMesh& mesh, Real padding);

void denormalize(IndexedMesh& mesh, const NormalizationTransform& transform);

}  // namespace pamopt
