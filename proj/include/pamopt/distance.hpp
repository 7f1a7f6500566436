// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "pamopt/types.hpp"

namespace pamopt {

/// Closest-feature region of a point against a triangle (a,b,c).
enum class TriRegion : std::uint8_t {
  VertexA, VertexB, VertexC,
  EdgeAB, EdgeBC, EdgeCA,
  Face,
};

/// Closest-feature region of a segment pair ((p0,p1),(q0,q1)).
enum class EdgeRegion : std::uint8_t {
  P0Q0, P0Q1, P1Q0, P1Q1,   // endpoint-endpoint
  P0E, P1E, EQ0, EQ1,       // endpoint against interior
  Interior,                  // interior-interior
};

/// Exact closed-form point-triangle squared distance. Degenerate triangles
/// fall back to the segment/point case. Templated so the narrow-phase can
/// run in float while field construction runs in double.
template <class S>
S point_triangle_sq_distance(const Vec3<S>& p, const Vec3<S>& a, const Vec3<S>& b,
                             const Vec3<S>& c, Vec3<S>* closest = nullptr,
                             TriRegion* region = nullptr);

double point_triangle_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c);

template <class S>
S point_segment_sq_distance(const Vec3<S>& p, const Vec3<S>& a, const Vec3<S>& b,
                            Vec3<S>* closest = nullptr, S* t = nullptr);

/// Squared distance between segments with the closest parameters clamped to
/// [0,1]; reports which feature pair realizes the minimum.
double segment_segment_sq_distance(const Vec3d& p0, const Vec3d& p1, const Vec3d& q0,
                                   const Vec3d& q1, double* s = nullptr, double* t = nullptr,
                                   EdgeRegion* region = nullptr);

}  // namespace pamopt
