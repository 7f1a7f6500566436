// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "pamopt/distance.hpp"

#include <algorithm>
#include <cmath>

namespace pamopt {

template <class S>
S point_segment_sq_distance(const Vec3<S>& p, const Vec3<S>& a, const Vec3<S>& b,
                            Vec3<S>* closest, S* t_out) {
  const Vec3<S> ab = b - a;
  const S denom = ab.squaredNorm();
  S t = denom > S(0) ? (p - a).dot(ab) / denom : S(0);
  t = std::clamp(t, S(0), S(1));
  const Vec3<S> q = a + t * ab;
  if (closest) *closest = q;
  if (t_out) *t_out = t;
  return (p - q).squaredNorm();
}

// Minimum over the face-interior projection (when it exists) and the three
// edges. Robust for degenerate triangles: the plane candidate simply drops
// out and the edge minima remain exact.
template <class S>
S point_triangle_sq_distance(const Vec3<S>& p, const Vec3<S>& a, const Vec3<S>& b,
                             const Vec3<S>& c, Vec3<S>* closest, TriRegion* region) {
  const Vec3<S> n = (b - a).cross(c - a);
  const S nn = n.squaredNorm();

  S best = std::numeric_limits<S>::infinity();
  Vec3<S> best_point = a;
  TriRegion best_region = TriRegion::VertexA;

  if (nn > S(0)) {
    // barycentric test of the orthogonal projection
    const Vec3<S> ap = p - a;
    const S dist_n = ap.dot(n);
    const Vec3<S> proj = p - (dist_n / nn) * n;
    const Vec3<S> v0 = b - a, v1 = c - a, v2 = proj - a;
    const S d00 = v0.squaredNorm(), d01 = v0.dot(v1), d11 = v1.squaredNorm();
    const S d20 = v2.dot(v0), d21 = v2.dot(v1);
    const S denom = d00 * d11 - d01 * d01;
    if (denom > S(0)) {
      const S v = (d11 * d20 - d01 * d21) / denom;
      const S w = (d00 * d21 - d01 * d20) / denom;
      if (v >= S(0) && w >= S(0) && v + w <= S(1)) {
        best = dist_n * dist_n / nn;
        best_point = proj;
        best_region = TriRegion::Face;
      }
    }
  }

  struct EdgeCase {
    const Vec3<S>*u, *v;
    TriRegion interior, at0, at1;
  };
  const EdgeCase edges[3] = {
      {&a, &b, TriRegion::EdgeAB, TriRegion::VertexA, TriRegion::VertexB},
      {&b, &c, TriRegion::EdgeBC, TriRegion::VertexB, TriRegion::VertexC},
      {&c, &a, TriRegion::EdgeCA, TriRegion::VertexC, TriRegion::VertexA},
  };
  for (const EdgeCase& e : edges) {
    Vec3<S> q;
    S t;
    const S d2 = point_segment_sq_distance(p, *e.u, *e.v, &q, &t);
    if (d2 < best) {
      best = d2;
      best_point = q;
      best_region = t <= S(0) ? e.at0 : (t >= S(1) ? e.at1 : e.interior);
    }
  }

  if (closest) *closest = best_point;
  if (region) *region = best_region;
  return best;
}

template float point_triangle_sq_distance<float>(const Vec3f&, const Vec3f&, const Vec3f&,
                                                 const Vec3f&, Vec3f*, TriRegion*);
template double point_triangle_sq_distance<double>(const Vec3d&, const Vec3d&, const Vec3d&,
                                                   const Vec3d&, Vec3d*, TriRegion*);
template float point_segment_sq_distance<float>(const Vec3f&, const Vec3f&, const Vec3f&,
                                                Vec3f*, float*);
template double point_segment_sq_distance<double>(const Vec3d&, const Vec3d&, const Vec3d&,
                                                  Vec3d*, double*);

double point_triangle_distance(const Vec3d& p, const Vec3d& a, const Vec3d& b, const Vec3d& c) {
  return std::sqrt(point_triangle_sq_distance<double>(p, a, b, c));
}

double segment_segment_sq_distance(const Vec3d& p0, const Vec3d& p1, const Vec3d& q0,
                                   const Vec3d& q1, double* s_out, double* t_out,
                                   EdgeRegion* region) {
  // Ericson, Real-Time Collision Detection 5.1.9, with parallel-case clamping.
  const Vec3d d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0, t = 0;
  if (a <= 0 && e <= 0) {
    s = t = 0;
  } else if (a <= 0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  if (s_out) *s_out = s;
  if (t_out) *t_out = t;
  if (region) {
    const bool s0 = s <= 0, s1 = s >= 1, t0 = t <= 0, t1 = t >= 1;
    if (s0 && t0) *region = EdgeRegion::P0Q0;
    else if (s0 && t1) *region = EdgeRegion::P0Q1;
    else if (s1 && t0) *region = EdgeRegion::P1Q0;
    else if (s1 && t1) *region = EdgeRegion::P1Q1;
    else if (s0) *region = EdgeRegion::P0E;
    else if (s1) *region = EdgeRegion::P1E;
    else if (t0) *region = EdgeRegion::EQ0;
    else if (t1) *region = EdgeRegion::EQ1;
    else *region = EdgeRegion::Interior;
  }
  return ((p0 + s * d1) - (q0 + t * d2)).squaredNorm();
}

}  // namespace pamopt
