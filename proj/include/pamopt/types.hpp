// Copyright (c) the pamopt contributors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <limits>
#include <vector>

namespace pamopt {

using Real = double;

template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3d = Eigen::Vector3d;
using Vec3f = Eigen::Vector3f;
using Vec3i = Eigen::Vector3i;
using VecX = Eigen::VectorXd;

constexpr Real kInf = std::numeric_limits<Real>::infinity();

/// Axis-aligned bounding box with closed-interval overlap semantics.
struct Aabb {
  Vec3d lo = Vec3d::Constant(kInf);
  Vec3d hi = Vec3d::Constant(-kInf);

  void expand(const Vec3d& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  void inflate(Real r) {
    lo.array() -= r;
    hi.array() += r;
  }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() && (hi.array() >= b.lo.array()).all();
  }
  bool contains(const Aabb& b) const {
    return (lo.array() <= b.lo.array()).all() && (hi.array() >= b.hi.array()).all();
  }
  Vec3d center() const { return Real(0.5) * (lo + hi); }
  Vec3d extent() const { return hi - lo; }
  Real diagonal() const { return (hi - lo).norm(); }
  bool empty() const { return (lo.array() > hi.array()).any(); }

  Real sq_distance(const Vec3d& p) const {
    const Vec3d d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

inline Aabb triangle_aabb(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
  Aabb box;
  box.expand(a);
  box.expand(b);
  box.expand(c);
  return box;
}

}  // namespace pamopt
