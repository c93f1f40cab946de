#pragma once

#include <limits>

#include <Eigen/Core>

#include "canopy/common/geometry.hpp"

namespace canopy::planner {

/// Convex polytope {x : C x <= d} with unit-norm rows of C.
struct Polytope {
  Eigen::Matrix<double, Eigen::Dynamic, 3> C;
  Eigen::VectorXd d;

  int size() const { return static_cast<int>(d.size()); }
  bool empty() const { return d.size() == 0; }

  void add(const Vec3& normal, double offset) {
    const int k = size();
    C.conservativeResize(k + 1, Eigen::NoChange);
    d.conservativeResize(k + 1);
    C.row(k) = normal.transpose();
    d(k) = offset;
  }

  /// max_i (C_i x - d_i); <= 0 inside.
  double violation(const Vec3& x) const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return (C * x - d).maxCoeff();
  }
  bool contains(const Vec3& x, double tol = 1e-9) const { return violation(x) <= tol; }

  /// Every offset reduced by `margin`.
  Polytope shrunk(double margin) const {
    Polytope p = *this;
    p.d.array() -= margin;
    return p;
  }
};

}  // namespace canopy::planner
