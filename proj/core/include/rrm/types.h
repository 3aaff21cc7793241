#pragma once

#include <Eigen/Dense>

namespace rrm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point of a manifold, in the manifold's coordinate convention (ambient
/// coordinates for embedded manifolds, domain coordinates otherwise).
struct Point {
  Vec coords;
};

/// A tangent vector together with its base point. `vec` uses the same
/// coordinate frame as `base.coords`.
struct Tangent {
  Point base;
  Vec vec;
};

}  // namespace rrm
