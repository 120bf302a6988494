#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rslam/lie/so3.hpp"

namespace rslam {

struct RigidTransform {
  Rot3 rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
};

// Least-squares rigid alignment (no scale): minimises
// sum_i |R a_i + t - b_i|^2 over rotations. Cross-covariance SVD with the
// determinant sign correction. Throws for fewer than 3 points or a
// degenerate (collinear) configuration.
RigidTransform umeyamaAlign(const std::vector<Eigen::Vector3d>& a,
                            const std::vector<Eigen::Vector3d>& b);

using TimedPoint = std::pair<double, Eigen::Vector3d>;

enum class RmseWindow { Whole, LastFraction };

// Position RMSE between timestamp-matched samples (nearest neighbour
// within 10 ms). LastFraction keeps t >= t0 + 0.6 (t1 - t0). Throws when
// no pairs match.
double positionRmse(const std::vector<TimedPoint>& estimate,
                    const std::vector<TimedPoint>& truth, RmseWindow window);

struct MappingError {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Per-landmark position error statistics over paired points.
MappingError mappingError(const std::vector<Eigen::Vector3d>& estimate,
                          const std::vector<Eigen::Vector3d>& truth);

}  // namespace rslam
