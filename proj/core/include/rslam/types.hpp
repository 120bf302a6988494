#pragma once

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"

namespace rslam {

struct ImuSample {
  double t = 0.0;
  Eigen::Vector3d gyro = Eigen::Vector3d::Zero();   // rad/s, body frame
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();  // m/s^2, specific force
};

struct RangeSample {
  double t = 0.0;
  int landmarkId = 0;
  double range = 0.0;  // m
};

struct TruthSample {
  double t = 0.0;
  ExtendedPose pose;
};

}  // namespace rslam
