#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"
#include "rslam/types.hpp"

namespace rslam {

enum class TrajectoryKind {
  Circle,          // constant-rate loop, yaw follows the tangent
  Lissajous,       // figure-eight with gentle attitude wobble
  WaypointSpline,  // C2 cubic spline through seeded random waypoints
};

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Circle;
  double duration = 60.0;  // s
  double speed = 5.0;      // m/s (ignored for WaypointSpline)
  double radius = 20.0;    // m, loop radius / envelope amplitude
  double altitude = 10.0;  // m above the landmark plane, z = -altitude
  double altitudeAmplitude = 1.0;  // m of vertical bobbing
  std::uint64_t seed = 0;          // waypoint randomness only
};

enum class RangeSchedule {
  AllPerEpoch,  // every landmark answers on each epoch
  RoundRobin,   // one landmark per epoch, cycling by id
};

struct SensorSpec {
  double imuRate = 400.0;    // Hz
  double rangeRate = 10.0;   // Hz, epoch rate
  RangeSchedule rangeSchedule = RangeSchedule::AllPerEpoch;
  double gyroNoiseDensity = 1e-4;   // rad^2/s
  double accelNoiseDensity = 1e-3;  // m^2/s^3
  double rangeSigma = 0.25;         // m
  double dropoutGap = 10.0;         // s of consecutive loss per landmark
  double dropoutPeriod = 40.0;      // s between gap starts (0 disables)
  double gravity = 9.81;            // m/s^2, field is +g e3 (z down)
  std::vector<Eigen::Vector3d> landmarks;
  std::uint64_t seed = 0;  // measurement noise and dropout phases
};

struct SimOutput {
  std::vector<TruthSample> truth;           // at IMU timestamps
  std::vector<Eigen::Vector3d> landmarks;   // world frame
  std::vector<ImuSample> imu;
  std::vector<RangeSample> ranges;          // before dropout
};

// Eight poles around a ~50 m field, tops at 2 m (z = -2).
std::vector<Eigen::Vector3d> defaultLandmarkField();

// Synthesises IMU and range streams from an analytic trajectory. The
// noiseless IMU integrates back to the truth exactly up to the sample
// rate; all randomness is drawn from the spec seeds.
SimOutput generate(const TrajectorySpec& traj, const SensorSpec& sensors);

// Removes ranges inside the per-landmark periodic gap windows. Gap phases
// are seeded; a non-positive period leaves the stream untouched.
std::vector<RangeSample> applyDropout(const std::vector<RangeSample>& ranges,
                                      const SensorSpec& sensors);

}  // namespace rslam
