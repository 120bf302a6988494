#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"
#include "rslam/sim.hpp"
#include "rslam/types.hpp"

namespace rslam {

// Shortest decimal form that parses back to the same double.
std::string formatDouble(double value);

struct LandmarkRecord {
  int id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

// CSV schemas. Every file starts with the exact header shown next to its
// loader. Loaders throw std::runtime_error with the file path and line
// number on any malformed row.

// header: t,wx,wy,wz,ax,ay,az
std::vector<ImuSample> loadImuCsv(const std::string& path);
void writeImuCsv(const std::string& path, const std::vector<ImuSample>& samples);

// header: t,landmark_id,range
std::vector<RangeSample> loadRangeCsv(const std::string& path);
void writeRangeCsv(const std::string& path, const std::vector<RangeSample>& samples);

// header: t,px,py,pz,qw,qx,qy,qz,vx,vy,vz
std::vector<TruthSample> loadTruthCsv(const std::string& path);
void writeTruthCsv(const std::string& path, const std::vector<TruthSample>& samples);

// header: landmark_id,px,py,pz
std::vector<LandmarkRecord> loadLandmarksCsv(const std::string& path);
void writeLandmarksCsv(const std::string& path, const std::vector<LandmarkRecord>& landmarks);

enum class FilterKind { Eqf, Ekf };
enum class LandmarkInitKind { FirstRange, Truth };
enum class EnvironmentProfile { Aerial, Ground };

// Plain key = value text, '#' starts a comment, unknown or repeated keys are
// errors. Vector-valued keys take comma-separated lists of fixed length.
struct RunConfig {
  FilterKind filter = FilterKind::Eqf;
  std::uint64_t seed = 0;
  LandmarkInitKind landmarkInit = LandmarkInitKind::FirstRange;
  EnvironmentProfile profile = EnvironmentProfile::Aerial;
  bool resetTransport = true;
  bool gateEnabled = false;
  double gateThreshold = 10.83;
  double gravity = 9.81;

  double gyroNoiseDensity = 1e-4;   // rad^2/s
  double accelNoiseDensity = 1e-3;  // m^2/s^3
  double rangeSigma = 0.25;         // m

  Vector9d navCov0Diag = defaultNavCov0Diag();
  Eigen::Vector3d eqfLmCov0Diag = Eigen::Vector3d::Constant(3.0);
  std::optional<Eigen::Vector3d> ekfLmCov0DiagOverride;

  TrajectoryKind trajectory = TrajectoryKind::Circle;
  double duration = 60.0;            // s
  double speed = 5.0;                // m/s
  double radius = 20.0;              // m
  double altitude = 10.0;            // m above ground
  double altitudeAmplitude = 1.0;    // m
  double imuRate = 400.0;            // Hz
  double rangeRate = 10.0;           // Hz
  RangeSchedule rangeSchedule = RangeSchedule::AllPerEpoch;
  double dropoutGap = 10.0;          // s without ranges per dropout
  double dropoutPeriod = 40.0;       // s between dropout onsets, 0 disables

  static Vector9d defaultNavCov0Diag();
  Eigen::Vector3d ekfLmCov0Diag() const;
};

RunConfig parseRunConfig(const std::string& text, const std::string& name);
RunConfig loadRunConfig(const std::string& path);

}  // namespace rslam
