#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rslam/dataset_io.hpp"
#include "rslam/ekf.hpp"
#include "rslam/eqf.hpp"
#include "rslam/evaluation.hpp"
#include "rslam/sim.hpp"

namespace rslam {

struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<RangeSample> ranges;
  std::vector<TruthSample> truth;         // optional, needed for evaluation
  std::vector<LandmarkRecord> landmarks;  // optional truth map
};

// Dropout is applied here; landmark ids are the field indices.
Dataset makeDataset(const SimOutput& sim, const SensorSpec& sensors);
Dataset simulateDataset(const RunConfig& cfg);

// Directory layout: imu.csv, range.csv, truth.csv, landmarks.csv. The two
// truth files may be absent on load.
Dataset loadDataset(const std::string& dir);
void writeDataset(const std::string& dir, const Dataset& data);

TrajectorySpec makeTrajectorySpec(const RunConfig& cfg);
SensorSpec makeSensorSpec(const RunConfig& cfg);
EqfConfig makeEqfConfig(const RunConfig& cfg);
EkfConfig makeEkfConfig(const RunConfig& cfg);

// Reference aerial scenario: ramped figure-eight over the default field,
// one landmark ranged per epoch. The benchmark defaults used throughout
// the docs and the acceptance suite.
RunConfig nominalAerialConfig();

struct LandmarkSnapshot {
  double t = 0.0;
  std::vector<LandmarkRecord> landmarks;  // world-frame estimates
};

struct RunResult {
  std::vector<TruthSample> poses;         // estimates at IMU timestamps
  std::vector<LandmarkRecord> landmarks;  // final world-frame estimates
  std::vector<LandmarkSnapshot> trace;    // after each range epoch
  bool converged = true;
  std::string failureReason;
  double failureTime = 0.0;
};

// Replays the dataset through the configured filter. IMU pairs drive
// trapezoidal propagation steps, split at range epochs; landmarks are
// initialised from their first range (or the truth map) and that sample is
// consumed by the initialisation.
RunResult runFilter(const Dataset& data, const RunConfig& cfg);

struct RunMetrics {
  bool valid = false;
  double rmseWhole = 0.0;
  double rmseLast = 0.0;  // last 40 % of the run
  MappingError mapping;
  // Median over landmarks of the world-frame error, one entry per epoch.
  std::vector<std::pair<double, double>> medianMapError;
};

// Aligns the estimate onto the truth frame (rigid, fitted jointly on the
// path and the final landmark estimates) before computing the errors.
// Invalid (infinite) metrics when the run diverged or truth is missing.
RunMetrics evaluateRun(const Dataset& data, const RunResult& result);

// estimate.csv, landmarks_est.csv, convergence.csv, metrics.csv. Output is
// byte-deterministic for a given dataset and config.
void writeRunReport(const std::string& dir, const RunConfig& cfg,
                    const RunResult& result, const RunMetrics& metrics);

// metrics.csv contents, file order.
std::vector<std::pair<std::string, std::string>> loadKeyValueCsv(const std::string& path);

}  // namespace rslam
