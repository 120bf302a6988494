#include "rslam/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace rslam {

namespace {

constexpr double kTimeTol = 1e-9;

bool poseFinite(const ExtendedPose& p) {
  return p.rotation().matrix().allFinite() && p.velocity().allFinite() &&
         p.position().allFinite();
}

ImuSample lerpImu(const ImuSample& a, const ImuSample& b, double t) {
  const double s = (t - a.t) / (b.t - a.t);
  ImuSample out;
  out.t = t;
  out.gyro = (1.0 - s) * a.gyro + s * b.gyro;
  out.accel = (1.0 - s) * a.accel + s * b.accel;
  return out;
}

struct Epoch {
  double t = 0.0;
  std::vector<RangeSample> samples;
};

std::vector<Epoch> groupEpochs(const std::vector<RangeSample>& ranges) {
  std::vector<Epoch> epochs;
  for (const auto& r : ranges) {
    if (epochs.empty() || r.t > epochs.back().t + kTimeTol) {
      epochs.push_back({r.t, {}});
    }
    epochs.back().samples.push_back(r);
  }
  return epochs;
}

struct EqfDriver {
  EqfConfig cfg;
  EqfBelief b;

  EqfDriver(const RunConfig& rc, const ExtendedPose& nav0)
      : cfg(makeEqfConfig(rc)), b(makeEqfBelief(cfg, nav0)) {}

  bool has(int id) const { return b.slotOf(id) >= 0; }
  void add(int id, double range) { b = addLandmark(b, cfg, id, range); }
  void addAt(int id, const Eigen::Vector3d& world) {
    const ExtendedPose p = pose();
    b = addLandmarkAt(b, cfg, id, p.rotation().inverse() * (world - p.position()));
  }
  void update(const std::vector<RangeSample>& epoch) { b = rslam::update(b, cfg, epoch); }
  void propagate(const ImuSample& u, double dt) { b = rslam::propagate(b, cfg, u, dt); }
  ExtendedPose pose() const { return stateEstimate(b, cfg).pose; }
  bool healthy() const { return isHealthy(b); }

  std::vector<LandmarkRecord> landmarkRecords() const {
    const auto points = worldLandmarks(b, cfg);
    std::vector<LandmarkRecord> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = {b.ids[i], points[i]};
    return out;
  }
};

struct EkfDriver {
  EkfConfig cfg;
  EkfBelief b;

  EkfDriver(const RunConfig& rc, const ExtendedPose& nav0)
      : cfg(makeEkfConfig(rc)), b(makeEkfBelief(cfg, nav0)) {}

  bool has(int id) const { return b.slotOf(id) >= 0; }
  void add(int id, double range) { b = ekfAddLandmark(b, cfg, id, range); }
  void addAt(int id, const Eigen::Vector3d& world) { b = ekfAddLandmarkAt(b, cfg, id, world); }
  void update(const std::vector<RangeSample>& epoch) { b = ekfUpdate(b, cfg, epoch); }
  void propagate(const ImuSample& u, double dt) { b = ekfPropagate(b, cfg, u, dt); }
  ExtendedPose pose() const { return b.pose; }
  bool healthy() const { return isHealthy(b); }

  std::vector<LandmarkRecord> landmarkRecords() const {
    std::vector<LandmarkRecord> out(b.landmarks.size());
    for (std::size_t i = 0; i < b.landmarks.size(); ++i) out[i] = {b.ids[i], b.landmarks[i]};
    return out;
  }
};

template <class Driver>
void runLoop(const Dataset& data, const RunConfig& cfg, Driver& drv, RunResult& out) {
  std::map<int, Eigen::Vector3d> truthMap;
  for (const auto& r : data.landmarks) truthMap[r.id] = r.position;

  const auto epochs = groupEpochs(data.ranges);
  std::size_t next = 0;

  const auto processEpoch = [&](const Epoch& epoch) {
    std::vector<RangeSample> known;
    known.reserve(epoch.samples.size());
    for (const auto& s : epoch.samples) {
      if (drv.has(s.landmarkId)) {
        known.push_back(s);
        continue;
      }
      if (cfg.landmarkInit == LandmarkInitKind::Truth) {
        const auto it = truthMap.find(s.landmarkId);
        if (it == truthMap.end()) {
          throw std::runtime_error("landmark " + std::to_string(s.landmarkId) +
                                   " missing from the truth map");
        }
        drv.addAt(s.landmarkId, it->second);
      } else {
        drv.add(s.landmarkId, s.range);
      }
    }
    if (!known.empty()) drv.update(known);
    out.trace.push_back({epoch.t, drv.landmarkRecords()});
  };

  const auto record = [&](double t) { out.poses.push_back({t, drv.pose()}); };

  const auto healthyAt = [&](double t) {
    if (drv.healthy() && poseFinite(drv.pose())) return true;
    out.converged = false;
    out.failureReason = "non-finite state or covariance overflow";
    out.failureTime = t;
    return false;
  };

  const double t0 = data.imu.front().t;
  try {
    while (next < epochs.size() && epochs[next].t <= t0 + kTimeTol) {
      processEpoch(epochs[next]);
      ++next;
    }
  } catch (const std::exception& e) {
    out.converged = false;
    out.failureReason = e.what();
    out.failureTime = t0;
    return;
  }
  record(t0);
  if (!healthyAt(t0)) return;

  for (std::size_t k = 0; k + 1 < data.imu.size(); ++k) {
    const ImuSample& ua = data.imu[k];
    const ImuSample& ub = data.imu[k + 1];
    double tcur = ua.t;
    try {
      while (next < epochs.size() && epochs[next].t <= ub.t + kTimeTol) {
        const double tau = std::clamp(epochs[next].t, tcur, ub.t);
        if (tau > tcur + kTimeTol) {
          drv.propagate(lerpImu(ua, ub, 0.5 * (tcur + tau)), tau - tcur);
        }
        processEpoch(epochs[next]);
        ++next;
        tcur = tau;
      }
      if (ub.t > tcur + kTimeTol) {
        drv.propagate(lerpImu(ua, ub, 0.5 * (tcur + ub.t)), ub.t - tcur);
      }
    } catch (const std::exception& e) {
      out.converged = false;
      out.failureReason = e.what();
      out.failureTime = ub.t;
      return;
    }
    record(ub.t);
    if (!healthyAt(ub.t)) return;
  }
}

double medianOf(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double upper = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
  }
  return upper;
}

}  // namespace

Dataset makeDataset(const SimOutput& sim, const SensorSpec& sensors) {
  Dataset data;
  data.imu = sim.imu;
  data.ranges = applyDropout(sim.ranges, sensors);
  data.truth = sim.truth;
  data.landmarks.reserve(sim.landmarks.size());
  for (std::size_t i = 0; i < sim.landmarks.size(); ++i) {
    data.landmarks.push_back({static_cast<int>(i), sim.landmarks[i]});
  }
  return data;
}

Dataset simulateDataset(const RunConfig& cfg) {
  return makeDataset(generate(makeTrajectorySpec(cfg), makeSensorSpec(cfg)),
                     makeSensorSpec(cfg));
}

Dataset loadDataset(const std::string& dir) {
  Dataset data;
  data.imu = loadImuCsv(dir + "/imu.csv");
  data.ranges = loadRangeCsv(dir + "/range.csv");
  if (std::filesystem::exists(dir + "/truth.csv")) {
    data.truth = loadTruthCsv(dir + "/truth.csv");
  }
  if (std::filesystem::exists(dir + "/landmarks.csv")) {
    data.landmarks = loadLandmarksCsv(dir + "/landmarks.csv");
  }
  return data;
}

void writeDataset(const std::string& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  writeImuCsv(dir + "/imu.csv", data.imu);
  writeRangeCsv(dir + "/range.csv", data.ranges);
  writeTruthCsv(dir + "/truth.csv", data.truth);
  writeLandmarksCsv(dir + "/landmarks.csv", data.landmarks);
}

TrajectorySpec makeTrajectorySpec(const RunConfig& cfg) {
  TrajectorySpec traj;
  traj.kind = cfg.trajectory;
  traj.duration = cfg.duration;
  traj.speed = cfg.speed;
  traj.radius = cfg.radius;
  traj.altitude = cfg.altitude;
  traj.altitudeAmplitude = cfg.altitudeAmplitude;
  traj.seed = cfg.seed;
  return traj;
}

SensorSpec makeSensorSpec(const RunConfig& cfg) {
  SensorSpec sensors;
  sensors.imuRate = cfg.imuRate;
  sensors.rangeRate = cfg.rangeRate;
  sensors.rangeSchedule = cfg.rangeSchedule;
  sensors.gyroNoiseDensity = cfg.gyroNoiseDensity;
  sensors.accelNoiseDensity = cfg.accelNoiseDensity;
  sensors.rangeSigma = cfg.rangeSigma;
  sensors.dropoutGap = cfg.dropoutGap;
  sensors.dropoutPeriod = cfg.dropoutPeriod;
  sensors.gravity = cfg.gravity;
  sensors.landmarks = defaultLandmarkField();
  sensors.seed = cfg.seed;
  return sensors;
}

RunConfig nominalAerialConfig() {
  RunConfig cfg;
  cfg.trajectory = TrajectoryKind::Lissajous;
  cfg.duration = 120.0;
  cfg.speed = 3.6;
  cfg.radius = 20.0;
  cfg.altitude = 10.0;
  cfg.altitudeAmplitude = 1.0;
  cfg.rangeSchedule = RangeSchedule::RoundRobin;
  cfg.dropoutPeriod = 0.0;
  return cfg;
}

EqfConfig makeEqfConfig(const RunConfig& cfg) {
  EqfConfig out = EqfConfig::defaults();
  out.inputGain.setZero();
  out.inputGain.topLeftCorner<3, 3>() = cfg.gyroNoiseDensity * Eigen::Matrix3d::Identity();
  out.inputGain.bottomRightCorner<3, 3>() = cfg.accelNoiseDensity * Eigen::Matrix3d::Identity();
  out.rangeVariance = cfg.rangeSigma * cfg.rangeSigma;
  out.navCov0 = cfg.navCov0Diag.asDiagonal();
  out.lmCov0 = cfg.eqfLmCov0Diag.asDiagonal();
  out.gravity = cfg.gravity;
  out.resetMode = cfg.resetTransport ? ResetMode::NumericalTransport : ResetMode::None;
  out.gateEnabled = cfg.gateEnabled;
  out.gateThreshold = cfg.gateThreshold;
  return out;
}

EkfConfig makeEkfConfig(const RunConfig& cfg) {
  EkfConfig out = EkfConfig::defaults();
  out.inputGain.setZero();
  out.inputGain.topLeftCorner<3, 3>() = cfg.gyroNoiseDensity * Eigen::Matrix3d::Identity();
  out.inputGain.bottomRightCorner<3, 3>() = cfg.accelNoiseDensity * Eigen::Matrix3d::Identity();
  out.rangeVariance = cfg.rangeSigma * cfg.rangeSigma;
  out.navCov0 = cfg.navCov0Diag.asDiagonal();
  out.lmCov0 = cfg.ekfLmCov0Diag().asDiagonal();
  out.gravity = cfg.gravity;
  return out;
}

RunResult runFilter(const Dataset& data, const RunConfig& cfg) {
  if (data.imu.empty()) throw std::invalid_argument("dataset has no IMU samples");
  const ExtendedPose nav0 = data.truth.empty() ? ExtendedPose() : data.truth.front().pose;

  RunResult out;
  if (cfg.filter == FilterKind::Eqf) {
    EqfDriver drv(cfg, nav0);
    runLoop(data, cfg, drv, out);
    if (out.converged) out.landmarks = drv.landmarkRecords();
  } else {
    EkfDriver drv(cfg, nav0);
    runLoop(data, cfg, drv, out);
    if (out.converged) out.landmarks = drv.landmarkRecords();
  }
  return out;
}

RunMetrics evaluateRun(const Dataset& data, const RunResult& result) {
  RunMetrics m;
  const double inf = std::numeric_limits<double>::infinity();
  m.rmseWhole = inf;
  m.rmseLast = inf;
  m.mapping = {inf, inf};
  if (!result.converged || data.truth.empty() || result.poses.empty()) return m;

  std::map<int, Eigen::Vector3d> truthMap;
  for (const auto& r : data.landmarks) truthMap[r.id] = r.position;

  // estimates and truth share the IMU clock, so index matching by time is
  // a two-pointer walk
  std::vector<Eigen::Vector3d> estPts, truPts;
  std::vector<TimedPoint> estPath, truPath;
  std::size_t j = 0;
  for (const auto& e : result.poses) {
    while (j + 1 < data.truth.size() &&
           std::abs(data.truth[j + 1].t - e.t) <= std::abs(data.truth[j].t - e.t)) {
      ++j;
    }
    if (std::abs(data.truth[j].t - e.t) > 0.01) continue;
    estPts.push_back(e.pose.position());
    truPts.push_back(data.truth[j].pose.position());
    estPath.push_back({e.t, e.pose.position()});
    truPath.push_back({data.truth[j].t, data.truth[j].pose.position()});
  }
  if (estPts.size() < 3) return m;

  std::vector<Eigen::Vector3d> estLm, truLm;
  for (const auto& r : result.landmarks) {
    const auto it = truthMap.find(r.id);
    if (it == truthMap.end()) continue;
    estLm.push_back(r.position);
    truLm.push_back(it->second);
  }

  std::vector<Eigen::Vector3d> a = estPts, b = truPts;
  a.insert(a.end(), estLm.begin(), estLm.end());
  b.insert(b.end(), truLm.begin(), truLm.end());
  RigidTransform align;
  try {
    align = umeyamaAlign(a, b);
  } catch (const std::exception&) {
    return m;
  }

  for (auto& p : estPath) p.second = align.apply(p.second);
  m.rmseWhole = positionRmse(estPath, truPath, RmseWindow::Whole);
  m.rmseLast = positionRmse(estPath, truPath, RmseWindow::LastFraction);
  if (!estLm.empty()) {
    std::vector<Eigen::Vector3d> alignedLm;
    alignedLm.reserve(estLm.size());
    for (const auto& p : estLm) alignedLm.push_back(align.apply(p));
    m.mapping = mappingError(alignedLm, truLm);
  }

  // raw (unaligned) errors; the run starts in the truth frame
  for (const auto& snap : result.trace) {
    std::vector<double> errors;
    for (const auto& r : snap.landmarks) {
      const auto it = truthMap.find(r.id);
      if (it != truthMap.end()) errors.push_back((r.position - it->second).norm());
    }
    if (!errors.empty()) m.medianMapError.push_back({snap.t, medianOf(std::move(errors))});
  }

  m.valid = true;
  return m;
}

void writeRunReport(const std::string& dir, const RunConfig& cfg,
                    const RunResult& result, const RunMetrics& metrics) {
  std::filesystem::create_directories(dir);
  writeTruthCsv(dir + "/estimate.csv", result.poses);
  writeLandmarksCsv(dir + "/landmarks_est.csv", result.landmarks);

  {
    std::ofstream out(dir + "/convergence.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + dir + "/convergence.csv for writing");
    out << "t,median_mapping_error_m\n";
    for (const auto& [t, err] : metrics.medianMapError) {
      out << formatDouble(t) << ',' << formatDouble(err) << '\n';
    }
    if (!out) throw std::runtime_error("failed to write " + dir + "/convergence.csv");
  }

  std::ofstream out(dir + "/metrics.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + dir + "/metrics.csv for writing");
  out << "key,value\n";
  out << "filter," << (cfg.filter == FilterKind::Eqf ? "eqf" : "ekf") << '\n';
  out << "seed," << cfg.seed << '\n';
  out << "converged," << (result.converged ? 1 : 0) << '\n';
  out << "failure_reason," << result.failureReason << '\n';
  out << "failure_time_s," << formatDouble(result.failureTime) << '\n';
  out << "landmark_count," << result.landmarks.size() << '\n';
  out << "rmse_whole_m," << formatDouble(metrics.rmseWhole) << '\n';
  out << "rmse_last40_m," << formatDouble(metrics.rmseLast) << '\n';
  out << "mapping_mean_m," << formatDouble(metrics.mapping.mean) << '\n';
  out << "mapping_std_m," << formatDouble(metrics.mapping.stddev) << '\n';
  if (!out) throw std::runtime_error("failed to write " + dir + "/metrics.csv");
}

std::vector<std::pair<std::string, std::string>> loadKeyValueCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string row;
  if (!std::getline(in, row)) throw std::runtime_error(path + ":1: missing header");
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (row != "key,value") throw std::runtime_error(path + ":1: expected header 'key,value'");
  std::vector<std::pair<std::string, std::string>> out;
  int line = 1;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    const auto comma = row.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line) + ": expected 2 fields");
    }
    out.push_back({row.substr(0, comma), row.substr(comma + 1)});
  }
  return out;
}

}  // namespace rslam
