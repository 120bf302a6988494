#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rslam/dataset_io.hpp"

using namespace rslam;
namespace fs = std::filesystem;

namespace {

fs::path scratchDir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("rslam_io_") + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  // stod rejects subnormals on this platform, so stop at the normal range.
  for (double x : {0.0, 1.0, -1.0, 0.1, 1.0 / 3.0, 3.141592653589793,
                   2.5e-3, -9.81, 1e300, 2.2250738585072014e-308}) {
    EXPECT_EQ(std::stod(formatDouble(x)), x);
  }
  EXPECT_EQ(formatDouble(0.5), "0.5");
  EXPECT_EQ(formatDouble(2.0), "2");
}

TEST(ImuCsv, RoundTripIsByteStable) {
  const fs::path dir = scratchDir();
  std::vector<ImuSample> samples;
  for (int k = 0; k < 50; ++k) {
    ImuSample s;
    s.t = 0.0025 * static_cast<double>(k);
    s.gyro = Eigen::Vector3d(std::sin(k * 0.1), -0.2, 1.0 / (k + 1.0));
    s.accel = Eigen::Vector3d(0.3 * k, -9.81, 1e-7 * k);
    samples.push_back(s);
  }
  const fs::path a = dir / "imu.csv";
  const fs::path b = dir / "imu2.csv";
  writeImuCsv(a.string(), samples);
  const auto loaded = loadImuCsv(a.string());
  ASSERT_EQ(loaded.size(), samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    EXPECT_EQ(loaded[k].t, samples[k].t);
    EXPECT_EQ(loaded[k].gyro, samples[k].gyro);
    EXPECT_EQ(loaded[k].accel, samples[k].accel);
  }
  writeImuCsv(b.string(), loaded);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(ImuCsv, ReportsBadRowWithLineNumber) {
  const fs::path dir = scratchDir();
  const fs::path p = dir / "imu.csv";
  spit(p, "t,wx,wy,wz,ax,ay,az\n0,0,0,0,0,0,-9.81\n0.1,oops,0,0,0,0,-9.81\n");
  try {
    loadImuCsv(p.string());
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("imu.csv"), std::string::npos);
  }
  spit(p, "time,wx,wy,wz,ax,ay,az\n");
  EXPECT_THROW(loadImuCsv(p.string()), std::runtime_error);
  EXPECT_THROW(loadImuCsv((dir / "missing.csv").string()), std::runtime_error);
}

TEST(RangeCsv, RoundTripAndValidation) {
  const fs::path dir = scratchDir();
  std::vector<RangeSample> samples = {{0.1, 0, 12.25},
                                      {0.1, 3, 8.0},
                                      {0.2, 1, 30.5}};
  const fs::path p = dir / "range.csv";
  writeRangeCsv(p.string(), samples);
  const auto loaded = loadRangeCsv(p.string());
  ASSERT_EQ(loaded.size(), 3u);
  EXPECT_EQ(loaded[1].landmarkId, 3);
  EXPECT_EQ(loaded[2].range, 30.5);

  spit(p, "t,landmark_id,range\n0.1,0,-2\n");
  EXPECT_THROW(loadRangeCsv(p.string()), std::runtime_error);
  spit(p, "t,landmark_id,range\n0.2,0,5\n0.1,0,5\n");
  EXPECT_THROW(loadRangeCsv(p.string()), std::runtime_error);
}

TEST(TruthCsv, RoundTripPreservesPose) {
  const fs::path dir = scratchDir();
  std::vector<TruthSample> samples;
  for (int k = 0; k < 20; ++k) {
    TruthSample s;
    s.t = 0.01 * static_cast<double>(k);
    s.pose = ExtendedPose(
        Rot3::exp(Eigen::Vector3d(0.01 * k, -0.02 * k, 0.3)),
        Eigen::Vector3d(1.0, 0.1 * k, 0.0),
        Eigen::Vector3d(0.5 * k, -2.0, -10.0));
    samples.push_back(s);
  }
  const fs::path p = dir / "truth.csv";
  writeTruthCsv(p.string(), samples);
  const auto loaded = loadTruthCsv(p.string());
  ASSERT_EQ(loaded.size(), samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    EXPECT_LT(
        (loaded[k].pose.matrix() - samples[k].pose.matrix()).norm(), 1e-12);
  }
  // Quaternion extraction from the reconstructed matrix can drift by an
  // ulp, so rewriting is only required to stay pose-equivalent, not
  // byte-equal.
  const fs::path q = dir / "truth2.csv";
  writeTruthCsv(q.string(), loaded);
  const auto reloaded = loadTruthCsv(q.string());
  ASSERT_EQ(reloaded.size(), samples.size());
  for (size_t k = 0; k < samples.size(); ++k) {
    EXPECT_LT(
        (reloaded[k].pose.matrix() - samples[k].pose.matrix()).norm(), 1e-12);
  }
}

TEST(LandmarksCsv, RoundTrip) {
  const fs::path dir = scratchDir();
  std::vector<LandmarkRecord> lm = {{0, {22.0, 22.0, -2.0}},
                                    {5, {-25.0, 0.0, -2.0}}};
  const fs::path p = dir / "landmarks.csv";
  writeLandmarksCsv(p.string(), lm);
  const auto loaded = loadLandmarksCsv(p.string());
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[1].id, 5);
  EXPECT_EQ(loaded[1].position, lm[1].position);
}

TEST(RunConfigParse, ReadsEveryKey) {
  const std::string text = R"(# scenario
filter = ekf
seed = 42
landmark_init = truth
profile = ground
reset_transport = false
gate_enabled = true
gate_threshold = 6.6
gravity = 9.80665
gyro_noise_density = 2e-4
accel_noise_density = 3e-3
range_sigma = 0.1
nav_cov0 = 0.1, 0.1, 0.1, 0.2, 0.2, 0.2, 0.3, 0.3, 0.3
eqf_lm_cov0 = 2.0, 2.0, 1.5
ekf_lm_cov0 = 10, 10, 10
trajectory = lissajous
duration = 90
speed = 3.6
radius = 21
altitude = 11
altitude_amplitude = 0.5
imu_rate = 200
range_rate = 5
range_schedule = round_robin
dropout_gap = 4
dropout_period = 30
)";
  const RunConfig cfg = parseRunConfig(text, "test.cfg");
  EXPECT_EQ(cfg.filter, FilterKind::Ekf);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.landmarkInit, LandmarkInitKind::Truth);
  EXPECT_EQ(cfg.profile, EnvironmentProfile::Ground);
  EXPECT_FALSE(cfg.resetTransport);
  EXPECT_TRUE(cfg.gateEnabled);
  EXPECT_EQ(cfg.gateThreshold, 6.6);
  EXPECT_EQ(cfg.gravity, 9.80665);
  EXPECT_EQ(cfg.gyroNoiseDensity, 2e-4);
  EXPECT_EQ(cfg.rangeSigma, 0.1);
  EXPECT_EQ(cfg.navCov0Diag(3), 0.2);
  EXPECT_EQ(cfg.eqfLmCov0Diag(2), 1.5);
  ASSERT_TRUE(cfg.ekfLmCov0DiagOverride.has_value());
  EXPECT_EQ(cfg.ekfLmCov0Diag()(0), 10.0);
  EXPECT_EQ(cfg.trajectory, TrajectoryKind::Lissajous);
  EXPECT_EQ(cfg.duration, 90.0);
  EXPECT_EQ(cfg.speed, 3.6);
  EXPECT_EQ(cfg.rangeSchedule, RangeSchedule::RoundRobin);
  EXPECT_EQ(cfg.dropoutGap, 4.0);
  EXPECT_EQ(cfg.dropoutPeriod, 30.0);
}

TEST(RunConfigParse, DefaultsAndProfiles) {
  const RunConfig cfg = parseRunConfig("", "empty.cfg");
  EXPECT_EQ(cfg.filter, FilterKind::Eqf);
  EXPECT_EQ(cfg.trajectory, TrajectoryKind::Circle);
  EXPECT_EQ(cfg.rangeSchedule, RangeSchedule::AllPerEpoch);
  EXPECT_EQ(cfg.eqfLmCov0Diag, Eigen::Vector3d::Constant(3.0));
  // Without an override the baseline landmark prior follows the profile.
  EXPECT_FALSE(cfg.ekfLmCov0DiagOverride.has_value());
  EXPECT_EQ(cfg.ekfLmCov0Diag(), Eigen::Vector3d::Constant(50.0));
  RunConfig ground = cfg;
  ground.profile = EnvironmentProfile::Ground;
  EXPECT_EQ(ground.ekfLmCov0Diag(), Eigen::Vector3d::Constant(10.0));
}

TEST(RunConfigParse, RejectsMalformedInput) {
  EXPECT_THROW(parseRunConfig("mystery = 1\n", "bad.cfg"), std::runtime_error);
  EXPECT_THROW(parseRunConfig("seed = 1\nseed = 2\n", "bad.cfg"),
               std::runtime_error);
  EXPECT_THROW(parseRunConfig("filter = ukf\n", "bad.cfg"), std::runtime_error);
  EXPECT_THROW(parseRunConfig("range_schedule = sometimes\n", "bad.cfg"),
               std::runtime_error);
  EXPECT_THROW(parseRunConfig("nav_cov0 = 1, 2, 3\n", "bad.cfg"),
               std::runtime_error);
  EXPECT_THROW(parseRunConfig("range_sigma = 0\n", "bad.cfg"),
               std::runtime_error);
  EXPECT_THROW(parseRunConfig("speed = -1\n", "bad.cfg"), std::runtime_error);
  EXPECT_THROW(
      parseRunConfig("dropout_gap = 50\ndropout_period = 40\n", "bad.cfg"),
      std::runtime_error);
  EXPECT_THROW(parseRunConfig("seed 1\n", "bad.cfg"), std::runtime_error);
  // Line numbers point at the offending entry.
  try {
    parseRunConfig("seed = 1\n\n# fine\nwhat = 2\n", "bad.cfg");
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cfg:4"), std::string::npos);
  }
}

TEST(RunConfigParse, LoadsFromFile) {
  const fs::path dir = scratchDir();
  const fs::path p = dir / "run.cfg";
  spit(p, "seed = 7\ntrajectory = circle\nduration = 12\n");
  const RunConfig cfg = loadRunConfig(p.string());
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.duration, 12.0);
  EXPECT_THROW(loadRunConfig((dir / "gone.cfg").string()), std::runtime_error);
}
