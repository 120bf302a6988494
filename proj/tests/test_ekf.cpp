#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "rslam/ekf.hpp"
#include "rslam/eqf.hpp"

using namespace rslam;
using testutil::randomVec3;

namespace {

EkfBelief randomEkfBelief(std::mt19937_64& rng, const EkfConfig& cfg, int n) {
  EkfBelief b = makeEkfBelief(cfg, testutil::randomPose(rng));
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d p = randomVec3(rng, 15.0);
    while ((p - b.pose.position()).norm() < 2.0) {
      p = randomVec3(rng, 15.0);
    }
    b = ekfAddLandmarkAt(b, cfg, i, p);
  }
  return b;
}

}  // namespace

TEST(EkfBasics, AddLandmarkLayout) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = makeEkfBelief(cfg, ExtendedPose());
  b = ekfAddLandmark(b, cfg, 4, 9.0);
  b = ekfAddLandmark(b, cfg, 1, 6.0);
  ASSERT_EQ(b.landmarkCount(), 2);
  EXPECT_EQ(b.ids[0], 1);
  EXPECT_EQ(b.slotOf(4), 1);
  EXPECT_EQ(b.slotOf(2), -1);
  EXPECT_EQ(b.dim(), 15);
  // First-range start lies along the body z axis.
  EXPECT_LT((b.landmarks[1] - 9.0 * Eigen::Vector3d::UnitZ()).norm(), 1e-12);
  EXPECT_LT(b.sigma.block(0, 9, 9, 6).norm(), 1e-15);
  EXPECT_THROW(ekfAddLandmark(b, cfg, 1, 3.0), std::exception);
}

TEST(EkfPropagate, HoverIsExact) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = makeEkfBelief(cfg, ExtendedPose());
  b = ekfAddLandmarkAt(b, cfg, 0, Eigen::Vector3d(10.0, -3.0, -2.0));
  ImuSample hover;
  hover.accel = Eigen::Vector3d(0.0, 0.0, -cfg.gravity);
  for (int k = 0; k < 4000; ++k) {
    b = ekfPropagate(b, cfg, hover, 2.5e-3);
  }
  EXPECT_LT((b.pose.matrix() - ExtendedPose().matrix()).norm(), 1e-9);
  EXPECT_TRUE(isHealthy(b));
}

TEST(EkfPropagate, MeanMatchesMainFilterWithoutLandmarks) {
  const EkfConfig ekfCfg = EkfConfig::defaults();
  const EqfConfig eqfCfg = EqfConfig::defaults();
  std::mt19937_64 rng(71);
  const ExtendedPose nav0 = testutil::randomPose(rng);
  EkfBelief ekf = makeEkfBelief(ekfCfg, nav0);
  EqfBelief eqf = makeEqfBelief(eqfCfg, nav0);
  for (int k = 0; k < 500; ++k) {
    const double t = 2.5e-3 * static_cast<double>(k);
    ImuSample u;
    u.gyro = Eigen::Vector3d(0.4 * std::sin(t), -0.2, 0.1 * std::cos(2.0 * t));
    u.accel = Eigen::Vector3d(0.5, -9.5, 0.3 * std::sin(t));
    ekf = ekfPropagate(ekf, ekfCfg, u, 2.5e-3);
    eqf = propagate(eqf, eqfCfg, u, 2.5e-3);
  }
  EXPECT_LT((ekf.pose.matrix() - stateEstimate(eqf, eqfCfg).pose.matrix()).norm(),
            1e-10);
}

TEST(EkfMatrices, MeasurementJacobianMatchesFd) {
  const EkfConfig cfg = EkfConfig::defaults();
  std::mt19937_64 rng(72);
  for (int rep = 0; rep < 20; ++rep) {
    const EkfBelief b = randomEkfBelief(rng, cfg, 2);
    std::vector<RangeSample> epoch = {{0.0, 0, 1.0}, {0.0, 1, 1.0}};
    const Eigen::MatrixXd H = ekfMeasurementJacobian(b, epoch);
    ASSERT_EQ(H.rows(), 2);
    ASSERT_EQ(H.cols(), b.dim());

    // Multiplicative pose perturbation, additive landmark perturbation.
    const double h = 1e-6;
    const auto measure = [&](const Eigen::VectorXd& eps) {
      EkfBelief pb = b;
      Vector9d navEps = eps.head<9>();
      pb.pose = ExtendedPose::exp(navEps) * b.pose;
      for (int i = 0; i < 2; ++i) {
        pb.landmarks[static_cast<size_t>(i)] += eps.segment<3>(9 + 3 * i);
      }
      Eigen::VectorXd y(2);
      for (int i = 0; i < 2; ++i) {
        y(i) = (pb.landmarks[static_cast<size_t>(i)] - pb.pose.position()).norm();
      }
      return y;
    };
    for (int j = 0; j < b.dim(); ++j) {
      Eigen::VectorXd eps = Eigen::VectorXd::Zero(b.dim());
      eps(j) = h;
      const Eigen::VectorXd plus = measure(eps);
      eps(j) = -h;
      const Eigen::VectorXd minus = measure(eps);
      EXPECT_LT((H.col(j) - (plus - minus) / (2.0 * h)).norm(), 1e-6);
    }
  }
}

TEST(EkfUpdate, StaticRangingConverges) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = makeEkfBelief(cfg, ExtendedPose());
  const Eigen::Vector3d p(8.0, 5.0, -3.0);
  b = ekfAddLandmarkAt(b, cfg, 0, p + Eigen::Vector3d(2.0, -1.0, 1.0));
  for (int k = 0; k < 200; ++k) {
    b = ekfUpdate(b, cfg, {{0.0, 0, p.norm()}});
    EXPECT_LT((b.sigma - b.sigma.transpose()).norm(), 1e-12);
  }
  // A static vehicle pins the range sphere, not the full position.
  EXPECT_NEAR((b.landmarks[0] - b.pose.position()).norm(), p.norm(), 1e-3);
  EXPECT_TRUE(isHealthy(b));
}

TEST(EkfUpdate, UnknownIdThrows) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = makeEkfBelief(cfg, ExtendedPose());
  EXPECT_THROW(ekfUpdate(b, cfg, {{0.0, 3, 4.0}}), std::exception);
}

TEST(EkfHealth, FlagsNonFinite) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = makeEkfBelief(cfg, ExtendedPose());
  EXPECT_TRUE(isHealthy(b));
  b.sigma(2, 2) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(isHealthy(b));
}
