#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "rslam/lie/so3.hpp"

using namespace rslam;
using testutil::randomRot;
using testutil::randomRotVec;
using testutil::randomVec3;
using testutil::seriesExpm;

TEST(So3, HatVee) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Vector3d w = randomVec3(rng, 2.0);
    const Eigen::Matrix3d W = hat(w);
    EXPECT_NEAR((W + W.transpose()).norm(), 0.0, 1e-15);
    EXPECT_NEAR((vee(W) - w).norm(), 0.0, 1e-15);
    const Eigen::Vector3d v = randomVec3(rng);
    EXPECT_NEAR((W * v - w.cross(v)).norm(), 0.0, 1e-15);
  }
}

TEST(So3, ExpMatchesSeries) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const double scale = rep % 3 == 0 ? 1e-8 : 1.5;
    const Eigen::Vector3d w = randomVec3(rng, scale);
    EXPECT_NEAR((Rot3::exp(w).matrix() - seriesExpm(hat(w))).norm(), 0.0, 1e-12);
  }
}

TEST(So3, ExpLogRoundTrip) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::Vector3d w = randomRotVec(rng);
    EXPECT_NEAR((Rot3::exp(w).log() - w).norm(), 0.0, 1e-9);
    const Rot3 R = randomRot(rng);
    EXPECT_NEAR((Rot3::exp(R.log()).matrix() - R.matrix()).norm(), 0.0, 1e-9);
  }
}

TEST(So3, LogNearPi) {
  const Eigen::Vector3d axis = Eigen::Vector3d(1.0, -2.0, 0.5).normalized();
  for (double angle : {3.0, 3.14, 3.141592}) {
    const Eigen::Vector3d w = angle * axis;
    EXPECT_NEAR((Rot3::exp(w).log() - w).norm(), 0.0, 1e-7);
  }
}

TEST(So3, GroupOps) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const Rot3 A = randomRot(rng);
    const Rot3 B = randomRot(rng);
    const Rot3 C = randomRot(rng);
    EXPECT_NEAR(((A * B) * C).matrix().isApprox((A * (B * C)).matrix(), 1e-13),
                true, 0);
    EXPECT_NEAR(((A * A.inverse()).matrix() - Eigen::Matrix3d::Identity()).norm(),
                0.0, 1e-13);
  }
}

TEST(So3, FromMatrixValidates) {
  const Rot3 R = Rot3::exp(Eigen::Vector3d(0.3, -0.2, 0.9));
  EXPECT_NO_THROW(Rot3::fromMatrix(R.matrix()));
  Eigen::Matrix3d bad = R.matrix();
  bad(0, 0) += 1e-3;
  EXPECT_THROW(Rot3::fromMatrix(bad), std::exception);
}

TEST(So3, FromQuaternion) {
  const Eigen::Vector3d w(0.4, 0.1, -0.7);
  const Rot3 R = Rot3::exp(w);
  const Eigen::Quaterniond q = R.quaternion();
  const Rot3 back = Rot3::fromQuaternion(q.w(), q.x(), q.y(), q.z());
  EXPECT_NEAR((back.matrix() - R.matrix()).norm(), 0.0, 1e-12);
  EXPECT_THROW(Rot3::fromQuaternion(2.0, 0.0, 0.0, 0.0), std::exception);
}

TEST(So3, RotationBetween) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Vector3d a = randomVec3(rng).normalized();
    const Eigen::Vector3d b = randomVec3(rng).normalized();
    const Rot3 R = Rot3::rotationBetween(a, b);
    EXPECT_NEAR((R * a - b).norm(), 0.0, 1e-12);
  }
  const Eigen::Vector3d e1(1.0, 0.0, 0.0);
  EXPECT_THROW(Rot3::rotationBetween(e1, -e1), std::exception);
}

TEST(So3, LeftJacobianMatchesDifference) {
  // exp(w + d) ~ exp(Jl(w) d) exp(w) for small d.
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Vector3d w = randomVec3(rng, 1.0);
    const Eigen::Vector3d d = randomVec3(rng, 1e-6);
    const Eigen::Matrix3d lhs = Rot3::exp(w + d).matrix();
    const Eigen::Matrix3d rhs =
        (Rot3::exp(so3LeftJacobian(w) * d) * Rot3::exp(w)).matrix();
    EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-11);
    EXPECT_NEAR((so3LeftJacobian(w) * so3LeftJacobianInv(w) -
                 Eigen::Matrix3d::Identity())
                    .norm(),
                0.0, 1e-10);
  }
}

TEST(So3, ProjectToSO3) {
  std::mt19937_64 rng(7);
  const Rot3 R = randomRot(rng);
  Eigen::Matrix3d noisy = R.matrix();
  noisy += 1e-4 * Eigen::Matrix3d::Random();
  const Eigen::Matrix3d P = projectToSO3(noisy);
  EXPECT_NEAR((P * P.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0,
              1e-12);
  EXPECT_NEAR(P.determinant(), 1.0, 1e-12);
  EXPECT_NEAR((P - R.matrix()).norm(), 0.0, 1e-3);
}

TEST(So3, StaysOrthonormalOverLongProducts) {
  std::mt19937_64 rng(8);
  Rot3 R;
  const Rot3 step = Rot3::exp(Eigen::Vector3d(1e-3, 2e-3, -1e-3));
  for (int k = 0; k < 20000; ++k) {
    R = R * step;
  }
  const Eigen::Matrix3d M = R.matrix();
  EXPECT_NEAR((M * M.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0,
              1e-11);
}
