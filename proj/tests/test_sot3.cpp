#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "rslam/lie/sot3.hpp"

using namespace rslam;
using testutil::randomScaledRot;
using testutil::randomVec3;
using testutil::randomVector;
using testutil::seriesExpm;

TEST(Sot3, HatVee) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Vector4d u = randomVector(rng, 4, 2.0);
    EXPECT_NEAR((sot3Vee(sot3Hat(u)) - u).norm(), 0.0, 1e-15);
  }
}

TEST(Sot3, ExpMatchesSeries) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 200; ++rep) {
    const double scale = rep % 4 == 0 ? 1e-8 : 1.0;
    const Eigen::Vector4d u = randomVector(rng, 4, scale);
    EXPECT_NEAR((ScaledRot::exp(u).matrix4() - seriesExpm(sot3Hat(u))).norm(),
                0.0, 1e-12);
  }
}

TEST(Sot3, ExpLogRoundTrip) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::Vector4d u = randomVector(rng, 4, 1.0);
    u.head<3>() = testutil::randomRotVec(rng);
    EXPECT_NEAR((ScaledRot::exp(u).log() - u).norm(), 0.0, 1e-9);
    const ScaledRot Q = randomScaledRot(rng);
    const ScaledRot back = ScaledRot::exp(Q.log());
    EXPECT_NEAR((back.matrix4() - Q.matrix4()).norm(), 0.0, 1e-9);
  }
}

TEST(Sot3, GroupAxioms) {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 200; ++rep) {
    const ScaledRot A = randomScaledRot(rng);
    const ScaledRot B = randomScaledRot(rng);
    const ScaledRot C = randomScaledRot(rng);
    EXPECT_NEAR((((A * B) * C).matrix4() - (A * (B * C)).matrix4()).norm(), 0.0,
                1e-12);
    EXPECT_NEAR(((A * A.inverse()).matrix4() - Eigen::Matrix4d::Identity()).norm(),
                0.0, 1e-12);
  }
}

TEST(Sot3, VectorActionMatchesMatrix) {
  std::mt19937_64 rng(25);
  for (int rep = 0; rep < 200; ++rep) {
    const ScaledRot Q = randomScaledRot(rng);
    const Eigen::Vector3d p = randomVec3(rng, 5.0);
    EXPECT_NEAR((Q * p - Q.matrix() * p).norm(), 0.0, 1e-12);
    EXPECT_NEAR(Q.matrix().determinant(),
                std::pow(Q.scale(), 3.0), 1e-9);
  }
}

TEST(Sot3, ConstructorRejectsNonPositiveScale) {
  EXPECT_THROW(ScaledRot(Rot3(), 0.0), std::exception);
  EXPECT_THROW(ScaledRot(Rot3(), -1.0), std::exception);
}

TEST(Sot3, AdjointMatchesConjugation) {
  std::mt19937_64 rng(26);
  for (int rep = 0; rep < 200; ++rep) {
    const ScaledRot X = randomScaledRot(rng);
    const Eigen::Vector4d u = randomVector(rng, 4, 1e-3);
    const ScaledRot conj = X * ScaledRot::exp(u) * X.inverse();
    EXPECT_NEAR((conj.log() - X.adjoint() * u).norm(), 0.0, 1e-9);
  }
}
