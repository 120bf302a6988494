#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "rslam/lie/se23.hpp"

using namespace rslam;
using testutil::randomPose;
using testutil::randomVector;
using testutil::seriesExpm;

TEST(Se23, HatVee) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    const Vector9d u = randomVector(rng, 9, 2.0);
    EXPECT_NEAR((se23Vee(se23Hat(u)) - u).norm(), 0.0, 1e-15);
  }
}

TEST(Se23, ExpMatchesSeries) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const double scale = rep % 4 == 0 ? 1e-8 : 1.2;
    const Vector9d u = randomVector(rng, 9, scale);
    EXPECT_NEAR((ExtendedPose::exp(u).matrix() - seriesExpm(se23Hat(u))).norm(),
                0.0, 1e-12);
  }
}

TEST(Se23, ExpLogRoundTrip) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 1000; ++rep) {
    Vector9d u = randomVector(rng, 9, 1.0);
    u.head<3>() = testutil::randomRotVec(rng);
    EXPECT_NEAR((ExtendedPose::exp(u).log() - u).norm(), 0.0, 1e-9);
    const ExtendedPose P = randomPose(rng);
    const ExtendedPose back = ExtendedPose::exp(P.log());
    EXPECT_NEAR((back.matrix() - P.matrix()).norm(), 0.0, 1e-9);
  }
}

TEST(Se23, GroupAxioms) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 200; ++rep) {
    const ExtendedPose A = randomPose(rng);
    const ExtendedPose B = randomPose(rng);
    const ExtendedPose C = randomPose(rng);
    EXPECT_NEAR((((A * B) * C).matrix() - (A * (B * C)).matrix()).norm(), 0.0,
                1e-12);
    EXPECT_NEAR(((A * A.inverse()).matrix() - Matrix5d::Identity()).norm(), 0.0,
                1e-12);
    EXPECT_NEAR(((A * ExtendedPose()).matrix() - A.matrix()).norm(), 0.0, 0.0);
  }
}

TEST(Se23, ProductMatchesMatrixProduct) {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 200; ++rep) {
    const ExtendedPose A = randomPose(rng);
    const ExtendedPose B = randomPose(rng);
    EXPECT_NEAR(((A * B).matrix() - A.matrix() * B.matrix()).norm(), 0.0,
                1e-12);
  }
}

TEST(Se23, FromMatrixRoundTripAndValidation) {
  std::mt19937_64 rng(16);
  const ExtendedPose P = randomPose(rng);
  const ExtendedPose back = ExtendedPose::fromMatrix(P.matrix());
  EXPECT_NEAR((back.matrix() - P.matrix()).norm(), 0.0, 1e-14);
  Matrix5d bad = P.matrix();
  bad(3, 0) = 0.1;
  EXPECT_THROW(ExtendedPose::fromMatrix(bad), std::exception);
}

TEST(Se23, AdjointMatchesConjugation) {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const ExtendedPose X = randomPose(rng);
    const Vector9d u = randomVector(rng, 9, 1e-3);
    const ExtendedPose conj = X * ExtendedPose::exp(u) * X.inverse();
    EXPECT_NEAR((conj.log() - X.adjoint() * u).norm(), 0.0, 1e-9);
  }
}
