#pragma once

#include <random>

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"
#include "rslam/lie/sot3.hpp"
#include "rslam/symmetry.hpp"

namespace rslam::testutil {

inline Eigen::VectorXd randomVector(std::mt19937_64& rng, int n,
                                    double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = d(rng);
  }
  return v;
}

inline Eigen::Vector3d randomVec3(std::mt19937_64& rng, double scale = 1.0) {
  return randomVector(rng, 3, scale);
}

// Rotation tangent kept inside the injectivity ball, where exp is
// invertible and log returns the same vector.
inline Eigen::Vector3d randomRotVec(std::mt19937_64& rng, double cap = 3.0) {
  Eigen::Vector3d w = randomVec3(rng, 1.0);
  const double n = w.norm();
  if (n > cap) {
    w *= cap / n;
  }
  return w;
}

inline Rot3 randomRot(std::mt19937_64& rng) {
  return Rot3::exp(randomVec3(rng, 0.8));
}

inline ExtendedPose randomPose(std::mt19937_64& rng) {
  return ExtendedPose(randomRot(rng), randomVec3(rng, 2.0),
                      randomVec3(rng, 5.0));
}

inline ScaledRot randomScaledRot(std::mt19937_64& rng) {
  std::normal_distribution<double> logScale(0.0, 0.4);
  return ScaledRot(randomRot(rng), std::exp(logScale(rng)));
}

inline SymmetryElement randomElement(std::mt19937_64& rng, int n) {
  SymmetryElement X;
  X.nav = randomPose(rng);
  X.lm.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    X.lm.push_back(randomScaledRot(rng));
  }
  return X;
}

// Landmarks away from the vehicle so ranges and bearings stay regular.
inline SlamState randomState(std::mt19937_64& rng, int n) {
  SlamState xi;
  xi.pose = randomPose(rng);
  xi.landmarks.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d q = randomVec3(rng, 8.0);
    while (q.norm() < 0.5) {
      q = randomVec3(rng, 8.0);
    }
    xi.landmarks.push_back(q);
  }
  return xi;
}

// Truncated Taylor series with scaling and squaring, the reference for
// every closed-form exponential.
inline Eigen::MatrixXd seriesExpm(const Eigen::MatrixXd& M) {
  int squarings = 0;
  Eigen::MatrixXd S = M;
  while (S.norm() > 0.25) {
    S *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd term = result;
  for (int k = 1; k <= 20; ++k) {
    term = term * S / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

inline double stateDistance(const SlamState& a, const SlamState& b) {
  double d = (a.pose.matrix() - b.pose.matrix()).norm();
  for (size_t i = 0; i < a.landmarks.size(); ++i) {
    d = std::max(d, (a.landmarks[i] - b.landmarks[i]).norm());
  }
  return d;
}

}  // namespace rslam::testutil
