#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"
#include "rslam/types.hpp"

namespace rslam {

struct EkfConfig {
  Eigen::Matrix<double, 6, 6> inputGain;
  double rangeVariance = 0.0625;
  Matrix9d navCov0;
  Eigen::Matrix3d lmCov0;  // m^2, world-frame landmark position
  double gravity = 9.81;

  static EkfConfig defaults();
};

// Conventional filter over the same navigation state with landmarks kept
// as world-frame points. The navigation error is multiplicative
// (exp(eps) * pose), landmark errors are additive.
struct EkfBelief {
  ExtendedPose pose;
  std::vector<Eigen::Vector3d> landmarks;  // world frame, id order
  Eigen::MatrixXd sigma;
  std::vector<int> ids;  // strictly ascending

  int landmarkCount() const { return static_cast<int>(ids.size()); }
  int dim() const { return 9 + 3 * landmarkCount(); }
  int slotOf(int id) const;
};

EkfBelief makeEkfBelief(const EkfConfig& cfg, const ExtendedPose& nav0);

EkfBelief ekfPropagate(const EkfBelief& b, const EkfConfig& cfg,
                       const ImuSample& u, double dt);
EkfBelief ekfUpdate(const EkfBelief& b, const EkfConfig& cfg,
                    const std::vector<RangeSample>& epoch);
// World-frame initialisation from the first range: along the body z axis.
EkfBelief ekfAddLandmark(const EkfBelief& b, const EkfConfig& cfg, int id,
                         double firstRange);
EkfBelief ekfAddLandmarkAt(const EkfBelief& b, const EkfConfig& cfg, int id,
                           const Eigen::Vector3d& worldPos);

// Linearisation matrices, exposed for tests.
Eigen::MatrixXd ekfStateMatrixA(const EkfBelief& b, const EkfConfig& cfg);
Eigen::MatrixXd ekfInputMatrixB(const EkfBelief& b, const EkfConfig& cfg);
Eigen::MatrixXd ekfMeasurementJacobian(const EkfBelief& b,
                                       const std::vector<RangeSample>& epoch);

bool isHealthy(const EkfBelief& b);

}  // namespace rslam
