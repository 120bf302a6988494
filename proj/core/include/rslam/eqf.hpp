#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rslam/symmetry.hpp"
#include "rslam/types.hpp"

namespace rslam {

enum class ResetMode {
  None,
  NumericalTransport,  // covariance carried through the post-update chart change
};

struct EqfConfig {
  // Continuous-time input noise (gyro rad^2/s, accel m^2/s^3 spectral
  // densities on the diagonal).
  Eigen::Matrix<double, 6, 6> inputGain;
  double rangeVariance = 0.0625;  // m^2 per range measurement
  Matrix9d navCov0;
  Eigen::Matrix3d lmCov0;  // bearing rad^2 x2, log-range log(m)^2
  double gravity = 9.81;
  ExtendedPose originPose;  // chart origin, identity unless configured
  ResetMode resetMode = ResetMode::NumericalTransport;
  bool gateEnabled = false;
  double gateThreshold = 10.83;  // squared-innovation / variance, per sample

  static EqfConfig defaults();
};

// Filter state: group element, covariance of the chart error coordinates
// (nav 9 first, then 3 per landmark in id order) and the id layout.
struct EqfBelief {
  SymmetryElement X;
  Eigen::MatrixXd sigma;
  std::vector<int> ids;  // strictly ascending

  int landmarkCount() const { return static_cast<int>(ids.size()); }
  int dim() const { return 9 + 3 * landmarkCount(); }
  // Slot of a landmark id, -1 if unknown.
  int slotOf(int id) const;
};

EqfBelief makeEqfBelief(const EqfConfig& cfg, const ExtendedPose& nav0);

Origin chartOrigin(const EqfBelief& b, const EqfConfig& cfg);
SlamState stateEstimate(const EqfBelief& b, const EqfConfig& cfg);
// Landmark positions in the world frame, id order.
std::vector<Eigen::Vector3d> worldLandmarks(const EqfBelief& b,
                                            const EqfConfig& cfg);

EqfBelief propagate(const EqfBelief& b, const EqfConfig& cfg,
                    const ImuSample& u, double dt);

// Applies one epoch of ranges (shared timestamp). All ids must already be
// in the belief; initialise unknown landmarks with addLandmark first.
EqfBelief update(const EqfBelief& b, const EqfConfig& cfg,
                 const std::vector<RangeSample>& epoch);

// Landmark insertion without prior information: the body-frame estimate
// starts at firstRange * e3 with the configured covariance block.
EqfBelief addLandmark(const EqfBelief& b, const EqfConfig& cfg, int id,
                      double firstRange);
// Landmark insertion at a known body-frame position (reference runs).
EqfBelief addLandmarkAt(const EqfBelief& b, const EqfConfig& cfg, int id,
                        const Eigen::Vector3d& bodyPos);

// Riccati matrices of the linearised error dynamics, exposed for tests.
Eigen::MatrixXd stateMatrixA(const EqfBelief& b, const EqfConfig& cfg);
Eigen::MatrixXd inputMatrixB(const EqfBelief& b, const EqfConfig& cfg);
Eigen::MatrixXd outputMatrixCstar(const EqfBelief& b, const EqfConfig& cfg,
                                  const std::vector<RangeSample>& epoch);

// Chart change induced by a correction: moves X by groupExp(delta) on the
// left and transports sigma through the reparametrised error coordinates.
EqfBelief applyCorrection(const EqfBelief& b, const EqfConfig& cfg,
                          const GroupTangent& delta);
// The transport Jacobian itself (central differences).
Eigen::MatrixXd resetTransportJacobian(const EqfBelief& b,
                                       const EqfConfig& cfg,
                                       const GroupTangent& delta);

// False once sigma overflows or any entry stops being finite.
bool isHealthy(const EqfBelief& b);

}  // namespace rslam
