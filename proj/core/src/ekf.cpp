#include "rslam/ekf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rslam/symmetry.hpp"

namespace rslam {

namespace {
const Eigen::Vector3d kE3(0.0, 0.0, 1.0);
constexpr double kSigmaOverflow = 1e12;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}
}  // namespace

EkfConfig EkfConfig::defaults() {
  EkfConfig cfg;
  cfg.inputGain = Eigen::Matrix<double, 6, 6>::Zero();
  cfg.inputGain.topLeftCorner<3, 3>() = 1e-4 * Eigen::Matrix3d::Identity();
  cfg.inputGain.bottomRightCorner<3, 3>() = 1e-3 * Eigen::Matrix3d::Identity();
  cfg.navCov0 = Matrix9d::Zero();
  cfg.navCov0.block<3, 3>(0, 0) = 0.0025 * Eigen::Matrix3d::Identity();
  cfg.navCov0.block<3, 3>(3, 3) = 0.01 * Eigen::Matrix3d::Identity();
  cfg.navCov0.block<3, 3>(6, 6) = 0.01 * Eigen::Matrix3d::Identity();
  cfg.lmCov0 = 50.0 * Eigen::Matrix3d::Identity();
  return cfg;
}

int EkfBelief::slotOf(int id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) {
    return -1;
  }
  return static_cast<int>(it - ids.begin());
}

EkfBelief makeEkfBelief(const EkfConfig& cfg, const ExtendedPose& nav0) {
  EkfBelief b;
  b.pose = nav0;
  b.sigma = cfg.navCov0;
  return b;
}

Eigen::MatrixXd ekfStateMatrixA(const EkfBelief& b, const EkfConfig& cfg) {
  const int d = b.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  A.block<3, 3>(3, 0) = cfg.gravity * hat(kE3);
  A.block<3, 3>(6, 3) = Eigen::Matrix3d::Identity();
  return A;
}

Eigen::MatrixXd ekfInputMatrixB(const EkfBelief& b, const EkfConfig& cfg) {
  (void)cfg;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(b.dim(), 6);
  B.topRows<9>() = b.pose.adjoint().leftCols<6>();
  return B;
}

EkfBelief ekfPropagate(const EkfBelief& b, const EkfConfig& cfg,
                       const ImuSample& u, double dt) {
  if (dt < 0.0) {
    throw std::invalid_argument("ekfPropagate: negative time step");
  }
  // Midpoint rule, matching the main filter's integrator.
  SlamState nav;
  nav.pose = b.pose;
  GroupTangent lambda = lift(nav, u.gyro, u.accel, cfg.gravity);
  nav.pose = b.pose * ExtendedPose::exp(0.5 * dt * lambda.nav);
  lambda = lift(nav, u.gyro, u.accel, cfg.gravity);

  EkfBelief out = b;
  out.pose = b.pose * ExtendedPose::exp(dt * lambda.nav);

  const Eigen::MatrixXd A = ekfStateMatrixA(b, cfg);
  const Eigen::MatrixXd B = ekfInputMatrixB(b, cfg);
  const int d = b.dim();
  const Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(d, d) + dt * A +
                              (0.5 * dt * dt) * (A * A);
  out.sigma = symmetrize(Phi * b.sigma * Phi.transpose() +
                         dt * B * cfg.inputGain * B.transpose());
  return out;
}

Eigen::MatrixXd ekfMeasurementJacobian(const EkfBelief& b,
                                       const std::vector<RangeSample>& epoch) {
  const int k = static_cast<int>(epoch.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, b.dim());
  const Eigen::Vector3d x = b.pose.position();
  for (int j = 0; j < k; ++j) {
    const int slot = b.slotOf(epoch[static_cast<size_t>(j)].landmarkId);
    if (slot < 0) {
      throw std::invalid_argument("ekfMeasurementJacobian: unknown landmark id");
    }
    const Eigen::Vector3d diff = b.landmarks[static_cast<size_t>(slot)] - x;
    const double dist = diff.norm();
    if (dist < 1e-9) {
      throw std::domain_error("ekfMeasurementJacobian: landmark at vehicle");
    }
    const Eigen::RowVector3d dir = (diff / dist).transpose();
    // Position enters through the multiplicative pose error, so the
    // rotation block carries the lever arm of the current position.
    C.block<1, 3>(j, 0) = dir * hat(x);
    C.block<1, 3>(j, 6) = -dir;
    C.block<1, 3>(j, 9 + 3 * slot) = dir;
  }
  return C;
}

EkfBelief ekfUpdate(const EkfBelief& b, const EkfConfig& cfg,
                    const std::vector<RangeSample>& epoch) {
  if (epoch.empty()) {
    return b;
  }
  const int k = static_cast<int>(epoch.size());
  Eigen::VectorXd innovation(k);
  for (int j = 0; j < k; ++j) {
    const RangeSample& s = epoch[static_cast<size_t>(j)];
    if (!(s.range > 0.0) || !std::isfinite(s.range)) {
      throw std::invalid_argument("ekfUpdate: range must be positive");
    }
    const int slot = b.slotOf(s.landmarkId);
    if (slot < 0) {
      throw std::invalid_argument("ekfUpdate: unknown landmark id");
    }
    innovation(j) =
        s.range -
        (b.landmarks[static_cast<size_t>(slot)] - b.pose.position()).norm();
  }

  const Eigen::MatrixXd C = ekfMeasurementJacobian(b, epoch);
  const Eigen::MatrixXd S =
      C * b.sigma * C.transpose() +
      cfg.rangeVariance * Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd K =
      b.sigma * C.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd delta = K * innovation;

  EkfBelief out = b;
  out.pose = ExtendedPose::exp(delta.segment<9>(0)) * b.pose;
  for (int i = 0; i < b.landmarkCount(); ++i) {
    out.landmarks[static_cast<size_t>(i)] += delta.segment<3>(9 + 3 * i);
  }
  out.sigma = symmetrize(
      (Eigen::MatrixXd::Identity(b.dim(), b.dim()) - K * C) * b.sigma);
  return out;
}

namespace {
EkfBelief ekfInsertLandmark(const EkfBelief& b, const EkfConfig& cfg, int id,
                            const Eigen::Vector3d& worldPos) {
  if (b.slotOf(id) >= 0) {
    throw std::invalid_argument("ekfAddLandmark: id already present");
  }
  const auto it = std::lower_bound(b.ids.begin(), b.ids.end(), id);
  const int at = static_cast<int>(it - b.ids.begin());
  const int row = 9 + 3 * at;
  const int d = b.dim();

  EkfBelief out = b;
  out.ids.insert(out.ids.begin() + at, id);
  out.landmarks.insert(out.landmarks.begin() + at, worldPos);

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d + 3, d + 3);
  S.topLeftCorner(row, row) = b.sigma.topLeftCorner(row, row);
  S.bottomRightCorner(d - row, d - row) = b.sigma.block(row, row, d - row, d - row);
  S.block(0, row + 3, row, d - row) = b.sigma.block(0, row, row, d - row);
  S.block(row + 3, 0, d - row, row) = b.sigma.block(row, 0, d - row, row);
  S.block<3, 3>(row, row) = cfg.lmCov0;
  out.sigma = S;
  return out;
}
}  // namespace

EkfBelief ekfAddLandmark(const EkfBelief& b, const EkfConfig& cfg, int id,
                         double firstRange) {
  if (!(firstRange > 0.0) || !std::isfinite(firstRange)) {
    throw std::invalid_argument("ekfAddLandmark: range must be positive");
  }
  const Eigen::Vector3d worldPos =
      b.pose.position() + b.pose.rotation() * (firstRange * kE3);
  return ekfInsertLandmark(b, cfg, id, worldPos);
}

EkfBelief ekfAddLandmarkAt(const EkfBelief& b, const EkfConfig& cfg, int id,
                           const Eigen::Vector3d& worldPos) {
  return ekfInsertLandmark(b, cfg, id, worldPos);
}

bool isHealthy(const EkfBelief& b) {
  if (!b.sigma.allFinite() || !b.pose.matrix().allFinite()) {
    return false;
  }
  for (const Eigen::Vector3d& p : b.landmarks) {
    if (!p.allFinite()) {
      return false;
    }
  }
  return b.sigma.cwiseAbs().maxCoeff() < kSigmaOverflow;
}

}  // namespace rslam
