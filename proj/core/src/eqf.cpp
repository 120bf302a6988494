#include "rslam/eqf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rslam {

namespace {
const Eigen::Vector3d kE3(0.0, 0.0, 1.0);
constexpr double kSigmaOverflow = 1e12;
constexpr double kResetStep = 1e-6;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}
}  // namespace

EqfConfig EqfConfig::defaults() {
  EqfConfig cfg;
  cfg.inputGain = Eigen::Matrix<double, 6, 6>::Zero();
  cfg.inputGain.topLeftCorner<3, 3>() = 1e-4 * Eigen::Matrix3d::Identity();
  cfg.inputGain.bottomRightCorner<3, 3>() = 1e-3 * Eigen::Matrix3d::Identity();
  cfg.navCov0 = Matrix9d::Zero();
  cfg.navCov0.block<3, 3>(0, 0) = 0.0025 * Eigen::Matrix3d::Identity();
  cfg.navCov0.block<3, 3>(3, 3) = 0.01 * Eigen::Matrix3d::Identity();
  cfg.navCov0.block<3, 3>(6, 6) = 0.01 * Eigen::Matrix3d::Identity();
  cfg.lmCov0 = 3.0 * Eigen::Matrix3d::Identity();
  return cfg;
}

int EqfBelief::slotOf(int id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) {
    return -1;
  }
  return static_cast<int>(it - ids.begin());
}

EqfBelief makeEqfBelief(const EqfConfig& cfg, const ExtendedPose& nav0) {
  EqfBelief b;
  b.X = SymmetryElement::identity(0);
  b.X.nav = cfg.originPose.inverse() * nav0;
  b.sigma = cfg.navCov0;
  return b;
}

Origin chartOrigin(const EqfBelief& b, const EqfConfig& cfg) {
  return Origin{cfg.originPose, b.landmarkCount()};
}

SlamState stateEstimate(const EqfBelief& b, const EqfConfig& cfg) {
  SlamState xi;
  xi.pose = cfg.originPose * b.X.nav;
  xi.landmarks.reserve(b.X.lm.size());
  for (const ScaledRot& Q : b.X.lm) {
    xi.landmarks.push_back(Q.inverse() * kE3);
  }
  return xi;
}

std::vector<Eigen::Vector3d> worldLandmarks(const EqfBelief& b,
                                            const EqfConfig& cfg) {
  const SlamState xi = stateEstimate(b, cfg);
  std::vector<Eigen::Vector3d> out;
  out.reserve(xi.landmarks.size());
  for (const Eigen::Vector3d& q : xi.landmarks) {
    out.push_back(xi.pose.position() + xi.pose.rotation() * q);
  }
  return out;
}

Eigen::MatrixXd stateMatrixA(const EqfBelief& b, const EqfConfig& cfg) {
  const int d = b.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);

  const Eigen::Matrix3d Rring = cfg.originPose.rotation().matrix();
  const Eigen::Vector3d vring = cfg.originPose.velocity();
  const SlamState xi = stateEstimate(b, cfg);
  const Eigen::Matrix3d Rhat = xi.pose.rotation().matrix();
  const Eigen::Vector3d bodyVel = Rhat.transpose() * xi.pose.velocity();

  // Rows / cols 0-2 rotation, 3-5 velocity, 6-8 position, then one 3-block
  // per landmark (two bearing coordinates and negative log range).
  A.block<3, 3>(3, 0) = cfg.gravity * hat(Rring.transpose() * kE3);
  A.block<3, 3>(6, 0) = hat(Rring.transpose() * vring);
  A.block<3, 3>(6, 3) = Eigen::Matrix3d::Identity();

  const Eigen::Matrix3d W = landmarkCoordsDiffAtOrigin();
  const Eigen::Matrix3d V = W.inverse();
  for (int i = 0; i < b.landmarkCount(); ++i) {
    const int row = 9 + 3 * i;
    const ScaledRot& Q = b.X.lm[static_cast<size_t>(i)];
    const Eigen::Matrix3d Qmat = Q.matrix();
    const Eigen::Vector3d& q = xi.landmarks[static_cast<size_t>(i)];
    const double qq = q.squaredNorm();

    A.block<3, 3>(row, 0) =
        -W * Qmat * Rhat.transpose() * hat(vring) * Rring;
    A.block<3, 3>(row, 3) = -W * Qmat * Rhat.transpose() * Rring;

    // Landmark self-coupling from the lift evaluated at the estimate; the
    // measured angular velocity cancels out.
    const Eigen::Vector3d wRel = q.cross(bodyVel) / qq;
    const double sHat = q.dot(bodyVel) / qq;
    const Eigen::Matrix3d F =
        sHat * Eigen::Matrix3d::Identity() + hat(Q.rotation() * wRel);
    A.block<3, 3>(row, row) = W * F * V;
  }
  return A;
}

Eigen::MatrixXd inputMatrixB(const EqfBelief& b, const EqfConfig& cfg) {
  const int d = b.dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, 6);
  B.topRows<9>() = b.X.nav.adjoint().leftCols<6>();

  const Eigen::Matrix3d W = landmarkCoordsDiffAtOrigin();
  const SlamState xi = stateEstimate(b, cfg);
  for (int i = 0; i < b.landmarkCount(); ++i) {
    const int row = 9 + 3 * i;
    B.block<3, 3>(row, 0) = W * b.X.lm[static_cast<size_t>(i)].matrix() *
                            hat(xi.landmarks[static_cast<size_t>(i)]);
  }
  return B;
}

Eigen::MatrixXd outputMatrixCstar(const EqfBelief& b, const EqfConfig& cfg,
                                  const std::vector<RangeSample>& epoch) {
  const SlamState xi = stateEstimate(b, cfg);
  const int k = static_cast<int>(epoch.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, b.dim());
  for (int j = 0; j < k; ++j) {
    const int slot = b.slotOf(epoch[static_cast<size_t>(j)].landmarkId);
    if (slot < 0) {
      throw std::invalid_argument("outputMatrixCstar: unknown landmark id");
    }
    const double predicted = xi.landmarks[static_cast<size_t>(slot)].norm();
    // Only the log-range coordinate is observed; the equivariant output
    // matrix averages the measured and predicted ranges.
    C(j, 9 + 3 * slot + 2) =
        -0.5 * (epoch[static_cast<size_t>(j)].range + predicted);
  }
  return C;
}

EqfBelief propagate(const EqfBelief& b, const EqfConfig& cfg,
                    const ImuSample& u, double dt) {
  if (dt < 0.0) {
    throw std::invalid_argument("propagate: negative time step");
  }
  // Midpoint rule on the group: the lift is re-evaluated at a half-step
  // prediction, then applied as one exponential over the full step.
  GroupTangent lambda = lift(stateEstimate(b, cfg), u.gyro, u.accel, cfg.gravity);
  GroupTangent half = lambda;
  half.nav *= 0.5 * dt;
  for (Eigen::Vector4d& w : half.lm) {
    w *= 0.5 * dt;
  }
  EqfBelief mid = b;
  mid.X = b.X * groupExp(half);
  lambda = lift(stateEstimate(mid, cfg), u.gyro, u.accel, cfg.gravity);
  lambda.nav *= dt;
  for (Eigen::Vector4d& w : lambda.lm) {
    w *= dt;
  }

  EqfBelief out = b;
  out.X = b.X * groupExp(lambda);

  const Eigen::MatrixXd A = stateMatrixA(b, cfg);
  const Eigen::MatrixXd B = inputMatrixB(b, cfg);
  const int d = b.dim();
  const Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(d, d) + dt * A +
                              (0.5 * dt * dt) * (A * A);
  out.sigma = symmetrize(Phi * b.sigma * Phi.transpose() +
                         dt * B * cfg.inputGain * B.transpose());
  return out;
}

Eigen::MatrixXd resetTransportJacobian(const EqfBelief& b,
                                       const EqfConfig& cfg,
                                       const GroupTangent& delta) {
  const Origin origin = chartOrigin(b, cfg);
  const SymmetryElement shift = groupExp(delta).inverse();
  const int d = b.dim();
  Eigen::MatrixXd J(d, d);
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    eps(j) = kResetStep;
    const Eigen::VectorXd plus =
        stateCoords(stateAction(shift, stateCoordsInv(eps, origin)), origin);
    eps(j) = -kResetStep;
    const Eigen::VectorXd minus =
        stateCoords(stateAction(shift, stateCoordsInv(eps, origin)), origin);
    eps(j) = 0.0;
    J.col(j) = (plus - minus) / (2.0 * kResetStep);
  }
  return J;
}

EqfBelief applyCorrection(const EqfBelief& b, const EqfConfig& cfg,
                          const GroupTangent& delta) {
  EqfBelief out = b;
  out.X = groupExp(delta) * b.X;
  if (cfg.resetMode == ResetMode::NumericalTransport) {
    const Eigen::MatrixXd J = resetTransportJacobian(b, cfg, delta);
    out.sigma = symmetrize(J * b.sigma * J.transpose());
  }
  return out;
}

EqfBelief update(const EqfBelief& b, const EqfConfig& cfg,
                 const std::vector<RangeSample>& epoch) {
  if (epoch.empty()) {
    return b;
  }
  std::vector<RangeSample> used;
  used.reserve(epoch.size());
  for (const RangeSample& s : epoch) {
    if (!(s.range > 0.0) || !std::isfinite(s.range)) {
      throw std::invalid_argument("update: range must be positive and finite");
    }
    if (b.slotOf(s.landmarkId) < 0) {
      throw std::invalid_argument("update: unknown landmark id");
    }
    used.push_back(s);
  }

  const SlamState xi = stateEstimate(b, cfg);
  if (cfg.gateEnabled) {
    std::vector<RangeSample> kept;
    kept.reserve(used.size());
    for (const RangeSample& s : used) {
      const std::vector<RangeSample> one{s};
      const Eigen::MatrixXd c = outputMatrixCstar(b, cfg, one);
      const double innovationVar =
          (c * b.sigma * c.transpose())(0, 0) + cfg.rangeVariance;
      const double r =
          s.range - xi.landmarks[static_cast<size_t>(b.slotOf(s.landmarkId))]
                        .norm();
      if (r * r / innovationVar <= cfg.gateThreshold) {
        kept.push_back(s);
      }
    }
    used = std::move(kept);
    if (used.empty()) {
      return b;
    }
  }

  const int k = static_cast<int>(used.size());
  Eigen::VectorXd innovation(k);
  for (int j = 0; j < k; ++j) {
    const int slot = b.slotOf(used[static_cast<size_t>(j)].landmarkId);
    innovation(j) = used[static_cast<size_t>(j)].range -
                    xi.landmarks[static_cast<size_t>(slot)].norm();
  }

  const Eigen::MatrixXd C = outputMatrixCstar(b, cfg, used);
  const Eigen::MatrixXd S =
      C * b.sigma * C.transpose() +
      cfg.rangeVariance * Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd K =
      b.sigma * C.transpose() * S.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd deltaCoords = K * innovation;

  const Origin origin = chartOrigin(b, cfg);
  const GroupTangent delta =
      GroupTangent::unflatten(originActionDiffPinv(origin) * deltaCoords);

  EqfBelief posterior = b;
  posterior.sigma = symmetrize(
      (Eigen::MatrixXd::Identity(b.dim(), b.dim()) - K * C) * b.sigma);
  return applyCorrection(posterior, cfg, delta);
}

namespace {
EqfBelief insertLandmark(const EqfBelief& b, const EqfConfig& cfg, int id,
                         const ScaledRot& Q) {
  if (b.slotOf(id) >= 0) {
    throw std::invalid_argument("addLandmark: id already present");
  }
  const auto it = std::lower_bound(b.ids.begin(), b.ids.end(), id);
  const int at = static_cast<int>(it - b.ids.begin());
  const int row = 9 + 3 * at;
  const int d = b.dim();

  EqfBelief out = b;
  out.ids.insert(out.ids.begin() + at, id);
  out.X.lm.insert(out.X.lm.begin() + at, Q);

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

EqfBelief addLandmark(const EqfBelief& b, const EqfConfig& cfg, int id,
                      double firstRange) {
  if (!(firstRange > 0.0) || !std::isfinite(firstRange)) {
    throw std::invalid_argument("addLandmark: range must be positive");
  }
  return insertLandmark(b, cfg, id, ScaledRot(Rot3(), 1.0 / firstRange));
}

EqfBelief addLandmarkAt(const EqfBelief& b, const EqfConfig& cfg, int id,
                        const Eigen::Vector3d& bodyPos) {
  const double r = bodyPos.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("addLandmarkAt: zero or non-finite position");
  }
  return insertLandmark(
      b, cfg, id,
      ScaledRot(Rot3::rotationBetween(bodyPos / r, kE3), 1.0 / r));
}

bool isHealthy(const EqfBelief& b) {
  if (!b.sigma.allFinite() || !b.X.nav.matrix().allFinite()) {
    return false;
  }
  for (const ScaledRot& Q : b.X.lm) {
    if (!Q.rotation().matrix().allFinite() || !std::isfinite(Q.scale())) {
      return false;
    }
  }
  return b.sigma.cwiseAbs().maxCoeff() < kSigmaOverflow;
}

}  // namespace rslam
