#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rslam/lie/se23.hpp"
#include "rslam/lie/sot3.hpp"

namespace rslam {

// Vehicle extended pose plus landmark positions expressed in the body
// frame, q_i = R^T (p_i - x).
struct SlamState {
  ExtendedPose pose;
  std::vector<Eigen::Vector3d> landmarks;
};

// Element of the symmetry group: an extended pose acting on the vehicle
// by right translation and one scaled rotation per landmark.
struct SymmetryElement {
  ExtendedPose nav;
  std::vector<ScaledRot> lm;

  static SymmetryElement identity(int landmarkCount);
  SymmetryElement operator*(const SymmetryElement& other) const;
  SymmetryElement inverse() const;
};

// Tangent of the symmetry group at the identity: 9 navigation coordinates
// plus (rotation, log scale) per landmark. Flattened order is the nav
// block first, then landmark blocks in state order.
struct GroupTangent {
  Vector9d nav = Vector9d::Zero();
  std::vector<Eigen::Vector4d> lm;

  static GroupTangent zero(int landmarkCount);
  Eigen::VectorXd flatten() const;
  static GroupTangent unflatten(const Eigen::VectorXd& v);
  int dim() const { return 9 + 4 * static_cast<int>(lm.size()); }
};

SymmetryElement groupExp(const GroupTangent& u);
// Block diagonal adjoint of the group, (9+4n) square.
Eigen::MatrixXd groupAdjoint(const SymmetryElement& X);

// Fixed chart origin. The landmark components are pinned at e3, only the
// pose component is configurable.
struct Origin {
  ExtendedPose pose;
  int landmarkCount = 0;
};

// Right group action on the state space and the induced output action on
// range vectors. h(stateAction(X, xi)) == outputAction(X, h(xi)).
SlamState stateAction(const SymmetryElement& X, const SlamState& xi);
Eigen::VectorXd rangeOutput(const SlamState& xi);
Eigen::VectorXd outputAction(const SymmetryElement& X,
                             const Eigen::VectorXd& y);

// Group element carrying `from` to `to` under stateAction (the action is
// transitive). Landmark rotations are chosen as minimal geodesics.
SymmetryElement transitivityWitness(const SlamState& from, const SlamState& to);

// Equivariant lift of the IMU-driven system dynamics onto the group.
// gravity is the magnitude in x'' = R a + g e3.
GroupTangent lift(const SlamState& xi, const Eigen::Vector3d& omega,
                  const Eigen::Vector3d& accel, double gravity);

// Landmark chart about e3: (two bearing coordinates, negative log range).
// Undefined on the ray opposite e3 (throws).
Eigen::Vector3d landmarkCoords(const Eigen::Vector3d& q);
Eigen::Vector3d landmarkCoordsInv(const Eigen::Vector3d& c);
// Differential of landmarkCoords at e3.
Eigen::Matrix3d landmarkCoordsDiffAtOrigin();

// State chart about the origin: SE_2(3) log for the pose, landmarkCoords
// per landmark, stacked into 9+3n coordinates.
Eigen::VectorXd stateCoords(const SlamState& xi, const Origin& origin);
SlamState stateCoordsInv(const Eigen::VectorXd& eps, const Origin& origin);

// Differential at the group identity of E -> stateCoords(stateAction(E,
// origin)), a (9+3n) x (9+4n) matrix, and its Moore-Penrose right inverse.
Eigen::MatrixXd originActionDiff(const Origin& origin);
Eigen::MatrixXd originActionDiffPinv(const Origin& origin);

}  // namespace rslam
