#pragma once

#include <Eigen/Dense>

namespace rslam {

Eigen::Matrix3d hat(const Eigen::Vector3d& w);
Eigen::Vector3d vee(const Eigen::Matrix3d& W);

// Left Jacobian of the SO(3) exponential and its inverse.
Eigen::Matrix3d so3LeftJacobian(const Eigen::Vector3d& w);
Eigen::Matrix3d so3LeftJacobianInv(const Eigen::Vector3d& w);

// Rotation matrix stored explicitly. Compositions are counted and the
// product is re-projected onto SO(3) (polar projection) every 1000 steps
// so long filter runs cannot drift off the manifold.
class Rot3 {
 public:
  Rot3() : mat_(Eigen::Matrix3d::Identity()) {}
  explicit Rot3(const Eigen::Matrix3d& R) : mat_(R) {}

  // Validating constructor, rejects matrices farther than tol from SO(3).
  static Rot3 fromMatrix(const Eigen::Matrix3d& R, double tol = 1e-9);

  // Unit quaternion (w, x, y, z); normalised first, rejected if the norm
  // is farther than tol from 1.
  static Rot3 fromQuaternion(double qw, double qx, double qy, double qz,
                             double tol = 1e-6);

  static Rot3 exp(const Eigen::Vector3d& w);
  Eigen::Vector3d log() const;

  // Minimal geodesic rotation taking direction a to direction b.
  // Throws for antiparallel inputs, where the axis is not unique.
  static Rot3 rotationBetween(const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b);

  Rot3 operator*(const Rot3& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return mat_ * v; }
  Rot3 inverse() const;

  const Eigen::Matrix3d& matrix() const { return mat_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(mat_); }

 private:
  Eigen::Matrix3d mat_;
  unsigned compositions_ = 0;
};

// Nearest rotation in Frobenius norm (SVD polar projection).
Eigen::Matrix3d projectToSO3(const Eigen::Matrix3d& M);

}  // namespace rslam
