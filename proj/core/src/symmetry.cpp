#include "rslam/symmetry.hpp"

#include <cmath>
#include <stdexcept>

namespace rslam {

namespace {
constexpr double kAntipodalTol = 1e-9;   // sin of angle from the -e3 ray
constexpr double kSmallBearing = 1e-6;   // series switch for the chart
const Eigen::Vector3d kE3(0.0, 0.0, 1.0);
}  // namespace

SymmetryElement SymmetryElement::identity(int landmarkCount) {
  SymmetryElement X;
  X.lm.assign(static_cast<size_t>(landmarkCount), ScaledRot());
  return X;
}

SymmetryElement SymmetryElement::operator*(const SymmetryElement& other) const {
  if (lm.size() != other.lm.size()) {
    throw std::invalid_argument("SymmetryElement: landmark count mismatch");
  }
  SymmetryElement out;
  out.nav = nav * other.nav;
  out.lm.reserve(lm.size());
  for (size_t i = 0; i < lm.size(); ++i) {
    out.lm.push_back(lm[i] * other.lm[i]);
  }
  return out;
}

SymmetryElement SymmetryElement::inverse() const {
  SymmetryElement out;
  out.nav = nav.inverse();
  out.lm.reserve(lm.size());
  for (const ScaledRot& q : lm) {
    out.lm.push_back(q.inverse());
  }
  return out;
}

GroupTangent GroupTangent::zero(int landmarkCount) {
  GroupTangent u;
  u.lm.assign(static_cast<size_t>(landmarkCount), Eigen::Vector4d::Zero());
  return u;
}

Eigen::VectorXd GroupTangent::flatten() const {
  Eigen::VectorXd v(dim());
  v.segment<9>(0) = nav;
  for (size_t i = 0; i < lm.size(); ++i) {
    v.segment<4>(9 + 4 * static_cast<int>(i)) = lm[i];
  }
  return v;
}

GroupTangent GroupTangent::unflatten(const Eigen::VectorXd& v) {
  if ((v.size() - 9) % 4 != 0 || v.size() < 9) {
    throw std::invalid_argument("GroupTangent: bad flattened size");
  }
  GroupTangent u;
  u.nav = v.segment<9>(0);
  const int n = static_cast<int>((v.size() - 9) / 4);
  u.lm.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    u.lm.push_back(v.segment<4>(9 + 4 * i));
  }
  return u;
}

SymmetryElement groupExp(const GroupTangent& u) {
  SymmetryElement X;
  X.nav = ExtendedPose::exp(u.nav);
  X.lm.reserve(u.lm.size());
  for (const Eigen::Vector4d& w : u.lm) {
    X.lm.push_back(ScaledRot::exp(w));
  }
  return X;
}

Eigen::MatrixXd groupAdjoint(const SymmetryElement& X) {
  const int n = static_cast<int>(X.lm.size());
  Eigen::MatrixXd Ad = Eigen::MatrixXd::Zero(9 + 4 * n, 9 + 4 * n);
  Ad.topLeftCorner<9, 9>() = X.nav.adjoint();
  for (int i = 0; i < n; ++i) {
    Ad.block<4, 4>(9 + 4 * i, 9 + 4 * i) = X.lm[static_cast<size_t>(i)].adjoint();
  }
  return Ad;
}

SlamState stateAction(const SymmetryElement& X, const SlamState& xi) {
  if (X.lm.size() != xi.landmarks.size()) {
    throw std::invalid_argument("stateAction: landmark count mismatch");
  }
  SlamState out;
  out.pose = xi.pose * X.nav;
  out.landmarks.reserve(xi.landmarks.size());
  for (size_t i = 0; i < xi.landmarks.size(); ++i) {
    out.landmarks.push_back(X.lm[i].inverse() * xi.landmarks[i]);
  }
  return out;
}

Eigen::VectorXd rangeOutput(const SlamState& xi) {
  Eigen::VectorXd y(xi.landmarks.size());
  for (size_t i = 0; i < xi.landmarks.size(); ++i) {
    y(static_cast<int>(i)) = xi.landmarks[i].norm();
  }
  return y;
}

Eigen::VectorXd outputAction(const SymmetryElement& X,
                             const Eigen::VectorXd& y) {
  if (static_cast<size_t>(y.size()) != X.lm.size()) {
    throw std::invalid_argument("outputAction: output size mismatch");
  }
  Eigen::VectorXd out(y.size());
  for (int i = 0; i < y.size(); ++i) {
    out(i) = y(i) / X.lm[static_cast<size_t>(i)].scale();
  }
  return out;
}

SymmetryElement transitivityWitness(const SlamState& from,
                                    const SlamState& to) {
  if (from.landmarks.size() != to.landmarks.size()) {
    throw std::invalid_argument("transitivityWitness: landmark count mismatch");
  }
  SymmetryElement X;
  X.nav = from.pose.inverse() * to.pose;
  X.lm.reserve(from.landmarks.size());
  for (size_t i = 0; i < from.landmarks.size(); ++i) {
    const Eigen::Vector3d& qf = from.landmarks[i];
    const Eigen::Vector3d& qt = to.landmarks[i];
    const double nf = qf.norm();
    const double nt = qt.norm();
    if (nf <= 0.0 || nt <= 0.0) {
      throw std::invalid_argument("transitivityWitness: zero landmark vector");
    }
    // Q^{-1} qf = qt requires R_Q^T to carry qf onto qt.
    X.lm.emplace_back(Rot3::rotationBetween(qt / nt, qf / nf), nf / nt);
  }
  return X;
}

GroupTangent lift(const SlamState& xi, const Eigen::Vector3d& omega,
                  const Eigen::Vector3d& accel, double gravity) {
  GroupTangent u = GroupTangent::zero(static_cast<int>(xi.landmarks.size()));
  const Rot3 Rinv = xi.pose.rotation().inverse();
  const Eigen::Vector3d bodyVel = Rinv * xi.pose.velocity();
  u.nav.segment<3>(0) = omega;
  u.nav.segment<3>(3) = accel + gravity * (Rinv * kE3);
  u.nav.segment<3>(6) = bodyVel;
  for (size_t i = 0; i < xi.landmarks.size(); ++i) {
    const Eigen::Vector3d& q = xi.landmarks[i];
    const double qq = q.squaredNorm();
    if (qq < 1e-12) {
      throw std::domain_error("lift: landmark coincides with the vehicle");
    }
    u.lm[i].head<3>() = omega + q.cross(bodyVel) / qq;
    u.lm[i](3) = q.dot(bodyVel) / qq;
  }
  return u;
}

Eigen::Vector3d landmarkCoords(const Eigen::Vector3d& q) {
  const double r = q.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("landmarkCoords: zero or non-finite input");
  }
  const double rho = std::hypot(q(0), q(1));
  if (q(2) < 0.0 && rho / r < kAntipodalTol) {
    throw std::domain_error("landmarkCoords: antipodal landmark coordinates");
  }
  // k = theta / |e3 x q| with theta the angle from e3; near the chart
  // center the ratio tends to 1/r.
  double k;
  if (rho / r < kSmallBearing) {
    const double x = rho / r;
    k = (1.0 + x * x / 6.0) / r;
  } else {
    k = std::atan2(rho, q(2)) / rho;
  }
  return Eigen::Vector3d(k * q(1), -k * q(0), -std::log(r));
}

Eigen::Vector3d landmarkCoordsInv(const Eigen::Vector3d& c) {
  const Eigen::Vector3d w(c(0), c(1), 0.0);
  const Eigen::Vector3d dir = Rot3::exp(w).inverse() * kE3;
  return std::exp(-c(2)) * dir;
}

Eigen::Matrix3d landmarkCoordsDiffAtOrigin() {
  Eigen::Matrix3d D;
  // clang-format off
  D <<  0, 1,  0,
       -1, 0,  0,
        0, 0, -1;
  // clang-format on
  return D;
}

Eigen::VectorXd stateCoords(const SlamState& xi, const Origin& origin) {
  const int n = static_cast<int>(xi.landmarks.size());
  if (n != origin.landmarkCount) {
    throw std::invalid_argument("stateCoords: landmark count mismatch");
  }
  Eigen::VectorXd eps(9 + 3 * n);
  eps.segment<9>(0) = (origin.pose.inverse() * xi.pose).log();
  for (int i = 0; i < n; ++i) {
    eps.segment<3>(9 + 3 * i) =
        landmarkCoords(xi.landmarks[static_cast<size_t>(i)]);
  }
  return eps;
}

SlamState stateCoordsInv(const Eigen::VectorXd& eps, const Origin& origin) {
  const int n = origin.landmarkCount;
  if (eps.size() != 9 + 3 * n) {
    throw std::invalid_argument("stateCoordsInv: coordinate size mismatch");
  }
  SlamState xi;
  xi.pose = origin.pose * ExtendedPose::exp(eps.segment<9>(0));
  xi.landmarks.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    xi.landmarks.push_back(landmarkCoordsInv(eps.segment<3>(9 + 3 * i)));
  }
  return xi;
}

Eigen::MatrixXd originActionDiff(const Origin& origin) {
  const int n = origin.landmarkCount;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(9 + 3 * n, 9 + 4 * n);
  D.topLeftCorner<9, 9>().setIdentity();
  for (int i = 0; i < n; ++i) {
    // Rows pick (w1, w2, s); the rotation about e3 is the isotropy
    // direction of the landmark origin and drops out.
    D(9 + 3 * i + 0, 9 + 4 * i + 0) = 1.0;
    D(9 + 3 * i + 1, 9 + 4 * i + 1) = 1.0;
    D(9 + 3 * i + 2, 9 + 4 * i + 3) = 1.0;
  }
  return D;
}

Eigen::MatrixXd originActionDiffPinv(const Origin& origin) {
  // The rows of originActionDiff are orthonormal, so the Moore-Penrose
  // inverse is the transpose.
  return originActionDiff(origin).transpose();
}

}  // namespace rslam
