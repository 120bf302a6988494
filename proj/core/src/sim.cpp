#include "rslam/sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

#include "rslam/lie/so3.hpp"

namespace rslam {

namespace {

const Eigen::Vector3d kE3(0.0, 0.0, 1.0);

// Lissajous spin-up: cruise speed is reached kRampTime seconds in.
constexpr double kRampTime = 30.0;
constexpr double kRampStartFraction = 0.5;

// Independent deterministic streams derived from one seed.
std::mt19937_64 seededRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{seed, stream};
  return std::mt19937_64(seq);
}

struct KinematicSample {
  Eigen::Vector3d pos;
  Eigen::Vector3d vel;
  Eigen::Vector3d acc;
  Rot3 rot;
  Eigen::Vector3d bodyRate;
};

// ZYX Euler attitude with analytic body rates.
struct EulerProfile {
  double yaw0 = 0.0, yawRate = 0.0;
  double pitchAmp = 0.0, pitchFreq = 0.0;
  double rollAmp = 0.0, rollFreq = 0.0, rollPhase = 0.0;

  void eval(double t, Rot3* rot, Eigen::Vector3d* bodyRate) const {
    const double psi = yaw0 + yawRate * t;
    const double theta = pitchAmp * std::sin(pitchFreq * t);
    const double phi = rollAmp * std::sin(rollFreq * t + rollPhase);
    const double dpsi = yawRate;
    const double dtheta = pitchAmp * pitchFreq * std::cos(pitchFreq * t);
    const double dphi = rollAmp * rollFreq * std::cos(rollFreq * t + rollPhase);

    const Rot3 Rz = Rot3::exp(psi * kE3);
    const Rot3 Ry = Rot3::exp(theta * Eigen::Vector3d::UnitY());
    const Rot3 Rx = Rot3::exp(phi * Eigen::Vector3d::UnitX());
    *rot = Rz * Ry * Rx;
    *bodyRate = dphi * Eigen::Vector3d::UnitX() +
                Rx.inverse() * (dtheta * Eigen::Vector3d::UnitY()) +
                Rx.inverse() * (Ry.inverse() * (dpsi * kE3));
  }
};

// Natural cubic spline through (t_i, y_i), C2, second derivative zero at
// the ends. Standard tridiagonal solve for the knot curvatures.
class CubicSpline3 {
 public:
  CubicSpline3(std::vector<double> times,
               std::vector<Eigen::Vector3d> points)
      : t_(std::move(times)), y_(std::move(points)) {
    const int m = static_cast<int>(t_.size());
    if (m < 3 || y_.size() != t_.size()) {
      throw std::invalid_argument("CubicSpline3: need at least 3 knots");
    }
    curv_.assign(static_cast<size_t>(m), Eigen::Vector3d::Zero());
    const int inner = m - 2;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(inner, inner);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(inner, 3);
    for (int i = 1; i <= inner; ++i) {
      const double hPrev = t_[i] - t_[i - 1];
      const double hNext = t_[i + 1] - t_[i];
      T(i - 1, i - 1) = 2.0 * (hPrev + hNext);
      if (i > 1) T(i - 1, i - 2) = hPrev;
      if (i < inner) T(i - 1, i) = hNext;
      rhs.row(i - 1) = 6.0 * ((y_[i + 1] - y_[i]) / hNext -
                              (y_[i] - y_[i - 1]) / hPrev)
                           .transpose();
    }
    const Eigen::MatrixXd sol = T.partialPivLu().solve(rhs);
    for (int i = 1; i <= inner; ++i) {
      curv_[static_cast<size_t>(i)] = sol.row(i - 1).transpose();
    }
  }

  void eval(double t, Eigen::Vector3d* p, Eigen::Vector3d* v,
            Eigen::Vector3d* a) const {
    const int m = static_cast<int>(t_.size());
    int i = 0;
    while (i + 2 < m && t > t_[static_cast<size_t>(i) + 1]) ++i;
    const double h = t_[static_cast<size_t>(i) + 1] - t_[static_cast<size_t>(i)];
    const double u = t - t_[static_cast<size_t>(i)];
    const Eigen::Vector3d& ya = y_[static_cast<size_t>(i)];
    const Eigen::Vector3d& yb = y_[static_cast<size_t>(i) + 1];
    const Eigen::Vector3d& ca = curv_[static_cast<size_t>(i)];
    const Eigen::Vector3d& cb = curv_[static_cast<size_t>(i) + 1];
    const Eigen::Vector3d slope =
        (yb - ya) / h - h / 6.0 * (cb + 2.0 * ca);
    *p = ya + u * slope + 0.5 * u * u * ca + u * u * u / (6.0 * h) * (cb - ca);
    *v = slope + u * ca + 0.5 * u * u / h * (cb - ca);
    *a = ca + u / h * (cb - ca);
  }

 private:
  std::vector<double> t_;
  std::vector<Eigen::Vector3d> y_;
  std::vector<Eigen::Vector3d> curv_;
};

class TrajectoryModel {
 public:
  explicit TrajectoryModel(const TrajectorySpec& spec) : spec_(spec) {
    if (spec.duration <= 0.0) {
      throw std::invalid_argument("TrajectorySpec: duration must be positive");
    }
    switch (spec.kind) {
      case TrajectoryKind::Circle: {
        attitude_.yawRate = spec.speed / spec.radius;
        attitude_.yaw0 = M_PI / 2.0;  // tangent heading at t = 0
        break;
      }
      case TrajectoryKind::Lissajous: {
        baseFreq_ = spec.speed / (2.0 * spec.radius);
        attitude_.yawRate = 2.0 * M_PI / 24.0;
        attitude_.pitchAmp = 0.28;
        attitude_.pitchFreq = 2.0 * M_PI / 11.0;
        attitude_.rollAmp = 0.22;
        attitude_.rollFreq = 2.0 * M_PI / 7.0;
        attitude_.rollPhase = 1.0;
        break;
      }
      case TrajectoryKind::WaypointSpline: {
        auto rng = seededRng(spec.seed, 0xA11CE);
        std::uniform_real_distribution<double> lateral(-spec.radius,
                                                       spec.radius);
        std::uniform_real_distribution<double> vertical(-2.0, 2.0);
        const int count = std::max(5, static_cast<int>(spec.duration / 8.0));
        std::vector<Eigen::Vector3d> pts;
        pts.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) {
          pts.emplace_back(lateral(rng), lateral(rng),
                           -(spec.altitude + vertical(rng)));
        }
        // Knot times proportional to chord length over [0, duration].
        std::vector<double> times(pts.size(), 0.0);
        double total = 0.0;
        for (size_t i = 1; i < pts.size(); ++i) {
          total += (pts[i] - pts[i - 1]).norm();
          times[i] = total;
        }
        if (total <= 0.0) {
          throw std::runtime_error("TrajectoryModel: degenerate waypoints");
        }
        for (double& tk : times) {
          tk *= spec.duration / total;
        }
        spline_ = std::make_unique<CubicSpline3>(std::move(times),
                                                 std::move(pts));
        attitude_.yawRate = 2.0 * M_PI / 45.0;
        attitude_.pitchAmp = 0.1;
        attitude_.pitchFreq = 2.0 * M_PI / 13.0;
        attitude_.rollAmp = 0.1;
        attitude_.rollFreq = 2.0 * M_PI / 9.0;
        break;
      }
    }
  }

  KinematicSample at(double t) const {
    KinematicSample s;
    switch (spec_.kind) {
      case TrajectoryKind::Circle: {
        const double w = spec_.speed / spec_.radius;
        const double wz = 2.0 * M_PI / 15.0;
        const double cz = spec_.altitudeAmplitude;
        s.pos = Eigen::Vector3d(spec_.radius * std::cos(w * t),
                                spec_.radius * std::sin(w * t),
                                -spec_.altitude + cz * std::sin(wz * t));
        s.vel = Eigen::Vector3d(-spec_.radius * w * std::sin(w * t),
                                spec_.radius * w * std::cos(w * t),
                                cz * wz * std::cos(wz * t));
        s.acc = Eigen::Vector3d(-spec_.radius * w * w * std::cos(w * t),
                                -spec_.radius * w * w * std::sin(w * t),
                                -cz * wz * wz * std::sin(wz * t));
        break;
      }
      case TrajectoryKind::Lissajous: {
        // Spin-up phase: the figure-eight parameter runs at half pace for
        // the first kRampTime seconds and blends smoothly to full speed.
        const double f0 = kRampStartFraction;
        const double u = std::min(t / kRampTime, 1.0);
        const double ramp = f0 + (1.0 - f0) * u * u * (3.0 - 2.0 * u);
        const double dramp =
            t < kRampTime ? (1.0 - f0) * 6.0 * u * (1.0 - u) / kRampTime : 0.0;
        const double tau =
            t <= kRampTime
                ? f0 * t + (1.0 - f0) * kRampTime * (u * u * u - 0.5 * u * u * u * u)
                : f0 * kRampTime + (1.0 - f0) * kRampTime * 0.5 + (t - kRampTime);
        const double w = 2.0 * M_PI * baseFreq_;
        const double A = spec_.radius;
        const double wz = 2.0 * M_PI / 15.0;
        const double cz = spec_.altitudeAmplitude;
        const Eigen::Vector3d dp(A * w * std::cos(w * tau),
                                 A * w * std::cos(2.0 * w * tau),
                                 cz * wz * std::cos(wz * tau));
        const Eigen::Vector3d ddp(-A * w * w * std::sin(w * tau),
                                  -2.0 * A * w * w * std::sin(2.0 * w * tau),
                                  -cz * wz * wz * std::sin(wz * tau));
        s.pos = Eigen::Vector3d(A * std::sin(w * tau),
                                0.5 * A * std::sin(2.0 * w * tau),
                                -spec_.altitude + cz * std::sin(wz * tau));
        s.vel = dp * ramp;
        s.acc = ddp * ramp * ramp + dp * dramp;
        break;
      }
      case TrajectoryKind::WaypointSpline: {
        spline_->eval(t, &s.pos, &s.vel, &s.acc);
        break;
      }
    }
    attitude_.eval(t, &s.rot, &s.bodyRate);
    return s;
  }

 private:
  TrajectorySpec spec_;
  EulerProfile attitude_;
  double baseFreq_ = 0.0;
  std::unique_ptr<CubicSpline3> spline_;
};

}  // namespace

std::vector<Eigen::Vector3d> defaultLandmarkField() {
  // Pole tops 2 m above ground with z pointing down.
  return {
      {22.0, 22.0, -2.0},  {-22.0, 22.0, -2.0}, {-22.0, -22.0, -2.0},
      {22.0, -22.0, -2.0}, {25.0, 0.0, -2.0},   {-25.0, 0.0, -2.0},
      {0.0, 25.0, -2.0},   {0.0, -25.0, -2.0},
  };
}

SimOutput generate(const TrajectorySpec& traj, const SensorSpec& sensors) {
  if (sensors.imuRate <= 0.0 || sensors.rangeRate <= 0.0) {
    throw std::invalid_argument("SensorSpec: rates must be positive");
  }
  const TrajectoryModel model(traj);
  SimOutput out;
  out.landmarks =
      sensors.landmarks.empty() ? defaultLandmarkField() : sensors.landmarks;

  auto gyroRng = seededRng(sensors.seed, 1);
  auto accelRng = seededRng(sensors.seed, 2);
  auto rangeRng = seededRng(sensors.seed, 3);
  std::normal_distribution<double> unitNormal(0.0, 1.0);
  const double gyroSigma =
      std::sqrt(sensors.gyroNoiseDensity * sensors.imuRate);
  const double accelSigma =
      std::sqrt(sensors.accelNoiseDensity * sensors.imuRate);

  const double dtImu = 1.0 / sensors.imuRate;
  const int imuCount = static_cast<int>(std::floor(traj.duration / dtImu)) + 1;
  out.truth.reserve(static_cast<size_t>(imuCount));
  out.imu.reserve(static_cast<size_t>(imuCount));
  for (int k = 0; k < imuCount; ++k) {
    const double t = k * dtImu;
    const KinematicSample s = model.at(t);
    out.truth.push_back({t, ExtendedPose(s.rot, s.vel, s.pos)});

    ImuSample m;
    m.t = t;
    m.gyro = s.bodyRate;
    // Specific force: x'' = R a + g e3.
    m.accel = s.rot.inverse() * (s.acc - sensors.gravity * kE3);
    for (int axis = 0; axis < 3; ++axis) {
      m.gyro(axis) += gyroSigma * unitNormal(gyroRng);
      m.accel(axis) += accelSigma * unitNormal(accelRng);
    }
    out.imu.push_back(m);
  }

  const double dtRange = 1.0 / sensors.rangeRate;
  const int rangeEpochs =
      static_cast<int>(std::floor(traj.duration / dtRange)) + 1;
  const size_t lmCount = out.landmarks.size();
  out.ranges.reserve(static_cast<size_t>(rangeEpochs) * lmCount);
  for (int k = 0; k < rangeEpochs; ++k) {
    const double t = k * dtRange;
    const KinematicSample s = model.at(t);
    for (size_t i = 0; i < lmCount; ++i) {
      // A single transceiver polls one responder per epoch, cycling
      // through the field; AllPerEpoch ranges every landmark at once.
      if (sensors.rangeSchedule == RangeSchedule::RoundRobin &&
          i != static_cast<size_t>(k) % lmCount) {
        continue;
      }
      RangeSample r;
      r.t = t;
      r.landmarkId = static_cast<int>(i);
      r.range = (out.landmarks[i] - s.pos).norm() +
                sensors.rangeSigma * unitNormal(rangeRng);
      if (r.range < 1e-3) {
        r.range = 1e-3;  // a physical range is never negative
      }
      out.ranges.push_back(r);
    }
  }
  return out;
}

std::vector<RangeSample> applyDropout(const std::vector<RangeSample>& ranges,
                                      const SensorSpec& sensors) {
  if (sensors.dropoutPeriod <= 0.0 || sensors.dropoutGap <= 0.0) {
    return ranges;
  }
  if (sensors.dropoutGap >= sensors.dropoutPeriod) {
    throw std::invalid_argument("applyDropout: gap must be below the period");
  }
  int maxId = -1;
  for (const RangeSample& r : ranges) {
    maxId = std::max(maxId, r.landmarkId);
  }
  auto phaseRng = seededRng(sensors.seed, 4);
  std::uniform_real_distribution<double> uniform(0.0, sensors.dropoutPeriod);
  std::vector<double> phase(static_cast<size_t>(maxId + 1));
  for (double& p : phase) {
    p = uniform(phaseRng);
  }

  std::vector<RangeSample> kept;
  kept.reserve(ranges.size());
  for (const RangeSample& r : ranges) {
    const double local = std::fmod(
        r.t - phase[static_cast<size_t>(r.landmarkId)] +
            1e6 * sensors.dropoutPeriod,
        sensors.dropoutPeriod);
    if (local >= sensors.dropoutGap) {
      kept.push_back(r);
    }
  }
  return kept;
}

}  // namespace rslam
