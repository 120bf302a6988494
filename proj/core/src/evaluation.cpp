#include "rslam/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace rslam {

RigidTransform umeyamaAlign(const std::vector<Eigen::Vector3d>& a,
                            const std::vector<Eigen::Vector3d>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("umeyamaAlign: size mismatch");
  }
  const int n = static_cast<int>(a.size());
  if (n < 3) {
    throw std::invalid_argument("umeyamaAlign: need at least 3 points");
  }
  Eigen::Vector3d meanA = Eigen::Vector3d::Zero();
  Eigen::Vector3d meanB = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    meanA += a[static_cast<size_t>(i)];
    meanB += b[static_cast<size_t>(i)];
  }
  meanA /= n;
  meanB /= n;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    cross += (b[static_cast<size_t>(i)] - meanB) *
             (a[static_cast<size_t>(i)] - meanA).transpose();
  }
  cross /= n;

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  // Rotation is ill-determined when the points are (nearly) collinear.
  if (svd.singularValues()(1) < 1e-9 * (1.0 + svd.singularValues()(0))) {
    throw std::domain_error("umeyamaAlign: degenerate point configuration");
  }
  Eigen::Matrix3d sign = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) {
    sign(2, 2) = -1.0;
  }
  const Eigen::Matrix3d R =
      svd.matrixU() * sign * svd.matrixV().transpose();

  RigidTransform out;
  out.rotation = Rot3(R);
  out.translation = meanB - R * meanA;
  return out;
}

double positionRmse(const std::vector<TimedPoint>& estimate,
                    const std::vector<TimedPoint>& truth, RmseWindow window) {
  if (truth.empty() || estimate.empty()) {
    throw std::invalid_argument("positionRmse: empty input");
  }
  double t0 = truth.front().first;
  double t1 = truth.back().first;
  const double tMin =
      window == RmseWindow::LastFraction ? t0 + 0.6 * (t1 - t0) : t0;

  double accum = 0.0;
  int paired = 0;
  size_t j = 0;
  for (const TimedPoint& e : estimate) {
    if (e.first < tMin) {
      continue;
    }
    while (j + 1 < truth.size() &&
           std::abs(truth[j + 1].first - e.first) <=
               std::abs(truth[j].first - e.first)) {
      ++j;
    }
    if (std::abs(truth[j].first - e.first) > 0.01) {
      continue;
    }
    accum += (truth[j].second - e.second).squaredNorm();
    ++paired;
  }
  if (paired == 0) {
    throw std::invalid_argument("positionRmse: no timestamp pairs matched");
  }
  return std::sqrt(accum / paired);
}

MappingError mappingError(const std::vector<Eigen::Vector3d>& estimate,
                          const std::vector<Eigen::Vector3d>& truth) {
  if (estimate.size() != truth.size() || estimate.empty()) {
    throw std::invalid_argument("mappingError: size mismatch or empty");
  }
  const int n = static_cast<int>(estimate.size());
  std::vector<double> err(static_cast<size_t>(n));
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    err[static_cast<size_t>(i)] =
        (estimate[static_cast<size_t>(i)] - truth[static_cast<size_t>(i)])
            .norm();
    mean += err[static_cast<size_t>(i)];
  }
  mean /= n;
  double var = 0.0;
  for (double e : err) {
    var += (e - mean) * (e - mean);
  }
  var /= n;  // population variance
  return MappingError{mean, std::sqrt(var)};
}

}  // namespace rslam
