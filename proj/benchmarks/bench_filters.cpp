#include <benchmark/benchmark.h>

#include <random>

#include "rslam/ekf.hpp"
#include "rslam/eqf.hpp"
#include "rslam/lie/se23.hpp"
#include "rslam/symmetry.hpp"

namespace {

using namespace rslam;

EqfBelief beliefWith(int landmarks) {
  const EqfConfig cfg = EqfConfig::defaults();
  ExtendedPose nav;
  EqfBelief b = makeEqfBelief(cfg, nav);
  for (int i = 0; i < landmarks; ++i) {
    b = addLandmarkAt(b, cfg, i, Eigen::Vector3d(2.0 + i, 1.0, 3.0));
  }
  return b;
}

EkfBelief ekfBeliefWith(int landmarks) {
  const EkfConfig cfg = EkfConfig::defaults();
  ExtendedPose nav;
  EkfBelief b = makeEkfBelief(cfg, nav);
  for (int i = 0; i < landmarks; ++i) {
    b = ekfAddLandmarkAt(b, cfg, i, Eigen::Vector3d(2.0 + i, 1.0, -2.0));
  }
  return b;
}

void BM_Se23Exp(benchmark::State& state) {
  Vector9d u;
  u << 0.01, -0.02, 0.03, 0.1, 0.2, -0.1, 0.5, 0.4, -0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExtendedPose::exp(u));
  }
}
BENCHMARK(BM_Se23Exp);

void BM_GroupExp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GroupTangent u = GroupTangent::zero(n);
  u.nav << 0.01, -0.02, 0.03, 0.1, 0.2, -0.1, 0.5, 0.4, -0.3;
  for (int i = 0; i < n; ++i) {
    u.lm[static_cast<size_t>(i)] << 0.02, -0.01, 0.03, 0.1;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(groupExp(u));
  }
}
BENCHMARK(BM_GroupExp)->Arg(1)->Arg(8)->Arg(32);

void BM_EqfPropagate(benchmark::State& state) {
  const EqfConfig cfg = EqfConfig::defaults();
  EqfBelief b = beliefWith(static_cast<int>(state.range(0)));
  ImuSample u;
  u.t = 0.0;
  u.gyro = Eigen::Vector3d(0.05, -0.02, 0.1);
  u.accel = Eigen::Vector3d(0.3, 0.1, -9.7);
  for (auto _ : state) {
    b = propagate(b, cfg, u, 2.5e-3);
  }
}
BENCHMARK(BM_EqfPropagate)->Arg(1)->Arg(8)->Arg(32);

void BM_EqfUpdate(benchmark::State& state) {
  const EqfConfig cfg = EqfConfig::defaults();
  const EqfBelief base = beliefWith(static_cast<int>(state.range(0)));
  std::vector<RangeSample> epoch;
  epoch.push_back({0.0, 0, 3.9});
  EqfBelief b = base;
  int step = 0;
  for (auto _ : state) {
    b = update(b, cfg, epoch);
    if (++step % 256 == 0) {
      b = base;  // keep the covariance away from its fixed point
    }
  }
}
BENCHMARK(BM_EqfUpdate)->Arg(1)->Arg(8)->Arg(32);

void BM_EkfPropagate(benchmark::State& state) {
  const EkfConfig cfg = EkfConfig::defaults();
  EkfBelief b = ekfBeliefWith(static_cast<int>(state.range(0)));
  ImuSample u;
  u.t = 0.0;
  u.gyro = Eigen::Vector3d(0.05, -0.02, 0.1);
  u.accel = Eigen::Vector3d(0.3, 0.1, -9.7);
  for (auto _ : state) {
    b = ekfPropagate(b, cfg, u, 2.5e-3);
  }
}
BENCHMARK(BM_EkfPropagate)->Arg(1)->Arg(8)->Arg(32);

void BM_EkfUpdate(benchmark::State& state) {
  const EkfConfig cfg = EkfConfig::defaults();
  const EkfBelief base = ekfBeliefWith(static_cast<int>(state.range(0)));
  std::vector<RangeSample> epoch;
  epoch.push_back({0.0, 0, 3.9});
  EkfBelief b = base;
  int step = 0;
  for (auto _ : state) {
    b = ekfUpdate(b, cfg, epoch);
    if (++step % 256 == 0) {
      b = base;
    }
  }
}
BENCHMARK(BM_EkfUpdate)->Arg(1)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
