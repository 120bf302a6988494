#include <cstdint>
#include <exception>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rslam/runner.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

rslam::RunConfig configFor(const std::string& configPath,
                           const std::optional<std::string>& filter,
                           const std::optional<std::uint64_t>& seed) {
  rslam::RunConfig cfg =
      configPath.empty() ? rslam::RunConfig() : rslam::loadRunConfig(configPath);
  if (filter) {
    if (*filter == "eqf") cfg.filter = rslam::FilterKind::Eqf;
    else if (*filter == "ekf") cfg.filter = rslam::FilterKind::Ekf;
    else throw std::runtime_error("unknown filter '" + *filter + "'");
  }
  if (seed) cfg.seed = *seed;
  return cfg;
}

int doSimulate(const std::string& configPath, const std::string& outDir,
               const std::optional<std::uint64_t>& seed) {
  const rslam::RunConfig cfg = configFor(configPath, std::nullopt, seed);
  const rslam::Dataset data = rslam::simulateDataset(cfg);
  rslam::writeDataset(outDir, data);
  std::cout << "wrote " << data.imu.size() << " imu samples, " << data.ranges.size()
            << " ranges, " << data.landmarks.size() << " landmarks to " << outDir << "\n";
  return 0;
}

int doRun(const std::string& configPath, const std::string& datasetDir,
          const std::string& outDir, const std::optional<std::string>& filter,
          const std::optional<std::uint64_t>& seed) {
  const rslam::RunConfig cfg = configFor(configPath, filter, seed);
  const rslam::Dataset data = rslam::loadDataset(datasetDir);
  const rslam::RunResult result = rslam::runFilter(data, cfg);
  const rslam::RunMetrics metrics = rslam::evaluateRun(data, result);
  if (!outDir.empty()) rslam::writeRunReport(outDir, cfg, result, metrics);

  std::cout << "filter: " << (cfg.filter == rslam::FilterKind::Eqf ? "eqf" : "ekf") << "\n";
  if (!result.converged) {
    std::cout << "diverged at t=" << result.failureTime << " s: " << result.failureReason
              << "\n";
    return kExitDiverged;
  }
  std::cout << "landmarks: " << result.landmarks.size() << "\n";
  if (metrics.valid) {
    std::cout << "rmse_whole_m: " << rslam::formatDouble(metrics.rmseWhole) << "\n"
              << "rmse_last40_m: " << rslam::formatDouble(metrics.rmseLast) << "\n"
              << "mapping_mean_m: " << rslam::formatDouble(metrics.mapping.mean) << "\n"
              << "mapping_std_m: " << rslam::formatDouble(metrics.mapping.stddev) << "\n";
  } else {
    std::cout << "metrics unavailable (no truth in dataset)\n";
  }
  return 0;
}

int doCompare(const std::string& pathA, const std::string& pathB) {
  const auto a = rslam::loadKeyValueCsv(pathA);
  const auto b = rslam::loadKeyValueCsv(pathB);
  std::map<std::string, std::string> bmap(b.begin(), b.end());

  std::cout << std::left << std::setw(18) << "key" << std::setw(24) << pathA << pathB << "\n";
  for (const auto& [key, value] : a) {
    const auto it = bmap.find(key);
    std::cout << std::left << std::setw(18) << key << std::setw(24) << value
              << (it == bmap.end() ? std::string("-") : it->second) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"range-only inertial SLAM playground"};
  app.require_subcommand(1);

  std::string configPath, datasetDir, outDir, pathA, pathB;
  std::optional<std::string> filter;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "synthesise a dataset directory");
  sim->add_option("--config", configPath, "run configuration file");
  sim->add_option("--out-dir", outDir, "dataset output directory")->required();
  sim->add_option("--seed", seed, "override the config seed");

  auto* run = app.add_subcommand("run", "replay a dataset through a filter");
  run->add_option("--config", configPath, "run configuration file");
  run->add_option("--dataset-dir", datasetDir, "dataset directory")->required();
  run->add_option("--out-dir", outDir, "report output directory");
  run->add_option("--filter", filter, "eqf or ekf (overrides the config)");
  run->add_option("--seed", seed, "override the config seed");

  auto* cmp = app.add_subcommand("compare", "print two metrics files side by side");
  cmp->add_option("--a", pathA, "first metrics.csv")->required();
  cmp->add_option("--b", pathB, "second metrics.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return doSimulate(configPath, outDir, seed);
    if (run->parsed()) return doRun(configPath, datasetDir, outDir, filter, seed);
    return doCompare(pathA, pathB);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
