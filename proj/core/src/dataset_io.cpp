#include "rslam/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "rslam/eqf.hpp"
#include "rslam/lie/so3.hpp"

namespace rslam {

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> splitFields(std::string_view s) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
      fields.push_back(s);
      return fields;
    }
    fields.push_back(s.substr(0, comma));
    s.remove_prefix(comma + 1);
  }
}

double parseDouble(std::string_view field, const std::string& name, int line) {
  const std::string_view f = trim(field);
  double value = 0.0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size() || f.empty()) {
    fail(name, line, "bad number '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    fail(name, line, "non-finite number '" + std::string(field) + "'");
  }
  return value;
}

long parseLong(std::string_view field, const std::string& name, int line) {
  const std::string_view f = trim(field);
  long value = 0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size() || f.empty()) {
    fail(name, line, "bad integer '" + std::string(field) + "'");
  }
  return value;
}

std::uint64_t parseUnsigned(std::string_view field, const std::string& name, int line) {
  const std::string_view f = trim(field);
  std::uint64_t value = 0;
  const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
  if (res.ec != std::errc() || res.ptr != f.data() + f.size() || f.empty()) {
    fail(name, line, "bad unsigned integer '" + std::string(field) + "'");
  }
  return value;
}

bool parseBool(std::string_view field, const std::string& name, int line) {
  const std::string_view f = trim(field);
  if (f == "1" || f == "true") return true;
  if (f == "0" || f == "false") return false;
  fail(name, line, "bad boolean '" + std::string(field) + "'");
}

// Reads the header plus data rows, dropping a trailing '\r' per line.
class CsvReader {
 public:
  CsvReader(const std::string& path, std::string_view header) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("cannot open " + path);
    std::string first;
    if (!std::getline(in_, first)) fail(path_, 1, "missing header");
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (first != header) {
      fail(path_, 1, "expected header '" + std::string(header) + "', got '" + first + "'");
    }
    line_ = 1;
  }

  bool next(std::vector<std::string_view>& fields, std::size_t expected) {
    if (!std::getline(in_, row_)) return false;
    ++line_;
    if (!row_.empty() && row_.back() == '\r') row_.pop_back();
    if (row_.empty()) fail(path_, line_, "empty row");
    fields = splitFields(row_);
    if (fields.size() != expected) {
      fail(path_, line_, "expected " + std::to_string(expected) + " fields, got " +
                             std::to_string(fields.size()));
    }
    return true;
  }

  const std::string& path() const { return path_; }
  int line() const { return line_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string row_;
  int line_ = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("failed to write " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace

std::string formatDouble(double value) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::vector<ImuSample> loadImuCsv(const std::string& path) {
  CsvReader reader(path, "t,wx,wy,wz,ax,ay,az");
  std::vector<ImuSample> samples;
  std::vector<std::string_view> f;
  while (reader.next(f, 7)) {
    ImuSample s;
    s.t = parseDouble(f[0], path, reader.line());
    for (int k = 0; k < 3; ++k) s.gyro[k] = parseDouble(f[1 + k], path, reader.line());
    for (int k = 0; k < 3; ++k) s.accel[k] = parseDouble(f[4 + k], path, reader.line());
    if (!samples.empty() && s.t <= samples.back().t) {
      fail(path, reader.line(), "non-increasing timestamp");
    }
    samples.push_back(s);
  }
  return samples;
}

void writeImuCsv(const std::string& path, const std::vector<ImuSample>& samples) {
  CsvWriter out(path);
  out.row({"t", "wx", "wy", "wz", "ax", "ay", "az"});
  for (const auto& s : samples) {
    out.row({formatDouble(s.t), formatDouble(s.gyro.x()), formatDouble(s.gyro.y()),
             formatDouble(s.gyro.z()), formatDouble(s.accel.x()), formatDouble(s.accel.y()),
             formatDouble(s.accel.z())});
  }
  out.finish();
}

std::vector<RangeSample> loadRangeCsv(const std::string& path) {
  CsvReader reader(path, "t,landmark_id,range");
  std::vector<RangeSample> samples;
  std::vector<std::string_view> f;
  while (reader.next(f, 3)) {
    RangeSample s;
    s.t = parseDouble(f[0], path, reader.line());
    s.landmarkId = static_cast<int>(parseLong(f[1], path, reader.line()));
    s.range = parseDouble(f[2], path, reader.line());
    if (s.landmarkId < 0) fail(path, reader.line(), "negative landmark id");
    if (s.range <= 0.0) fail(path, reader.line(), "non-positive range");
    if (!samples.empty() && s.t < samples.back().t) {
      fail(path, reader.line(), "decreasing timestamp");
    }
    samples.push_back(s);
  }
  return samples;
}

void writeRangeCsv(const std::string& path, const std::vector<RangeSample>& samples) {
  CsvWriter out(path);
  out.row({"t", "landmark_id", "range"});
  for (const auto& s : samples) {
    out.row({formatDouble(s.t), std::to_string(s.landmarkId), formatDouble(s.range)});
  }
  out.finish();
}

std::vector<TruthSample> loadTruthCsv(const std::string& path) {
  CsvReader reader(path, "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz");
  std::vector<TruthSample> samples;
  std::vector<std::string_view> f;
  while (reader.next(f, 11)) {
    TruthSample s;
    s.t = parseDouble(f[0], path, reader.line());
    Eigen::Vector3d pos, vel;
    for (int k = 0; k < 3; ++k) pos[k] = parseDouble(f[1 + k], path, reader.line());
    Eigen::Vector4d q;
    for (int k = 0; k < 4; ++k) q[k] = parseDouble(f[4 + k], path, reader.line());
    for (int k = 0; k < 3; ++k) vel[k] = parseDouble(f[8 + k], path, reader.line());
    Rot3 rot;
    try {
      rot = Rot3::fromQuaternion(q[0], q[1], q[2], q[3]);
    } catch (const std::invalid_argument& e) {
      fail(path, reader.line(), e.what());
    }
    s.pose = ExtendedPose(rot, vel, pos);
    if (!samples.empty() && s.t <= samples.back().t) {
      fail(path, reader.line(), "non-increasing timestamp");
    }
    samples.push_back(s);
  }
  return samples;
}

void writeTruthCsv(const std::string& path, const std::vector<TruthSample>& samples) {
  CsvWriter out(path);
  out.row({"t", "px", "py", "pz", "qw", "qx", "qy", "qz", "vx", "vy", "vz"});
  for (const auto& s : samples) {
    Eigen::Quaterniond q(s.pose.rotation().matrix());
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const Eigen::Vector3d& p = s.pose.position();
    const Eigen::Vector3d& v = s.pose.velocity();
    out.row({formatDouble(s.t), formatDouble(p.x()), formatDouble(p.y()), formatDouble(p.z()),
             formatDouble(q.w()), formatDouble(q.x()), formatDouble(q.y()), formatDouble(q.z()),
             formatDouble(v.x()), formatDouble(v.y()), formatDouble(v.z())});
  }
  out.finish();
}

std::vector<LandmarkRecord> loadLandmarksCsv(const std::string& path) {
  CsvReader reader(path, "landmark_id,px,py,pz");
  std::vector<LandmarkRecord> landmarks;
  std::set<int> seen;
  std::vector<std::string_view> f;
  while (reader.next(f, 4)) {
    LandmarkRecord r;
    r.id = static_cast<int>(parseLong(f[0], path, reader.line()));
    for (int k = 0; k < 3; ++k) r.position[k] = parseDouble(f[1 + k], path, reader.line());
    if (r.id < 0) fail(path, reader.line(), "negative landmark id");
    if (!seen.insert(r.id).second) {
      fail(path, reader.line(), "duplicate landmark id " + std::to_string(r.id));
    }
    landmarks.push_back(r);
  }
  return landmarks;
}

void writeLandmarksCsv(const std::string& path, const std::vector<LandmarkRecord>& landmarks) {
  CsvWriter out(path);
  out.row({"landmark_id", "px", "py", "pz"});
  for (const auto& r : landmarks) {
    out.row({std::to_string(r.id), formatDouble(r.position.x()), formatDouble(r.position.y()),
             formatDouble(r.position.z())});
  }
  out.finish();
}

Vector9d RunConfig::defaultNavCov0Diag() { return EqfConfig::defaults().navCov0.diagonal(); }

Eigen::Vector3d RunConfig::ekfLmCov0Diag() const {
  if (ekfLmCov0DiagOverride) return *ekfLmCov0DiagOverride;
  return Eigen::Vector3d::Constant(profile == EnvironmentProfile::Aerial ? 50.0 : 10.0);
}

namespace {

Eigen::VectorXd parseList(std::string_view value, int count, const std::string& name, int line) {
  const auto fields = splitFields(value);
  if (static_cast<int>(fields.size()) != count) {
    fail(name, line, "expected " + std::to_string(count) + " comma-separated values");
  }
  Eigen::VectorXd out(count);
  for (int k = 0; k < count; ++k) out[k] = parseDouble(fields[k], name, line);
  return out;
}

[[noreturn]] void badValue(const std::string& name, int line, std::string_view key,
                           std::string_view value) {
  fail(name, line, "bad value '" + std::string(value) + "' for " + std::string(key));
}

}  // namespace

RunConfig parseRunConfig(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::string_view s(raw);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(name, line, "expected key = value");
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    if (key.empty()) fail(name, line, "empty key");
    if (value.empty()) fail(name, line, "empty value for " + std::string(key));
    if (!seen.insert(std::string(key)).second) {
      fail(name, line, "duplicate key " + std::string(key));
    }

    if (key == "filter") {
      if (value == "eqf") cfg.filter = FilterKind::Eqf;
      else if (value == "ekf") cfg.filter = FilterKind::Ekf;
      else badValue(name, line, key, value);
    } else if (key == "seed") {
      cfg.seed = parseUnsigned(value, name, line);
    } else if (key == "landmark_init") {
      if (value == "first_range") cfg.landmarkInit = LandmarkInitKind::FirstRange;
      else if (value == "truth") cfg.landmarkInit = LandmarkInitKind::Truth;
      else badValue(name, line, key, value);
    } else if (key == "profile") {
      if (value == "aerial") cfg.profile = EnvironmentProfile::Aerial;
      else if (value == "ground") cfg.profile = EnvironmentProfile::Ground;
      else badValue(name, line, key, value);
    } else if (key == "reset_transport") {
      cfg.resetTransport = parseBool(value, name, line);
    } else if (key == "gate_enabled") {
      cfg.gateEnabled = parseBool(value, name, line);
    } else if (key == "gate_threshold") {
      cfg.gateThreshold = parseDouble(value, name, line);
    } else if (key == "gravity") {
      cfg.gravity = parseDouble(value, name, line);
    } else if (key == "gyro_noise_density") {
      cfg.gyroNoiseDensity = parseDouble(value, name, line);
    } else if (key == "accel_noise_density") {
      cfg.accelNoiseDensity = parseDouble(value, name, line);
    } else if (key == "range_sigma") {
      cfg.rangeSigma = parseDouble(value, name, line);
    } else if (key == "nav_cov0") {
      cfg.navCov0Diag = parseList(value, 9, name, line);
    } else if (key == "eqf_lm_cov0") {
      cfg.eqfLmCov0Diag = parseList(value, 3, name, line);
    } else if (key == "ekf_lm_cov0") {
      cfg.ekfLmCov0DiagOverride = Eigen::Vector3d(parseList(value, 3, name, line));
    } else if (key == "trajectory") {
      if (value == "circle") cfg.trajectory = TrajectoryKind::Circle;
      else if (value == "lissajous") cfg.trajectory = TrajectoryKind::Lissajous;
      else if (value == "waypoints") cfg.trajectory = TrajectoryKind::WaypointSpline;
      else badValue(name, line, key, value);
    } else if (key == "duration") {
      cfg.duration = parseDouble(value, name, line);
    } else if (key == "speed") {
      cfg.speed = parseDouble(value, name, line);
    } else if (key == "radius") {
      cfg.radius = parseDouble(value, name, line);
    } else if (key == "altitude") {
      cfg.altitude = parseDouble(value, name, line);
    } else if (key == "altitude_amplitude") {
      cfg.altitudeAmplitude = parseDouble(value, name, line);
    } else if (key == "imu_rate") {
      cfg.imuRate = parseDouble(value, name, line);
    } else if (key == "range_rate") {
      cfg.rangeRate = parseDouble(value, name, line);
    } else if (key == "range_schedule") {
      if (value == "all") cfg.rangeSchedule = RangeSchedule::AllPerEpoch;
      else if (value == "round_robin") cfg.rangeSchedule = RangeSchedule::RoundRobin;
      else badValue(name, line, key, value);
    } else if (key == "dropout_gap") {
      cfg.dropoutGap = parseDouble(value, name, line);
    } else if (key == "dropout_period") {
      cfg.dropoutPeriod = parseDouble(value, name, line);
    } else {
      fail(name, line, "unknown key " + std::string(key));
    }
  }

  const auto require = [&](bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(name + ": " + msg);
  };
  require(cfg.gateThreshold > 0.0, "gate_threshold must be positive");
  require(cfg.gravity >= 0.0, "gravity must be non-negative");
  require(cfg.gyroNoiseDensity >= 0.0, "gyro_noise_density must be non-negative");
  require(cfg.accelNoiseDensity >= 0.0, "accel_noise_density must be non-negative");
  require(cfg.rangeSigma > 0.0, "range_sigma must be positive");
  require((cfg.navCov0Diag.array() > 0.0).all(), "nav_cov0 entries must be positive");
  require((cfg.eqfLmCov0Diag.array() > 0.0).all(), "eqf_lm_cov0 entries must be positive");
  require((cfg.ekfLmCov0Diag().array() > 0.0).all(), "ekf_lm_cov0 entries must be positive");
  require(cfg.duration > 0.0, "duration must be positive");
  require(cfg.speed > 0.0, "speed must be positive");
  require(cfg.radius > 0.0, "radius must be positive");
  require(cfg.imuRate > 0.0, "imu_rate must be positive");
  require(cfg.rangeRate > 0.0, "range_rate must be positive");
  require(cfg.dropoutGap >= 0.0, "dropout_gap must be non-negative");
  require(cfg.dropoutPeriod >= 0.0, "dropout_period must be non-negative");
  require(cfg.dropoutPeriod == 0.0 || cfg.dropoutGap < cfg.dropoutPeriod,
          "dropout_gap must be smaller than dropout_period");
  return cfg;
}

RunConfig loadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseRunConfig(buf.str(), path);
}

}  // namespace rslam
