#include "poselab/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "poselab/error.hpp"
#include "poselab/rng.hpp"

namespace poselab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Rank test via Gram-Schmidt on the offsets from the first landmark: the set
// is non-coplanar iff those offsets span all of R^3.
bool spans_3d(const std::vector<Vec3>& pts) {
  std::vector<Vec3> basis;
  for (std::size_t i = 1; i < pts.size() && basis.size() < 3; ++i) {
    Vec3 v = pts[i] - pts[0];
    for (const Vec3& b : basis) v = v - b * dot(b, v);
    const double n = norm(v);
    if (n > 1e-9) basis.push_back(v * (1.0 / n));
  }
  return basis.size() == 3;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
      raise(ErrorCode::MalformedFile, "non-numeric token '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

void validate(const LandmarkSet& ls) {
  if (ls.positions.size() < 4) {
    raise(ErrorCode::InvalidArgument, "need at least 4 landmarks");
  }
  if (!spans_3d(ls.positions)) {
    raise(ErrorCode::InvalidArgument, "landmarks are coplanar");
  }
}

Quaternion look_at_rotation(const Vec3& eye, const Vec3& target) {
  const Vec3 offset = target - eye;
  const double d = norm(offset);
  if (d <= 1e-9) return {};
  const Vec3 f = offset * (1.0 / d);

  Vec3 up{0, 1, 0};
  if (std::abs(dot(f, up)) > 0.999) up = {1, 0, 0};

  // Columns [x y f] with x = up x f normalized and y = f x x give a proper
  // rotation whose third column (the viewing direction) is f.
  const Vec3 x = normalize(cross(up, f));
  const Vec3 y = cross(f, x);
  Mat3 r;
  r(0, 0) = x.x; r(0, 1) = y.x; r(0, 2) = f.x;
  r(1, 0) = x.y; r(1, 1) = y.y; r(1, 2) = f.y;
  r(2, 0) = x.z; r(2, 1) = y.z; r(2, 2) = f.z;
  return rotmat_to_quat(r);
}

std::vector<double> bearing_features(const Pose& pose, const LandmarkSet& ls) {
  const Mat3 r = quat_to_rotmat(pose.rotation);
  std::vector<double> out;
  out.reserve(3 * ls.positions.size());
  for (const Vec3& lm : ls.positions) {
    Vec3 w = lm - pose.position;
    const double n = norm(w);
    if (n > 1e-12) w = w * (1.0 / n);
    // camera frame: R^T w (world-to-camera rotation)
    out.push_back(r(0, 0) * w.x + r(1, 0) * w.y + r(2, 0) * w.z);
    out.push_back(r(0, 1) * w.x + r(1, 1) * w.y + r(2, 1) * w.z);
    out.push_back(r(0, 2) * w.x + r(1, 2) * w.y + r(2, 2) * w.z);
  }
  return out;
}

SceneDataset synth_scene(const Vec3& extents, std::size_t n_train,
                         std::size_t n_test, std::size_t n_landmarks,
                         double noise_sigma, std::uint64_t seed) {
  if (n_train < 1 || n_test < 1) {
    raise(ErrorCode::InvalidArgument, "need at least one frame per split");
  }
  if (!(extents.x > 0 && extents.y > 0 && extents.z > 0)) {
    raise(ErrorCode::InvalidArgument, "extents must be positive");
  }
  if (n_landmarks < 4) {
    raise(ErrorCode::InvalidArgument,
          "need at least 4 landmarks for well-posed features");
  }
  if (!(noise_sigma >= 0.0)) {
    raise(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
  }

  Rng rng(seed);
  const Vec3 half = extents * 0.5;

  LandmarkSet landmarks;
  do {
    landmarks.positions.clear();
    for (std::size_t i = 0; i < n_landmarks; ++i) {
      landmarks.positions.push_back({rng.uniform(-half.x, half.x),
                                     rng.uniform(-half.y, half.y),
                                     rng.uniform(-half.z, half.z)});
    }
  } while (!spans_3d(landmarks.positions));

  // One sinusoid per axis for the camera path, another for the look-at
  // target; low frequencies keep consecutive frames strongly correlated so
  // the leading/trailing split behaves like distinct recorded sequences.
  double freq[6], phase[6];
  for (int i = 0; i < 6; ++i) freq[i] = rng.uniform(0.5, 2.0);
  for (int i = 0; i < 6; ++i) phase[i] = rng.uniform(0.0, 1.0);

  const std::size_t n_total = n_train + n_test;
  SceneDataset ds;
  {
    char buf[128];
    std::snprintf(buf, sizeof buf, "synth-%gx%gx%g-s%llu", extents.x,
                  extents.y, extents.z,
                  static_cast<unsigned long long>(seed));
    ds.name = buf;
  }
  ds.extents = extents;
  ds.feature_dim = 3 * n_landmarks;

  for (std::size_t k = 0; k < n_total; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_total);
    auto wave = [&](int i, double amp_scale, double axis_half) {
      return amp_scale * axis_half *
             std::sin(2.0 * kPi * (freq[i] * t + phase[i]));
    };
    Frame fr;
    fr.pose.position = {wave(0, 0.9, half.x), wave(1, 0.9, half.y),
                        wave(2, 0.9, half.z)};
    const Vec3 target{wave(3, 0.8, half.x), wave(4, 0.8, half.y),
                      wave(5, 0.8, half.z)};
    fr.pose.rotation = look_at_rotation(fr.pose.position, target);

    fr.features = bearing_features(fr.pose, landmarks);
    for (double& v : fr.features) v += noise_sigma * rng.normal();

    const bool is_train = k < n_train;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s/%06zu", is_train ? "train" : "test", k);
    fr.id = buf;
    (is_train ? ds.train : ds.test).push_back(std::move(fr));
  }
  return ds;
}

Pose parse_matrix_pose_file(const std::string& text) {
  const std::vector<double> v = parse_reals(text);
  if (v.size() != 16) {
    raise(ErrorCode::MalformedFile,
          "expected 16 matrix entries, got " + std::to_string(v.size()));
  }
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = v[static_cast<size_t>(i) * 4 + j];
  }
  Pose p;
  p.position = {v[3], v[7], v[11]};
  p.rotation = rotmat_to_quat(r);
  return p;
}

std::vector<std::pair<std::string, Pose>> parse_pose_line_file(
    const std::string& text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  if (lines.size() < 3) {
    raise(ErrorCode::MalformedFile, "missing 3-line header");
  }

  std::vector<std::pair<std::string, Pose>> out;
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;  // 1-based, including the header
    std::istringstream in(lines[i]);
    std::vector<std::string> fields;
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    if (fields.empty()) continue;  // blank line
    if (fields.size() != 8) {
      raise(ErrorCode::MalformedFile,
            "line " + std::to_string(line_no) + ": expected 8 fields, got " +
                std::to_string(fields.size()));
    }
    double v[7];
    for (int k = 0; k < 7; ++k) {
      const std::string& f = fields[static_cast<size_t>(k) + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[k]);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        raise(ErrorCode::MalformedFile,
              "line " + std::to_string(line_no) + ": non-numeric field '" +
                  f + "'");
      }
    }
    Quaternion q{v[3], v[4], v[5], v[6]};
    const double qn = norm(q);
    if (qn < 0.9 || qn > 1.1) {
      raise(ErrorCode::BadQuaternion,
            "line " + std::to_string(line_no) + ": quaternion norm " +
                std::to_string(qn) + " outside [0.9, 1.1]");
    }
    Pose p;
    p.position = {v[0], v[1], v[2]};
    p.rotation = normalize(q);
    out.emplace_back(fields[0], p);
  }
  return out;
}

std::string write_pose_line_file(
    const std::vector<std::pair<std::string, Pose>>& entries) {
  std::string out =
      "pose lines\n"
      "format: path x y z qw qx qy qz\n"
      "\n";
  char buf[256];
  for (const auto& [id, p] : entries) {
    std::snprintf(buf, sizeof buf,
                  "%s %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", id.c_str(),
                  p.position.x, p.position.y, p.position.z, p.rotation.w,
                  p.rotation.x, p.rotation.y, p.rotation.z);
    out += buf;
  }
  return out;
}

SplitStats split_stats(const SceneDataset& ds) {
  SplitStats s;
  s.n_train = ds.train.size();
  s.n_test = ds.test.size();

  bool first = true;
  Vec3 lo, hi;
  auto take = [&](const Frame& f) {
    const Vec3& p = f.pose.position;
    if (first) {
      lo = hi = p;
      first = false;
      return;
    }
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  };
  for (const Frame& f : ds.train) take(f);
  for (const Frame& f : ds.test) take(f);
  if (!first) s.extents = hi - lo;
  return s;
}

}  // namespace poselab
