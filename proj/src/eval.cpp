#include "poselab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poselab/error.hpp"

namespace poselab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double median(std::vector<double> xs) {
  if (xs.empty()) {
    raise(ErrorCode::EmptyInput, "median of an empty list");
  }
  const std::size_t k = (xs.size() - 1) / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k),
                   xs.end());
  return xs[k];
}

std::vector<HistogramBin> cumulative_histogram(std::vector<double> errors,
                                               std::size_t bins) {
  if (errors.empty()) {
    raise(ErrorCode::EmptyInput, "histogram of an empty list");
  }
  if (bins < 1) {
    raise(ErrorCode::InvalidArgument, "need at least one histogram bin");
  }
  std::sort(errors.begin(), errors.end());
  double hi = errors.back();
  if (!(hi > 0.0)) hi = 1.0;  // all-zero errors still get a proper axis

  std::vector<HistogramBin> out(bins);
  const double n = static_cast<double>(errors.size());
  for (std::size_t k = 0; k < bins; ++k) {
    // The last edge is the maximum itself, not a rounded quotient, so the
    // final cumulative fraction is exactly 1.
    const double edge =
        k + 1 == bins ? hi
                      : hi * static_cast<double>(k + 1) /
                            static_cast<double>(bins);
    const auto it = std::upper_bound(errors.begin(), errors.end(), edge);
    out[k] = {edge,
              static_cast<double>(it - errors.begin()) / n};
  }
  return out;
}

EvalReport evaluate(const RegressorModel& m, const SceneDataset& ds,
                    std::size_t bins_pos, std::size_t bins_rot) {
  if (ds.test.empty()) {
    raise(ErrorCode::EmptyTestSet, "dataset has no test frames");
  }
  std::vector<double> pos_err, rot_err, los_deg;
  pos_err.reserve(ds.test.size());
  rot_err.reserve(ds.test.size());
  los_deg.reserve(ds.test.size());

  for (const Frame& f : ds.test) {
    const Pose pred = predict(m, f.features);
    pos_err.push_back(norm(pred.position - f.pose.position));
    rot_err.push_back(angular_distance_deg(pred.rotation, f.pose.rotation));
    los_deg.push_back(std::acos(line_of_sight_cos(f.pose, pred.position)) *
                      180.0 / kPi);
  }

  EvalReport r;
  r.scene = ds.name;
  r.n_frames = ds.test.size();
  r.median_pos_m = median(pos_err);
  r.median_rot_deg = median(rot_err);
  r.median_los_deg = median(los_deg);
  r.pos_histogram = cumulative_histogram(pos_err, bins_pos);
  r.rot_histogram = cumulative_histogram(rot_err, bins_rot);
  return r;
}

namespace {

MedianDelta delta_of(double a, double b) {
  MedianDelta d;
  d.a = a;
  d.b = b;
  d.abs_delta = b - a;
  if (a != 0.0) {
    d.pct_delta = (b - a) / a * 100.0;
  } else {
    d.pct_delta = b == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return d;
}

}  // namespace

ReportComparison compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.scene != b.scene || a.n_frames != b.n_frames) {
    raise(ErrorCode::SceneMismatch,
          "reports cover '" + a.scene + "' (" + std::to_string(a.n_frames) +
              " frames) vs '" + b.scene + "' (" + std::to_string(b.n_frames) +
              " frames)");
  }
  ReportComparison c;
  c.scene = a.scene;
  c.n_frames = a.n_frames;
  c.pos = delta_of(a.median_pos_m, b.median_pos_m);
  c.rot = delta_of(a.median_rot_deg, b.median_rot_deg);
  c.los = delta_of(a.median_los_deg, b.median_los_deg);
  return c;
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace poselab
