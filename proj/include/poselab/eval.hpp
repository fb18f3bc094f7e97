#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "poselab/data.hpp"
#include "poselab/model.hpp"

namespace poselab {

struct HistogramBin {
  double upper_edge = 0.0;
  double cumulative_fraction = 0.0;
};

struct EvalReport {
  std::string scene;
  std::size_t n_frames = 0;
  double median_pos_m = 0.0;
  double median_rot_deg = 0.0;
  double median_los_deg = 0.0;
  std::vector<HistogramBin> pos_histogram;  // edges in metres
  std::vector<HistogramBin> rot_histogram;  // edges in degrees
};

/// Lower median: the element at index (n-1)/2 of the sorted list, so the
/// result is always an observed value. Raises EmptyInput.
double median(std::vector<double> xs);

/// Cumulative histogram with `bins` uniform upper edges from 0 to the
/// maximum observed error (1.0 when every error is zero). The last edge is
/// pinned to the maximum exactly, making the final fraction exactly 1.
std::vector<HistogramBin> cumulative_histogram(std::vector<double> errors,
                                               std::size_t bins);

/// Per-frame positional error ||p_hat - p|| (metres), rotational error
/// between the normalized prediction and the ground truth (degrees), and
/// line-of-sight angle arccos(line_of_sight_cos) (degrees), evaluated on the
/// test split. Raises EmptyTestSet.
EvalReport evaluate(const RegressorModel& m, const SceneDataset& ds,
                    std::size_t bins_pos, std::size_t bins_rot);

struct MedianDelta {
  double a = 0.0;
  double b = 0.0;
  double abs_delta = 0.0;  // b - a: negative means b improved on a
  double pct_delta = 0.0;  // (b - a) / a * 100, unrounded; NaN when a = 0, b != 0
};

struct ReportComparison {
  std::string scene;
  std::size_t n_frames = 0;
  MedianDelta pos;
  MedianDelta rot;
  MedianDelta los;
};

/// Raises SceneMismatch unless both reports cover the same scene and frame
/// count. Percentage deltas are computed from unrounded medians; display
/// layers round to one decimal.
ReportComparison compare_reports(const EvalReport& a, const EvalReport& b);

/// Half-up rounding to one decimal, for human-facing percentage display.
double round1(double v);

}  // namespace poselab
