#include "poselab/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <utility>

#include "poselab/error.hpp"
#include "poselab/eval.hpp"

namespace poselab {
namespace {

constexpr std::size_t kMinValidationFrames = 10;

void validate(const GridSpec& spec) {
  if (spec.gamma_values.empty())
    throw Error(ErrorCode::InvalidArgument, "gamma grid is empty");
  for (std::size_t i = 0; i < spec.gamma_values.size(); ++i) {
    const double g = spec.gamma_values[i];
    if (!std::isfinite(g) || g < 0.0)
      throw Error(ErrorCode::InvalidArgument,
                  "gamma candidates must be finite and non-negative");
    if (i > 0 && g <= spec.gamma_values[i - 1])
      throw Error(ErrorCode::InvalidArgument,
                  "gamma candidates must be strictly ascending");
  }
  if (!std::isfinite(spec.val_fraction) || spec.val_fraction <= 0.0 ||
      spec.val_fraction >= 1.0)
    throw Error(ErrorCode::InvalidArgument, "val_fraction must be in (0, 1)");
}

// Runs entirely on the training frames; the caller never passes the test
// split in. Frames are ordered by id (ids are zero padded, so lexicographic
// order is chronological) and the tail becomes the validation split.
GridResult search_on_train(const SceneDataset& base,
                           const std::vector<Frame>& train_frames,
                           const GridSpec& spec) {
  std::vector<const Frame*> ordered;
  ordered.reserve(train_frames.size());
  for (const Frame& f : train_frames) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(),
            [](const Frame* a, const Frame* b) { return a->id < b->id; });

  const auto n = ordered.size();
  const auto n_val = static_cast<std::size_t>(
      std::llround(spec.val_fraction * static_cast<double>(n)));
  if (n_val < kMinValidationFrames || n_val >= n)
    throw Error(ErrorCode::InsufficientData,
                "train split too small for a validation split of at least " +
                    std::to_string(kMinValidationFrames) + " frames");

  SceneDataset fit;
  fit.name = base.name;
  fit.extents = base.extents;
  fit.feature_dim = base.feature_dim;
  SceneDataset val = fit;
  for (std::size_t i = 0; i < n - n_val; ++i) fit.train.push_back(*ordered[i]);
  for (std::size_t i = n - n_val; i < n; ++i) val.test.push_back(*ordered[i]);

  auto run_candidate = [&fit, &val, &spec](double gamma) {
    TrainConfig cfg = spec.base_cfg;
    cfg.weights.gamma = gamma;
    const auto [model, trace] = train(fit, cfg);
    const EvalReport rep = evaluate(model, val, 1, 1);
    GridRow row;
    row.gamma = gamma;
    row.val_median_pos_m = rep.median_pos_m;
    row.val_median_rot_deg = rep.median_rot_deg;
    row.val_median_los_deg = rep.median_los_deg;
    return row;
  };

  std::vector<std::future<GridRow>> pending;
  pending.reserve(spec.gamma_values.size());
  for (double gamma : spec.gamma_values)
    pending.push_back(std::async(std::launch::async, run_candidate, gamma));

  GridResult result;
  result.rows.reserve(pending.size());
  for (auto& f : pending) result.rows.push_back(f.get());
  result.best_gamma = result.rows[select_best(result.rows)].gamma;
  result.selection_rule =
      "argmin val_median_pos_m; ties: smaller val_median_rot_deg, "
      "then smaller gamma";
  return result;
}

}  // namespace

std::vector<double> default_gamma_grid(const Vec3& extents) {
  const double s = std::max({extents.x, extents.y, extents.z});
  if (!std::isfinite(s) || s <= 0.0)
    throw Error(ErrorCode::InvalidArgument,
                "extents must have a positive largest component");
  return {0.0, 0.1 * s, 0.3 * s, 1.0 * s, 3.0 * s};
}

std::size_t select_best(const std::vector<GridRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no grid rows");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const GridRow& cand = rows[i];
    const GridRow& top = rows[best];
    if (cand.val_median_pos_m < top.val_median_pos_m ||
        (cand.val_median_pos_m == top.val_median_pos_m &&
         cand.val_median_rot_deg < top.val_median_rot_deg))
      best = i;
    // Equal on both medians keeps the earlier (smaller gamma) row.
  }
  return best;
}

GridResult grid_search(const SceneDataset& ds, const GridSpec& spec) {
  validate(spec);
  return search_on_train(ds, ds.train, spec);
}

}  // namespace poselab
