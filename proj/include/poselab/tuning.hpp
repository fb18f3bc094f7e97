#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "poselab/data.hpp"
#include "poselab/model.hpp"

namespace poselab {

struct GridSpec {
  std::vector<double> gamma_values;  // ascending, unique, all >= 0
  TrainConfig base_cfg;              // gamma field is overridden per row
  double val_fraction = 0.2;         // carved from the end of the train split
};

struct GridRow {
  double gamma = 0.0;
  double val_median_pos_m = 0.0;
  double val_median_rot_deg = 0.0;
  double val_median_los_deg = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;  // one per gamma, ascending
  double best_gamma = 0.0;
  std::string selection_rule;
};

/// {0, 0.1, 0.3, 1, 3} scaled by the largest extent, so candidate gammas
/// roughly reflect the scale of the scene. Zero is always included, keeping
/// the unaugmented loss in the running.
std::vector<double> default_gamma_grid(const Vec3& extents);

/// Index of the winning row: smallest validation median position error,
/// ties broken by smaller rotation median, then smaller gamma (rows are
/// ascending in gamma, so the first strict winner stands).
std::size_t select_best(const std::vector<GridRow>& rows);

/// Trains one model per gamma (identical seeds and config otherwise) on the
/// leading part of the training split and scores each on a validation split
/// carved from its tail, ordered by frame id. The test split is never read:
/// only the train frames are handed to the internal search. Candidate
/// trainings run concurrently. Raises InsufficientData when fewer than 10
/// validation frames would be available.
GridResult grid_search(const SceneDataset& ds, const GridSpec& spec);

}  // namespace poselab
