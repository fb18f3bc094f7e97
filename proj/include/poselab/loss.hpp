#pragma once

#include <array>
#include <vector>

#include "poselab/geom.hpp"

namespace poselab {

/// Per-head weighting of the positional and rotational error norms.
struct HeadWeights {
  double alpha = 1.0;
  double beta = 1.0;
};

/// All loss hyperparameters in one place: one (alpha, beta) pair per
/// regressor head plus the shared line-of-sight weight gamma.
struct LossWeights {
  std::vector<HeadWeights> heads{HeadWeights{}};
  double gamma = 0.0;
};

/// Raises InvalidArgument unless there is at least one head and every weight
/// is finite and non-negative.
void validate(const LossWeights& w);

/// Diagnostic decomposition of a loss value. total is always the exact sum
/// of the three terms.
struct LossBreakdown {
  double position_term = 0.0;
  double rotation_term = 0.0;
  double los_term = 0.0;
  double total = 0.0;
};

/// Gradient of a loss with respect to a predicted pose. d_rotation is taken
/// with respect to the raw, unnormalized quaternion components (w, x, y, z).
struct PoseGradient {
  Vec3 d_position;
  std::array<double, 4> d_rotation{0.0, 0.0, 0.0, 0.0};
};

/// alpha*||p_pred - p_gt|| + beta*||q_pred - q_gt||. The predicted rotation
/// enters as-is; it is not normalized during training.
LossBreakdown default_loss(const Pose& pred, const Pose& gt, double alpha,
                           double beta);

/// 1 - cos(theta) where theta is the angle between the ground-truth viewing
/// direction and the offset from predicted to true position. In [0, 2]; zero
/// when the offset is parallel to the viewing direction or degenerate.
double line_of_sight_term(const Pose& pred, const Pose& gt);

/// default_loss plus gamma * line_of_sight_term. gamma = 0 reduces exactly
/// to default_loss.
LossBreakdown proposed_loss(const Pose& pred, const Pose& gt, double alpha,
                            double beta, double gamma);

/// Sum of proposed_loss over one prediction per head, with that head's
/// (alpha, beta) and the shared gamma. Raises HeadCountMismatch when the
/// prediction count differs from the head count.
LossBreakdown multi_head_loss(const std::vector<Pose>& preds, const Pose& gt,
                              const LossWeights& w);

/// Exact gradient of proposed_loss(...).total with respect to the predicted
/// position and raw quaternion. Raises NonDifferentiablePoint when an active
/// norm term sits at its kink (offset within kEpsDelta of zero), signalling
/// callers to substitute a zero subgradient for that term.
PoseGradient loss_gradient(const Pose& pred, const Pose& gt, double alpha,
                           double beta, double gamma);

/// Like loss_gradient, but kinked terms contribute a zero subgradient
/// instead of raising. This is the training-time path.
PoseGradient loss_subgradient(const Pose& pred, const Pose& gt, double alpha,
                              double beta, double gamma);

}  // namespace poselab
