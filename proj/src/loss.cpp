#include "poselab/loss.hpp"

#include <cmath>
#include <string>

#include "poselab/error.hpp"

namespace poselab {

void validate(const LossWeights& w) {
  if (w.heads.empty()) {
    raise(ErrorCode::InvalidArgument, "loss weights need at least one head");
  }
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  for (const HeadWeights& h : w.heads) {
    if (!ok(h.alpha) || !ok(h.beta)) {
      raise(ErrorCode::InvalidArgument,
            "head weights must be finite and non-negative");
    }
  }
  if (!ok(w.gamma)) {
    raise(ErrorCode::InvalidArgument, "gamma must be finite and non-negative");
  }
}

LossBreakdown default_loss(const Pose& pred, const Pose& gt, double alpha,
                           double beta) {
  LossBreakdown b;
  b.position_term = alpha * norm(pred.position - gt.position);
  b.rotation_term = beta * norm(pred.rotation - gt.rotation);
  b.los_term = 0.0;
  b.total = b.position_term + b.rotation_term;
  return b;
}

double line_of_sight_term(const Pose& pred, const Pose& gt) {
  return 1.0 - line_of_sight_cos(gt, pred.position);
}

LossBreakdown proposed_loss(const Pose& pred, const Pose& gt, double alpha,
                            double beta, double gamma) {
  LossBreakdown b = default_loss(pred, gt, alpha, beta);
  if (gamma != 0.0) {
    b.los_term = gamma * line_of_sight_term(pred, gt);
  }
  b.total = b.position_term + b.rotation_term + b.los_term;
  return b;
}

LossBreakdown multi_head_loss(const std::vector<Pose>& preds, const Pose& gt,
                              const LossWeights& w) {
  if (preds.size() != w.heads.size()) {
    raise(ErrorCode::HeadCountMismatch,
          std::to_string(preds.size()) + " predictions for " +
              std::to_string(w.heads.size()) + " heads");
  }
  // Accumulate the three terms separately and derive the total once, so the
  // breakdown identity total == sum of terms holds exactly.
  LossBreakdown b;
  for (size_t i = 0; i < preds.size(); ++i) {
    const LossBreakdown h = proposed_loss(preds[i], gt, w.heads[i].alpha,
                                          w.heads[i].beta, w.gamma);
    b.position_term += h.position_term;
    b.rotation_term += h.rotation_term;
    b.los_term += h.los_term;
  }
  b.total = b.position_term + b.rotation_term + b.los_term;
  return b;
}

namespace {

// Shared by the strict and subgradient entry points; `strict` decides
// whether a kinked norm term raises or contributes zero.
PoseGradient gradient_impl(const Pose& pred, const Pose& gt, double alpha,
                           double beta, double gamma, bool strict) {
  PoseGradient g;

  const Vec3 dp = pred.position - gt.position;
  const double dp_norm = norm(dp);
  if (alpha != 0.0) {
    if (dp_norm > kEpsDelta) {
      g.d_position = g.d_position + dp * (alpha / dp_norm);
    } else if (strict) {
      raise(ErrorCode::NonDifferentiablePoint,
            "position term is at its kink (prediction meets ground truth)");
    }
  }

  const Quaternion dq = pred.rotation - gt.rotation;
  const double dq_norm = norm(dq);
  if (beta != 0.0) {
    if (dq_norm > kEpsDelta) {
      const double s = beta / dq_norm;
      g.d_rotation = {s * dq.w, s * dq.x, s * dq.y, s * dq.z};
    } else if (strict) {
      raise(ErrorCode::NonDifferentiablePoint,
            "rotation term is at its kink (prediction meets ground truth)");
    }
  }

  if (gamma != 0.0) {
    // term = gamma * (1 - u.delta / ||delta||) with delta = p - p_hat and u
    // the unit viewing direction; d(delta)/d(p_hat) = -I flips the sign.
    const Vec3 delta = gt.position - pred.position;
    const double dn = norm(delta);
    if (dn > kEpsDelta) {
      const Vec3 u = viewing_direction(gt.rotation);
      const double ud = dot(u, delta);
      const Vec3 dcos = u * (1.0 / dn) - delta * (ud / (dn * dn * dn));
      g.d_position = g.d_position + dcos * gamma;
    } else if (strict) {
      raise(ErrorCode::NonDifferentiablePoint,
            "line-of-sight term is degenerate (zero offset)");
    }
  }

  return g;
}

}  // namespace

PoseGradient loss_gradient(const Pose& pred, const Pose& gt, double alpha,
                           double beta, double gamma) {
  return gradient_impl(pred, gt, alpha, beta, gamma, /*strict=*/true);
}

PoseGradient loss_subgradient(const Pose& pred, const Pose& gt, double alpha,
                              double beta, double gamma) {
  return gradient_impl(pred, gt, alpha, beta, gamma, /*strict=*/false);
}

}  // namespace poselab
