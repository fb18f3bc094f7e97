#include "poselab/gradcheck.hpp"

#include <cmath>
#include <cstdio>

#include "poselab/error.hpp"
#include "poselab/geom.hpp"
#include "poselab/loss.hpp"
#include "poselab/rng.hpp"

namespace poselab {

std::vector<double> central_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h) {
  if (!(h > 0.0)) {
    raise(ErrorCode::InvalidArgument, "central_difference needs h > 0");
  }
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double hi = f(x);
    x[i] = xi - h;
    const double lo = f(x);
    x[i] = xi;
    if (!std::isfinite(hi) || !std::isfinite(lo)) {
      raise(ErrorCode::NonFiniteEvaluation,
            "function returned a non-finite value near the probe point");
    }
    g[i] = (hi - lo) / (2.0 * h);
  }
  return g;
}

namespace {

constexpr double kProbeStep = 1e-6;
constexpr double kSingularityMargin = 1e-3;  // keeps differences conditioned
constexpr double kRelFloor = 1e-8;

struct Sample {
  Pose pred, gt;
  double alpha, beta, gamma;
};

Sample draw_sample(Rng& rng) {
  for (;;) {
    Sample s;
    s.gt.position = {rng.uniform(-5, 5), rng.uniform(-5, 5),
                     rng.uniform(-5, 5)};
    s.pred.position = {rng.uniform(-5, 5), rng.uniform(-5, 5),
                       rng.uniform(-5, 5)};
    s.gt.rotation = normalize(
        Quaternion{rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    s.pred.rotation = {rng.uniform(-1, 1), rng.uniform(-1, 1),
                       rng.uniform(-1, 1), rng.uniform(-1, 1)};
    s.alpha = rng.uniform(0.1, 2.0);
    s.beta = rng.uniform(1.0, 300.0);
    s.gamma = rng.uniform() < 0.25 ? 0.0 : rng.uniform(0.1, 5.0);
    if (norm(s.pred.position - s.gt.position) < kSingularityMargin) continue;
    if (norm(s.pred.rotation - s.gt.rotation) < kSingularityMargin) continue;
    return s;
  }
}

std::string describe(std::size_t idx, const Sample& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "sample %zu: alpha=%.6g beta=%.6g gamma=%.6g "
                "pred_p=(%.6g,%.6g,%.6g) gt_p=(%.6g,%.6g,%.6g)",
                idx, s.alpha, s.beta, s.gamma, s.pred.position.x,
                s.pred.position.y, s.pred.position.z, s.gt.position.x,
                s.gt.position.y, s.gt.position.z);
  return buf;
}

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

GradCheckReport check_loss_gradients(std::size_t n_samples, std::uint64_t seed,
                                     double tol) {
  if (n_samples < 1) {
    raise(ErrorCode::InvalidArgument, "need at least one sample");
  }
  Rng rng(seed);
  GradCheckReport report;
  report.n_points = n_samples;

  for (std::size_t i = 0; i < n_samples; ++i) {
    const Sample s = draw_sample(rng);

    const PoseGradient a = loss_gradient(s.pred, s.gt, s.alpha, s.beta,
                                         s.gamma);
    const std::vector<double> analytic = {
        a.d_position.x,  a.d_position.y,  a.d_position.z,  a.d_rotation[0],
        a.d_rotation[1], a.d_rotation[2], a.d_rotation[3]};

    auto f = [&s](const std::vector<double>& x) {
      Pose p;
      p.position = {x[0], x[1], x[2]};
      p.rotation = {x[3], x[4], x[5], x[6]};
      return proposed_loss(p, s.gt, s.alpha, s.beta, s.gamma).total;
    };
    const std::vector<double> x0 = {
        s.pred.position.x, s.pred.position.y, s.pred.position.z,
        s.pred.rotation.w, s.pred.rotation.x, s.pred.rotation.y,
        s.pred.rotation.z};
    const std::vector<double> numeric = central_difference(f, x0, kProbeStep);

    std::vector<double> diff(7);
    for (int k = 0; k < 7; ++k) diff[k] = analytic[k] - numeric[k];
    const double rel = vec_norm(diff) / std::max({vec_norm(analytic),
                                                  vec_norm(numeric),
                                                  kRelFloor});
    if (rel > report.max_rel_error) report.max_rel_error = rel;
    if (rel > tol) {
      report.failures.push_back(
          {i, describe(i, s), analytic, numeric, rel});
    }
  }
  return report;
}

}  // namespace poselab
