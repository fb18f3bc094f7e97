#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace poselab {

/// Central finite difference of a scalar function at x:
/// component i = (f(x + h*e_i) - f(x - h*e_i)) / (2h).
/// Raises NonFiniteEvaluation if any probe returns a non-finite value.
std::vector<double> central_difference(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h);

struct GradCheckFailure {
  std::size_t sample = 0;
  std::string descriptor;           // the sampled inputs, human-readable
  std::vector<double> analytic;
  std::vector<double> numeric;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::size_t n_points = 0;
  double max_rel_error = 0.0;
  std::vector<GradCheckFailure> failures;  // sorted by sample index
};

/// Samples n random (pred, gt, alpha, beta, gamma) tuples away from the norm
/// singularities and compares the analytic pose gradient against central
/// differences (h = 1e-6). Relative error per sample is
/// ||a - n|| / max(||a||, ||n||, 1e-8) over the stacked 7-vector.
/// Deterministic given seed.
GradCheckReport check_loss_gradients(std::size_t n_samples, std::uint64_t seed,
                                     double tol);

}  // namespace poselab
