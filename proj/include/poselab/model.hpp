#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "poselab/data.hpp"
#include "poselab/geom.hpp"
#include "poselab/loss.hpp"

namespace poselab {

/// Offsets of one dense layer inside the flat parameter vector. Weights are
/// row-major (out x in), followed by the bias.
struct DenseShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t w_offset = 0;
  std::size_t b_offset = 0;
};

/// Multi-head pose regressor: a two-layer ReLU trunk (input -> H -> H)
/// shared by `head_count` affine output layers, each emitting 7 values
/// (3 position + 4 quaternion). Auxiliary heads tap the trunk early — head i
/// reads the activation after trunk layer min(i+1, 2), the final head always
/// reads the trunk output — mirroring auxiliary-classifier architectures.
///
/// All parameters live in one flat vector ordered trunk layers then heads,
/// each layer as row-major weights then bias; this is also the
/// serialization order.
struct RegressorModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t head_count = 0;
  std::uint64_t seed = 0;
  std::vector<double> params;
  std::vector<DenseShape> trunk;  // always 2 layers
  std::vector<DenseShape> heads;  // head_count layers
  std::vector<std::size_t> head_tap;  // trunk depth each head reads (1 or 2)
};

struct TrainConfig {
  std::size_t iterations = 5000;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  LossWeights weights;
  std::uint64_t seed = 0;
  std::size_t hidden_dim = 64;
};

struct TraceRow {
  std::size_t iteration = 0;
  double total = 0.0;
  double position_term = 0.0;
  double rotation_term = 0.0;
  double los_term = 0.0;
};

using TrainTrace = std::vector<TraceRow>;

/// Fresh model with weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero trunk
/// biases, and each head's bias set to position (0,0,0), quaternion
/// (1,0,0,0) so untrained predictions are valid rotations. Deterministic
/// given seed.
RegressorModel init_model(std::size_t input_dim, std::size_t hidden,
                          std::size_t heads, std::uint64_t seed);

/// One raw pose per head; rotations left unnormalized.
std::vector<Pose> forward(const RegressorModel& m,
                          const std::vector<double>& features);

/// Final head's output with the rotation normalized to unit: the
/// evaluation-time prediction.
Pose predict(const RegressorModel& m, const std::vector<double>& features);

/// Mean multi_head_loss over the batch, plus its gradient with respect to
/// every model parameter (accumulated into `grad`, which is resized and
/// zeroed). Uses the zero subgradient at norm kinks. Exposed so tests can
/// finite-difference the full backward pass.
LossBreakdown batch_gradient(const RegressorModel& m,
                             const std::vector<const Frame*>& batch,
                             const LossWeights& w, std::vector<double>& grad);

/// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on multi_head_loss.
/// Batches are drawn with replacement from a generator seeded independently
/// of the weight init; batch_size >= train size switches to full-batch
/// in-order descent. The trace records the batch loss before each logged
/// update, always including the first and last iterations.
std::pair<RegressorModel, TrainTrace> train(const SceneDataset& ds,
                                            const TrainConfig& cfg);

}  // namespace poselab
