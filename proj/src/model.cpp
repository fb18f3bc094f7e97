#include "poselab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poselab/error.hpp"
#include "poselab/rng.hpp"

namespace poselab {

namespace {

constexpr std::size_t kTrunkDepth = 2;
constexpr std::size_t kOutDim = 7;

// y = W x + b for one dense layer inside the flat parameter vector.
void affine(const std::vector<double>& params, const DenseShape& L,
            const double* x, double* y) {
  for (std::size_t r = 0; r < L.out; ++r) {
    double acc = params[L.b_offset + r];
    const double* w = &params[L.w_offset + r * L.in];
    for (std::size_t c = 0; c < L.in; ++c) acc += w[c] * x[c];
    y[r] = acc;
  }
}

struct Activations {
  // Trunk activations after ReLU, one vector per depth (index 0 = after the
  // first layer). Pre-activation sign is recoverable from these because
  // ReLU zeroes exactly the non-positive entries.
  std::vector<std::vector<double>> trunk;
  std::vector<std::vector<double>> head_out;  // raw 7-vectors
};

void forward_acts(const RegressorModel& m, const std::vector<double>& x,
                  Activations& acts) {
  if (x.size() != m.input_dim) {
    raise(ErrorCode::DimensionMismatch,
          "feature length " + std::to_string(x.size()) +
              " does not match model input " + std::to_string(m.input_dim));
  }
  acts.trunk.assign(kTrunkDepth, std::vector<double>(m.hidden_dim));
  const double* in = x.data();
  for (std::size_t d = 0; d < kTrunkDepth; ++d) {
    affine(m.params, m.trunk[d], in, acts.trunk[d].data());
    for (double& v : acts.trunk[d]) v = v > 0.0 ? v : 0.0;  // ReLU
    in = acts.trunk[d].data();
  }
  acts.head_out.assign(m.heads.size(), std::vector<double>(kOutDim));
  for (std::size_t h = 0; h < m.heads.size(); ++h) {
    const std::vector<double>& tap = acts.trunk[m.head_tap[h] - 1];
    affine(m.params, m.heads[h], tap.data(), acts.head_out[h].data());
  }
}

Pose pose_of(const std::vector<double>& out7) {
  Pose p;
  p.position = {out7[0], out7[1], out7[2]};
  p.rotation = {out7[3], out7[4], out7[5], out7[6]};
  return p;
}

}  // namespace

RegressorModel init_model(std::size_t input_dim, std::size_t hidden,
                          std::size_t heads, std::uint64_t seed) {
  if (input_dim < 1 || hidden < 1 || heads < 1) {
    raise(ErrorCode::InvalidArgument, "model dimensions must be >= 1");
  }
  RegressorModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden;
  m.head_count = heads;
  m.seed = seed;

  std::size_t offset = 0;
  auto add_layer = [&](std::size_t in, std::size_t out) {
    DenseShape L{in, out, offset, offset + in * out};
    offset += in * out + out;
    return L;
  };
  m.trunk.push_back(add_layer(input_dim, hidden));
  m.trunk.push_back(add_layer(hidden, hidden));
  for (std::size_t h = 0; h < heads; ++h) {
    m.heads.push_back(add_layer(hidden, kOutDim));
    m.head_tap.push_back(h + 1 < heads ? std::min(h + 1, kTrunkDepth)
                                       : kTrunkDepth);
  }
  m.params.assign(offset, 0.0);

  Rng rng(seed);
  auto fill_weights = [&](const DenseShape& L) {
    const double s = 1.0 / std::sqrt(static_cast<double>(L.in));
    for (std::size_t i = 0; i < L.in * L.out; ++i) {
      m.params[L.w_offset + i] = rng.uniform(-s, s);
    }
  };
  for (const DenseShape& L : m.trunk) fill_weights(L);  // biases stay zero
  for (const DenseShape& L : m.heads) {
    fill_weights(L);
    m.params[L.b_offset + 3] = 1.0;  // quaternion w: identity rotation
  }
  return m;
}

std::vector<Pose> forward(const RegressorModel& m,
                          const std::vector<double>& features) {
  Activations acts;
  forward_acts(m, features, acts);
  std::vector<Pose> out;
  out.reserve(m.heads.size());
  for (const std::vector<double>& o : acts.head_out) out.push_back(pose_of(o));
  return out;
}

Pose predict(const RegressorModel& m, const std::vector<double>& features) {
  Activations acts;
  forward_acts(m, features, acts);
  Pose p = pose_of(acts.head_out.back());
  p.rotation = normalize(p.rotation);
  return p;
}

LossBreakdown batch_gradient(const RegressorModel& m,
                             const std::vector<const Frame*>& batch,
                             const LossWeights& w, std::vector<double>& grad) {
  if (batch.empty()) {
    raise(ErrorCode::EmptyInput, "batch_gradient needs a non-empty batch");
  }
  if (w.heads.size() != m.head_count) {
    raise(ErrorCode::HeadCountMismatch,
          "loss has " + std::to_string(w.heads.size()) + " heads, model has " +
              std::to_string(m.head_count));
  }
  grad.assign(m.params.size(), 0.0);
  LossBreakdown sum;

  Activations acts;
  std::vector<std::vector<double>> d_trunk(
      kTrunkDepth, std::vector<double>(m.hidden_dim));
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  for (const Frame* fr : batch) {
    forward_acts(m, fr->features, acts);
    for (auto& v : d_trunk) std::fill(v.begin(), v.end(), 0.0);

    for (std::size_t h = 0; h < m.heads.size(); ++h) {
      const Pose pred = pose_of(acts.head_out[h]);
      const LossBreakdown b = proposed_loss(pred, fr->pose, w.heads[h].alpha,
                                            w.heads[h].beta, w.gamma);
      sum.position_term += b.position_term * inv_n;
      sum.rotation_term += b.rotation_term * inv_n;
      sum.los_term += b.los_term * inv_n;

      const PoseGradient pg = loss_subgradient(
          pred, fr->pose, w.heads[h].alpha, w.heads[h].beta, w.gamma);
      const double d_out[kOutDim] = {
          pg.d_position.x * inv_n,  pg.d_position.y * inv_n,
          pg.d_position.z * inv_n,  pg.d_rotation[0] * inv_n,
          pg.d_rotation[1] * inv_n, pg.d_rotation[2] * inv_n,
          pg.d_rotation[3] * inv_n};

      const DenseShape& L = m.heads[h];
      const std::vector<double>& tap = acts.trunk[m.head_tap[h] - 1];
      std::vector<double>& d_tap = d_trunk[m.head_tap[h] - 1];
      for (std::size_t r = 0; r < kOutDim; ++r) {
        grad[L.b_offset + r] += d_out[r];
        double* gw = &grad[L.w_offset + r * L.in];
        const double* wrow = &m.params[L.w_offset + r * L.in];
        for (std::size_t c = 0; c < L.in; ++c) {
          gw[c] += d_out[r] * tap[c];
          d_tap[c] += wrow[c] * d_out[r];
        }
      }
    }

    // Backward through the trunk, deepest layer first. ReLU derivative is
    // the indicator of a positive activation (0 at the kink).
    for (std::size_t d = kTrunkDepth; d-- > 0;) {
      const DenseShape& L = m.trunk[d];
      const std::vector<double>& a = acts.trunk[d];
      const double* in =
          d == 0 ? fr->features.data() : acts.trunk[d - 1].data();
      for (std::size_t r = 0; r < L.out; ++r) {
        const double dz = a[r] > 0.0 ? d_trunk[d][r] : 0.0;
        if (dz == 0.0) continue;
        grad[L.b_offset + r] += dz;
        double* gw = &grad[L.w_offset + r * L.in];
        for (std::size_t c = 0; c < L.in; ++c) gw[c] += dz * in[c];
        if (d > 0) {
          const double* wrow = &m.params[L.w_offset + r * L.in];
          for (std::size_t c = 0; c < L.in; ++c) {
            d_trunk[d - 1][c] += wrow[c] * dz;
          }
        }
      }
    }
  }

  sum.total = sum.position_term + sum.rotation_term + sum.los_term;
  return sum;
}

std::pair<RegressorModel, TrainTrace> train(const SceneDataset& ds,
                                            const TrainConfig& cfg) {
  if (ds.train.empty()) {
    raise(ErrorCode::InvalidArgument, "training split is empty");
  }
  if (cfg.iterations < 1 || cfg.batch_size < 1 ||
      !(cfg.learning_rate > 0.0) || cfg.hidden_dim < 1) {
    raise(ErrorCode::InvalidArgument, "bad training configuration");
  }
  validate(cfg.weights);

  RegressorModel m = init_model(ds.feature_dim, cfg.hidden_dim,
                                cfg.weights.heads.size(), cfg.seed);

  // Decouple batch sampling from weight init so both streams stay
  // reproducible if either consumer changes.
  Rng batch_rng(cfg.seed * 0x9E3779B97F4A7C15ULL + 1);
  const std::size_t n = ds.train.size();
  const bool full_batch = cfg.batch_size >= n;

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  std::vector<double> grad, m1(m.params.size(), 0.0), m2(m.params.size(), 0.0);
  double b1t = 1.0, b2t = 1.0;

  const std::size_t log_every = std::max<std::size_t>(1, cfg.iterations / 100);
  TrainTrace trace;
  std::vector<const Frame*> batch;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    batch.clear();
    if (full_batch) {
      for (const Frame& f : ds.train) batch.push_back(&f);
    } else {
      for (std::size_t k = 0; k < cfg.batch_size; ++k) {
        batch.push_back(&ds.train[batch_rng.index(n)]);
      }
    }

    const LossBreakdown b = batch_gradient(m, batch, cfg.weights, grad);
    if (!std::isfinite(b.total)) {
      raise(ErrorCode::NonFiniteLoss,
            "loss became non-finite at iteration " + std::to_string(it));
    }
    if (it % log_every == 0 || it + 1 == cfg.iterations) {
      trace.push_back(
          {it, b.total, b.position_term, b.rotation_term, b.los_term});
    }

    b1t *= kBeta1;
    b2t *= kBeta2;
    const double corr = cfg.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * grad[i];
      m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      m.params[i] -= corr * m1[i] / (std::sqrt(m2[i]) + kAdamEps);
    }
  }

  for (double p : m.params) {
    if (!std::isfinite(p)) {
      raise(ErrorCode::NonFiniteLoss,
            "parameters became non-finite at iteration " +
                std::to_string(cfg.iterations - 1));
    }
  }
  return {std::move(m), std::move(trace)};
}

}  // namespace poselab
