#include "poselab.h"

#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "poselab/error.hpp"
#include "poselab/io.hpp"

struct poselab_dataset {
  poselab::SceneDataset ds;
};
struct poselab_model {
  poselab::RegressorModel m;
};
struct poselab_report {
  poselab::EvalReport r;
};
struct poselab_grid_result {
  poselab::GridResult g;
};

namespace {

using poselab::Error;
using poselab::ErrorCode;

thread_local std::string g_last_error;

poselab_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return POSELAB_ERR_INVALID_ARGUMENT;
    case ErrorCode::IoError:
      return POSELAB_ERR_IO;
    case ErrorCode::MalformedFile:
    case ErrorCode::BadQuaternion:
    case ErrorCode::NotARotation:
      return POSELAB_ERR_PARSE;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::HeadCountMismatch:
    case ErrorCode::SceneMismatch:
    case ErrorCode::EmptyTestSet:
    case ErrorCode::EmptyInput:
    case ErrorCode::InsufficientData:
      return POSELAB_ERR_DATA;
    case ErrorCode::ZeroNorm:
    case ErrorCode::NotUnit:
    case ErrorCode::NonDifferentiablePoint:
    case ErrorCode::NonFiniteEvaluation:
    case ErrorCode::NonFiniteLoss:
      return POSELAB_ERR_NUMERIC;
  }
  return POSELAB_ERR_NUMERIC;
}

template <typename F>
poselab_status guarded(F&& body) {
  try {
    body();
    return POSELAB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return POSELAB_ERR_NUMERIC;
  }
}

void require(bool ok, const char* message) {
  if (!ok) poselab::raise(ErrorCode::InvalidArgument, message);
}

poselab::RunManifest manifest_of(const poselab_manifest* m) {
  require(m != nullptr && m->command != nullptr,
          "a manifest with a command name is required");
  poselab::RunManifest out;
  out.command = m->command;
  out.seed = m->seed;
  if (m->parameters_json != nullptr) {
    try {
      out.parameters = nlohmann::json::parse(m->parameters_json);
    } catch (const nlohmann::json::exception& e) {
      poselab::raise(ErrorCode::InvalidArgument,
                     std::string("parameters_json: ") + e.what());
    }
    require(out.parameters.is_object(),
            "parameters_json must be a JSON object");
  }
  return out;
}

poselab::TrainConfig config_of(const poselab_train_config* c) {
  require(c != nullptr, "null train config");
  require(c->head_count > 0, "head_count must be positive");
  require(c->alphas != nullptr && c->betas != nullptr,
          "alphas and betas are required");
  poselab::TrainConfig cfg;
  cfg.iterations = c->iterations;
  cfg.batch_size = c->batch_size;
  cfg.learning_rate = c->learning_rate;
  cfg.hidden_dim = c->hidden_dim;
  cfg.seed = c->seed;
  cfg.weights.heads.clear();
  for (size_t i = 0; i < c->head_count; ++i)
    cfg.weights.heads.push_back({c->alphas[i], c->betas[i]});
  cfg.weights.gamma = c->gamma;
  return cfg;
}

poselab::Pose pose_of(const double p[7]) {
  require(p != nullptr, "null pose");
  return {{p[0], p[1], p[2]}, {p[3], p[4], p[5], p[6]}};
}

void pack_pose(const poselab::Pose& pose, double out[7]) {
  out[0] = pose.position.x;
  out[1] = pose.position.y;
  out[2] = pose.position.z;
  out[3] = pose.rotation.w;
  out[4] = pose.rotation.x;
  out[5] = pose.rotation.y;
  out[6] = pose.rotation.z;
}

}  // namespace

extern "C" {

const char* poselab_last_error(void) { return g_last_error.c_str(); }

void poselab_dataset_free(poselab_dataset* ds) { delete ds; }
void poselab_model_free(poselab_model* m) { delete m; }
void poselab_report_free(poselab_report* r) { delete r; }
void poselab_grid_result_free(poselab_grid_result* g) { delete g; }

poselab_status poselab_synth_scene(const double extents[3], size_t n_train,
                                   size_t n_test, size_t n_landmarks,
                                   double noise_sigma, uint64_t seed,
                                   poselab_dataset** out) {
  return guarded([&] {
    require(extents != nullptr, "null extents");
    require(out != nullptr, "null out handle");
    auto ds = poselab::synth_scene({extents[0], extents[1], extents[2]},
                                   n_train, n_test, n_landmarks, noise_sigma,
                                   seed);
    *out = new poselab_dataset{std::move(ds)};
  });
}

poselab_status poselab_dataset_load(const char* path, poselab_dataset** out) {
  return guarded([&] {
    require(path != nullptr, "null path");
    require(out != nullptr, "null out handle");
    const auto doc = poselab::load_document(path);
    auto ds =
        poselab::dataset_from_payload(poselab::payload_of(doc, "dataset"));
    *out = new poselab_dataset{std::move(ds)};
  });
}

poselab_status poselab_dataset_save(const poselab_dataset* ds,
                                    const poselab_manifest* manifest,
                                    const char* path) {
  return guarded([&] {
    require(ds != nullptr, "null dataset");
    require(path != nullptr, "null path");
    poselab::save_document(path, poselab::make_document(
                                     manifest_of(manifest),
                                     poselab::dataset_payload(ds->ds)));
  });
}

poselab_status poselab_dataset_info(const poselab_dataset* ds, size_t* n_train,
                                    size_t* n_test, size_t* feature_dim,
                                    double extents[3]) {
  return guarded([&] {
    require(ds != nullptr, "null dataset");
    if (n_train) *n_train = ds->ds.train.size();
    if (n_test) *n_test = ds->ds.test.size();
    if (feature_dim) *feature_dim = ds->ds.feature_dim;
    if (extents) {
      extents[0] = ds->ds.extents.x;
      extents[1] = ds->ds.extents.y;
      extents[2] = ds->ds.extents.z;
    }
  });
}

const char* poselab_dataset_name(const poselab_dataset* ds) {
  if (ds == nullptr) {
    g_last_error = "null dataset";
    return nullptr;
  }
  return ds->ds.name.c_str();
}

poselab_status poselab_train(const poselab_dataset* ds,
                             const poselab_train_config* cfg,
                             const char* trace_csv_path, poselab_model** out) {
  return guarded([&] {
    require(ds != nullptr, "null dataset");
    require(out != nullptr, "null out handle");
    auto [model, trace] = poselab::train(ds->ds, config_of(cfg));
    if (trace_csv_path != nullptr)
      poselab::write_trace_csv(trace_csv_path, trace);
    *out = new poselab_model{std::move(model)};
  });
}

poselab_status poselab_model_load(const char* path, poselab_model** out) {
  return guarded([&] {
    require(path != nullptr, "null path");
    require(out != nullptr, "null out handle");
    const auto doc = poselab::load_document(path);
    auto m = poselab::model_from_payload(poselab::payload_of(doc, "model"));
    *out = new poselab_model{std::move(m)};
  });
}

poselab_status poselab_model_save(const poselab_model* m,
                                  const poselab_manifest* manifest,
                                  const char* path) {
  return guarded([&] {
    require(m != nullptr, "null model");
    require(path != nullptr, "null path");
    poselab::save_document(
        path, poselab::make_document(manifest_of(manifest),
                                     poselab::model_payload(m->m)));
  });
}

poselab_status poselab_model_predict(const poselab_model* m,
                                     const double* features,
                                     size_t n_features, double pose_out[7]) {
  return guarded([&] {
    require(m != nullptr, "null model");
    require(features != nullptr || n_features == 0, "null features");
    require(pose_out != nullptr, "null pose output");
    const std::vector<double> x(features, features + n_features);
    pack_pose(poselab::predict(m->m, x), pose_out);
  });
}

poselab_status poselab_loss(const double predicted_pose[7],
                            const double ground_truth_pose[7], double alpha,
                            double beta, double gamma, double* total) {
  return guarded([&] {
    require(total != nullptr, "null total output");
    const auto pred = pose_of(predicted_pose);
    const auto gt = pose_of(ground_truth_pose);
    *total = poselab::proposed_loss(pred, gt, alpha, beta, gamma).total;
  });
}

poselab_status poselab_evaluate(const poselab_model* m,
                                const poselab_dataset* ds, size_t bins_pos,
                                size_t bins_rot, poselab_report** out) {
  return guarded([&] {
    require(m != nullptr, "null model");
    require(ds != nullptr, "null dataset");
    require(out != nullptr, "null out handle");
    auto r = poselab::evaluate(m->m, ds->ds, bins_pos, bins_rot);
    *out = new poselab_report{std::move(r)};
  });
}

poselab_status poselab_report_load(const char* path, poselab_report** out) {
  return guarded([&] {
    require(path != nullptr, "null path");
    require(out != nullptr, "null out handle");
    const auto doc = poselab::load_document(path);
    auto r = poselab::report_from_payload(poselab::payload_of(doc, "report"));
    *out = new poselab_report{std::move(r)};
  });
}

poselab_status poselab_report_save(const poselab_report* r,
                                   const poselab_manifest* manifest,
                                   const char* path) {
  return guarded([&] {
    require(r != nullptr, "null report");
    require(path != nullptr, "null path");
    poselab::save_document(
        path, poselab::make_document(manifest_of(manifest),
                                     poselab::report_payload(r->r)));
  });
}

poselab_status poselab_report_medians(const poselab_report* r, double* pos_m,
                                      double* rot_deg, double* los_deg) {
  return guarded([&] {
    require(r != nullptr, "null report");
    if (pos_m) *pos_m = r->r.median_pos_m;
    if (rot_deg) *rot_deg = r->r.median_rot_deg;
    if (los_deg) *los_deg = r->r.median_los_deg;
  });
}

poselab_status poselab_report_histograms_save(const poselab_report* r,
                                              const char* pos_csv_path,
                                              const char* rot_csv_path) {
  return guarded([&] {
    require(r != nullptr, "null report");
    require(pos_csv_path != nullptr && rot_csv_path != nullptr, "null path");
    poselab::write_histogram_csv(pos_csv_path, r->r.pos_histogram);
    poselab::write_histogram_csv(rot_csv_path, r->r.rot_histogram);
  });
}

const char* poselab_report_scene(const poselab_report* r) {
  if (r == nullptr) {
    g_last_error = "null report";
    return nullptr;
  }
  return r->r.scene.c_str();
}

poselab_status poselab_compare_save(const poselab_report* a,
                                    const poselab_report* b,
                                    const poselab_manifest* manifest,
                                    const char* path, double pct_deltas[3]) {
  return guarded([&] {
    require(a != nullptr && b != nullptr, "null report");
    require(path != nullptr, "null path");
    const auto c = poselab::compare_reports(a->r, b->r);
    poselab::save_document(
        path, poselab::make_document(manifest_of(manifest),
                                     poselab::comparison_payload(c)));
    if (pct_deltas) {
      pct_deltas[0] = c.pos.pct_delta;
      pct_deltas[1] = c.rot.pct_delta;
      pct_deltas[2] = c.los.pct_delta;
    }
  });
}

poselab_status poselab_grid_search(const poselab_dataset* ds,
                                   const poselab_train_config* cfg,
                                   const double* gammas, size_t n_gammas,
                                   double val_fraction,
                                   poselab_grid_result** out) {
  return guarded([&] {
    require(ds != nullptr, "null dataset");
    require(out != nullptr, "null out handle");
    require(gammas != nullptr || n_gammas == 0,
            "null gammas with nonzero count");
    poselab::GridSpec spec;
    spec.base_cfg = config_of(cfg);
    spec.base_cfg.weights.gamma = 0.0;  // per-candidate values take over
    spec.val_fraction = val_fraction;
    if (gammas == nullptr)
      spec.gamma_values = poselab::default_gamma_grid(ds->ds.extents);
    else
      spec.gamma_values.assign(gammas, gammas + n_gammas);
    auto g = poselab::grid_search(ds->ds, spec);
    *out = new poselab_grid_result{std::move(g)};
  });
}

poselab_status poselab_grid_best_gamma(const poselab_grid_result* g,
                                       double* best) {
  return guarded([&] {
    require(g != nullptr, "null grid result");
    require(best != nullptr, "null output");
    *best = g->g.best_gamma;
  });
}

poselab_status poselab_grid_row_count(const poselab_grid_result* g,
                                      size_t* count) {
  return guarded([&] {
    require(g != nullptr, "null grid result");
    require(count != nullptr, "null output");
    *count = g->g.rows.size();
  });
}

poselab_status poselab_grid_row(const poselab_grid_result* g, size_t index,
                                double* gamma, double* val_median_pos_m,
                                double* val_median_rot_deg,
                                double* val_median_los_deg) {
  return guarded([&] {
    require(g != nullptr, "null grid result");
    require(index < g->g.rows.size(), "grid row index out of range");
    const auto& row = g->g.rows[index];
    if (gamma) *gamma = row.gamma;
    if (val_median_pos_m) *val_median_pos_m = row.val_median_pos_m;
    if (val_median_rot_deg) *val_median_rot_deg = row.val_median_rot_deg;
    if (val_median_los_deg) *val_median_los_deg = row.val_median_los_deg;
  });
}

poselab_status poselab_grid_save(const poselab_grid_result* g,
                                 const poselab_manifest* manifest,
                                 const char* json_path, const char* csv_path) {
  return guarded([&] {
    require(g != nullptr, "null grid result");
    require(json_path != nullptr, "null path");
    poselab::save_document(
        json_path, poselab::make_document(manifest_of(manifest),
                                          poselab::grid_payload(g->g)));
    if (csv_path != nullptr) poselab::write_grid_csv(csv_path, g->g);
  });
}

poselab_status poselab_gradcheck(size_t n_samples, uint64_t seed, double tol,
                                 const poselab_manifest* manifest,
                                 const char* out_path, double* max_rel_error,
                                 size_t* n_failures) {
  return guarded([&] {
    const auto report = poselab::check_loss_gradients(n_samples, seed, tol);
    if (out_path != nullptr)
      poselab::save_document(
          out_path, poselab::make_document(manifest_of(manifest),
                                           poselab::gradcheck_payload(report)));
    if (max_rel_error) *max_rel_error = report.max_rel_error;
    if (n_failures) *n_failures = report.failures.size();
  });
}

}  // extern "C"
