/* C interface to the pose-regression laboratory.
 *
 * All entry points return poselab_status; on any failure the thread-local
 * message from poselab_last_error() describes what went wrong. Out-params
 * are written only on POSELAB_OK. Handles are created by the functions
 * below and released with the matching _free (free of NULL is a no-op).
 *
 * Poses cross this boundary packed as 7 doubles:
 *   [px, py, pz, qw, qx, qy, qz]   (scalar-first unit quaternion)
 */
#ifndef POSELAB_H
#define POSELAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum poselab_status {
  POSELAB_OK = 0,
  POSELAB_ERR_INVALID_ARGUMENT = 1, /* bad parameters or config */
  POSELAB_ERR_IO = 2,               /* file unreadable/unwritable */
  POSELAB_ERR_PARSE = 3,            /* file exists but content is broken */
  POSELAB_ERR_DATA = 4,             /* inputs inconsistent or insufficient */
  POSELAB_ERR_NUMERIC = 5           /* non-finite or singular computation */
} poselab_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* poselab_last_error(void);

typedef struct poselab_dataset poselab_dataset;
typedef struct poselab_model poselab_model;
typedef struct poselab_report poselab_report;
typedef struct poselab_grid_result poselab_grid_result;

void poselab_dataset_free(poselab_dataset* ds);
void poselab_model_free(poselab_model* m);
void poselab_report_free(poselab_report* r);
void poselab_grid_result_free(poselab_grid_result* g);

/* Provenance stamped into every saved artifact. parameters_json must be a
 * JSON object literal (NULL means "{}"). */
typedef struct poselab_manifest {
  const char* command;
  const char* parameters_json;
  uint64_t seed;
} poselab_manifest;

/* ---- datasets ---- */

poselab_status poselab_synth_scene(const double extents[3], size_t n_train,
                                   size_t n_test, size_t n_landmarks,
                                   double noise_sigma, uint64_t seed,
                                   poselab_dataset** out);
poselab_status poselab_dataset_load(const char* path, poselab_dataset** out);
poselab_status poselab_dataset_save(const poselab_dataset* ds,
                                    const poselab_manifest* manifest,
                                    const char* path);
/* Any out-pointer may be NULL when the caller does not need it. */
poselab_status poselab_dataset_info(const poselab_dataset* ds, size_t* n_train,
                                    size_t* n_test, size_t* feature_dim,
                                    double extents[3]);
/* Scene name; pointer stays valid while the handle lives. */
const char* poselab_dataset_name(const poselab_dataset* ds);

/* ---- training ---- */

typedef struct poselab_train_config {
  size_t iterations;
  size_t batch_size;
  double learning_rate;
  size_t hidden_dim;
  size_t head_count; /* length of alphas and betas */
  const double* alphas;
  const double* betas;
  double gamma;
  uint64_t seed;
} poselab_train_config;

/* Trains on the dataset's train split. When trace_csv_path is non-NULL the
 * loss trace table is written there. */
poselab_status poselab_train(const poselab_dataset* ds,
                             const poselab_train_config* cfg,
                             const char* trace_csv_path, poselab_model** out);
poselab_status poselab_model_load(const char* path, poselab_model** out);
poselab_status poselab_model_save(const poselab_model* m,
                                  const poselab_manifest* manifest,
                                  const char* path);
poselab_status poselab_model_predict(const poselab_model* m,
                                     const double* features,
                                     size_t n_features, double pose_out[7]);

/* Single-pair loss with one head: alpha-weighted position error,
 * beta-weighted rotation error, gamma-weighted line-of-sight term. */
poselab_status poselab_loss(const double predicted_pose[7],
                            const double ground_truth_pose[7], double alpha,
                            double beta, double gamma, double* total);

/* ---- evaluation ---- */

poselab_status poselab_evaluate(const poselab_model* m,
                                const poselab_dataset* ds, size_t bins_pos,
                                size_t bins_rot, poselab_report** out);
poselab_status poselab_report_load(const char* path, poselab_report** out);
poselab_status poselab_report_save(const poselab_report* r,
                                   const poselab_manifest* manifest,
                                   const char* path);
poselab_status poselab_report_medians(const poselab_report* r, double* pos_m,
                                      double* rot_deg, double* los_deg);
poselab_status poselab_report_histograms_save(const poselab_report* r,
                                              const char* pos_csv_path,
                                              const char* rot_csv_path);
const char* poselab_report_scene(const poselab_report* r);

/* Compares b against a (same scene and frame count required) and writes the
 * comparison document. pct_deltas, when non-NULL, receives the percentage
 * change of the position/rotation/line-of-sight medians (NaN when a median
 * of a is zero and b's is not). */
poselab_status poselab_compare_save(const poselab_report* a,
                                    const poselab_report* b,
                                    const poselab_manifest* manifest,
                                    const char* path, double pct_deltas[3]);

/* ---- gamma grid search ---- */

/* gammas may be NULL (with n_gammas 0) to use the scale-proportional
 * default grid for the dataset's extents. cfg->gamma is ignored; each grid
 * candidate supplies its own. */
poselab_status poselab_grid_search(const poselab_dataset* ds,
                                   const poselab_train_config* cfg,
                                   const double* gammas, size_t n_gammas,
                                   double val_fraction,
                                   poselab_grid_result** out);
poselab_status poselab_grid_best_gamma(const poselab_grid_result* g,
                                       double* best);
poselab_status poselab_grid_row_count(const poselab_grid_result* g,
                                      size_t* count);
poselab_status poselab_grid_row(const poselab_grid_result* g, size_t index,
                                double* gamma, double* val_median_pos_m,
                                double* val_median_rot_deg,
                                double* val_median_los_deg);
/* Writes the structured document, plus the flat per-gamma table when
 * csv_path is non-NULL. */
poselab_status poselab_grid_save(const poselab_grid_result* g,
                                 const poselab_manifest* manifest,
                                 const char* json_path, const char* csv_path);

/* ---- gradient check ---- */

/* Compares analytic loss gradients against central differences at
 * n_samples random points. Failure count and worst relative error are
 * always reported on success; a report document is written when out_path
 * is non-NULL. Samples exceeding tol count as failures but do not make the
 * call itself fail. */
poselab_status poselab_gradcheck(size_t n_samples, uint64_t seed, double tol,
                                 const poselab_manifest* manifest,
                                 const char* out_path, double* max_rel_error,
                                 size_t* n_failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POSELAB_H */
