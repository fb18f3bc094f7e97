// Command-line front end. Everything goes through the public C API; the
// only other dependencies are the flag parser and the JSON helper used to
// assemble manifest parameter blocks.
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poselab.h"

namespace {

// Exit codes: 0 success, 2 usage, 3 data/file, 4 numeric.
struct CliFailure {
  int code;
};

int exit_code_of(poselab_status s) {
  switch (s) {
    case POSELAB_OK:
      return 0;
    case POSELAB_ERR_INVALID_ARGUMENT:
      return 2;
    case POSELAB_ERR_IO:
    case POSELAB_ERR_PARSE:
    case POSELAB_ERR_DATA:
      return 3;
    case POSELAB_ERR_NUMERIC:
      return 4;
  }
  return 4;
}

void check(poselab_status s) {
  if (s == POSELAB_OK) return;
  std::fprintf(stderr, "error: %s\n", poselab_last_error());
  throw CliFailure{exit_code_of(s)};
}

using DatasetPtr =
    std::unique_ptr<poselab_dataset, decltype(&poselab_dataset_free)>;
using ModelPtr = std::unique_ptr<poselab_model, decltype(&poselab_model_free)>;
using ReportPtr =
    std::unique_ptr<poselab_report, decltype(&poselab_report_free)>;
using GridPtr =
    std::unique_ptr<poselab_grid_result, decltype(&poselab_grid_result_free)>;

DatasetPtr load_dataset(const std::string& path) {
  poselab_dataset* ds = nullptr;
  check(poselab_dataset_load(path.c_str(), &ds));
  return {ds, &poselab_dataset_free};
}

ModelPtr load_model(const std::string& path) {
  poselab_model* m = nullptr;
  check(poselab_model_load(path.c_str(), &m));
  return {m, &poselab_model_free};
}

ReportPtr load_report(const std::string& path) {
  poselab_report* r = nullptr;
  check(poselab_report_load(path.c_str(), &r));
  return {r, &poselab_report_free};
}

struct SynthArgs {
  std::vector<double> extents;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t landmarks = 8;
  double noise = 0.01;
  std::uint64_t seed = 0;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string loss = "default";
  double gamma = 0.0;
  bool gamma_given = false;
  std::vector<double> alphas = {0.3, 0.3, 1.0};
  std::vector<double> betas = {150.0, 150.0, 500.0};
  std::size_t iters = 5000;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::string out;
};

struct EvalArgs {
  std::string model;
  std::string data;
  std::size_t bins = 50;
  std::string out;
};

struct CompareArgs {
  std::string a;
  std::string b;
  std::string out;
};

struct GridArgs {
  std::string data;
  std::vector<double> gammas;  // empty -> scale-proportional default grid
  double val_fraction = 0.2;
  std::vector<double> alphas = {0.3, 0.3, 1.0};
  std::vector<double> betas = {150.0, 150.0, 500.0};
  std::size_t iters = 5000;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::string out;
};

struct GradcheckArgs {
  std::size_t n = 100;
  std::uint64_t seed = 0;
  double tol = 1e-5;
  std::string out;
};

constexpr std::size_t kHiddenDim = 64;

poselab_train_config make_config(const std::vector<double>& alphas,
                                 const std::vector<double>& betas,
                                 std::size_t iters, std::size_t batch,
                                 double lr, double gamma,
                                 std::uint64_t seed) {
  if (alphas.size() != betas.size() || alphas.empty())
    throw CLI::ValidationError(
        "--alphas and --betas need the same nonzero length");
  poselab_train_config cfg{};
  cfg.iterations = iters;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.hidden_dim = kHiddenDim;
  cfg.head_count = alphas.size();
  cfg.alphas = alphas.data();
  cfg.betas = betas.data();
  cfg.gamma = gamma;
  cfg.seed = seed;
  return cfg;
}

poselab_manifest make_manifest(const char* command, const std::string& params,
                               std::uint64_t seed) {
  poselab_manifest m{};
  m.command = command;
  m.parameters_json = params.c_str();
  m.seed = seed;
  return m;
}

void run_synth(const SynthArgs& a) {
  poselab_dataset* raw = nullptr;
  check(poselab_synth_scene(a.extents.data(), a.n_train, a.n_test,
                            a.landmarks, a.noise, a.seed, &raw));
  DatasetPtr ds(raw, &poselab_dataset_free);

  const std::string params = nlohmann::json{{"extents", a.extents},
                                            {"n_train", a.n_train},
                                            {"n_test", a.n_test},
                                            {"landmarks", a.landmarks},
                                            {"noise", a.noise},
                                            {"seed", a.seed},
                                            {"out", a.out}}
                                 .dump();
  const poselab_manifest manifest = make_manifest("synth", params, a.seed);
  check(poselab_dataset_save(ds.get(), &manifest, a.out.c_str()));

  std::size_t dim = 0;
  check(poselab_dataset_info(ds.get(), nullptr, nullptr, &dim, nullptr));
  std::printf("dataset %s: %zu train / %zu test frames, %zu features -> %s\n",
              poselab_dataset_name(ds.get()), a.n_train, a.n_test, dim,
              a.out.c_str());
}

void run_train(const TrainArgs& a) {
  double gamma = 0.0;
  if (a.loss == "proposed") {
    if (!a.gamma_given)
      throw CLI::ValidationError(
          "train: --loss proposed needs --gamma; pass a value or pick one "
          "with the gridsearch command");
    gamma = a.gamma;
  } else if (a.gamma_given) {
    throw CLI::ValidationError("train: --gamma only applies to --loss "
                               "proposed (the default loss fixes it at 0)");
  }

  DatasetPtr ds = load_dataset(a.data);
  const poselab_train_config cfg = make_config(a.alphas, a.betas, a.iters,
                                               a.batch, a.lr, gamma, a.seed);
  const std::string trace_path = a.out + ".trace.csv";
  poselab_model* raw = nullptr;
  check(poselab_train(ds.get(), &cfg, trace_path.c_str(), &raw));
  ModelPtr model(raw, &poselab_model_free);

  const std::string params = nlohmann::json{{"data", a.data},
                                            {"loss", a.loss},
                                            {"gamma", gamma},
                                            {"alphas", a.alphas},
                                            {"betas", a.betas},
                                            {"iters", a.iters},
                                            {"batch", a.batch},
                                            {"lr", a.lr},
                                            {"seed", a.seed},
                                            {"out", a.out}}
                                 .dump();
  const poselab_manifest manifest = make_manifest("train", params, a.seed);
  check(poselab_model_save(model.get(), &manifest, a.out.c_str()));
  std::printf("trained %zu iterations (loss %s, gamma %.3g) -> %s\n", a.iters,
              a.loss.c_str(), gamma, a.out.c_str());
  std::printf("trace -> %s\n", trace_path.c_str());
}

void run_eval(const EvalArgs& a) {
  ModelPtr model = load_model(a.model);
  DatasetPtr ds = load_dataset(a.data);
  poselab_report* raw = nullptr;
  check(poselab_evaluate(model.get(), ds.get(), a.bins, a.bins, &raw));
  ReportPtr report(raw, &poselab_report_free);

  const std::string params = nlohmann::json{{"model", a.model},
                                            {"data", a.data},
                                            {"bins", a.bins},
                                            {"out", a.out}}
                                 .dump();
  const poselab_manifest manifest = make_manifest("eval", params, 0);
  check(poselab_report_save(report.get(), &manifest, a.out.c_str()));
  const std::string pos_csv = a.out + ".pos.csv";
  const std::string rot_csv = a.out + ".rot.csv";
  check(poselab_report_histograms_save(report.get(), pos_csv.c_str(),
                                       rot_csv.c_str()));

  double pos = 0, rot = 0, los = 0;
  check(poselab_report_medians(report.get(), &pos, &rot, &los));
  std::printf("scene %s: median position %.3g m, rotation %.3g deg, "
              "line-of-sight %.3g deg\n",
              poselab_report_scene(report.get()), pos, rot, los);
  std::printf("report -> %s (histograms %s, %s)\n", a.out.c_str(),
              pos_csv.c_str(), rot_csv.c_str());
}

void run_compare(const CompareArgs& args) {
  ReportPtr a = load_report(args.a);
  ReportPtr b = load_report(args.b);

  const std::string params =
      nlohmann::json{{"a", args.a}, {"b", args.b}, {"out", args.out}}.dump();
  const poselab_manifest manifest = make_manifest("compare", params, 0);
  double pct[3] = {0, 0, 0};
  check(poselab_compare_save(a.get(), b.get(), &manifest, args.out.c_str(),
                             pct));

  const char* label[3] = {"position", "rotation", "line-of-sight"};
  for (int i = 0; i < 3; ++i) {
    if (std::isnan(pct[i]))
      std::printf("%s median change: n/a (baseline is zero)\n", label[i]);
    else
      std::printf("%s median change: %+.3g%%\n", label[i], pct[i]);
  }
  std::printf("comparison -> %s\n", args.out.c_str());
}

void run_gridsearch(const GridArgs& a) {
  DatasetPtr ds = load_dataset(a.data);
  const poselab_train_config cfg = make_config(a.alphas, a.betas, a.iters,
                                               a.batch, a.lr, 0.0, a.seed);
  poselab_grid_result* raw = nullptr;
  check(poselab_grid_search(ds.get(), &cfg,
                            a.gammas.empty() ? nullptr : a.gammas.data(),
                            a.gammas.size(), a.val_fraction, &raw));
  GridPtr grid(raw, &poselab_grid_result_free);

  const std::string params = nlohmann::json{{"data", a.data},
                                            {"gammas", a.gammas},
                                            {"val_fraction", a.val_fraction},
                                            {"alphas", a.alphas},
                                            {"betas", a.betas},
                                            {"iters", a.iters},
                                            {"batch", a.batch},
                                            {"lr", a.lr},
                                            {"seed", a.seed},
                                            {"out", a.out}}
                                 .dump();
  const poselab_manifest manifest = make_manifest("gridsearch", params,
                                                  a.seed);
  const std::string csv_path = a.out + ".csv";
  check(poselab_grid_save(grid.get(), &manifest, a.out.c_str(),
                          csv_path.c_str()));

  std::size_t rows = 0;
  check(poselab_grid_row_count(grid.get(), &rows));
  std::printf("%10s %14s %16s %16s\n", "gamma", "val_pos_m", "val_rot_deg",
              "val_los_deg");
  for (std::size_t i = 0; i < rows; ++i) {
    double gamma = 0, pos = 0, rot = 0, los = 0;
    check(poselab_grid_row(grid.get(), i, &gamma, &pos, &rot, &los));
    std::printf("%10.3g %14.3g %16.3g %16.3g\n", gamma, pos, rot, los);
  }
  double best = 0;
  check(poselab_grid_best_gamma(grid.get(), &best));
  std::printf("best gamma: %.3g\n", best);
  std::printf("grid -> %s (table %s)\n", a.out.c_str(), csv_path.c_str());
}

void run_gradcheck(const GradcheckArgs& a) {
  const std::string params = nlohmann::json{{"n", a.n},
                                            {"seed", a.seed},
                                            {"tol", a.tol},
                                            {"out", a.out}}
                                 .dump();
  const poselab_manifest manifest = make_manifest("gradcheck", params,
                                                  a.seed);
  double max_rel = 0.0;
  std::size_t failures = 0;
  check(poselab_gradcheck(a.n, a.seed, a.tol, &manifest,
                          a.out.empty() ? nullptr : a.out.c_str(), &max_rel,
                          &failures));
  std::printf("checked %zu samples: max relative error %.3g, %zu failures\n",
              a.n, max_rel, failures);
  if (!a.out.empty()) std::printf("report -> %s\n", a.out.c_str());
  if (failures > 0) {
    std::fprintf(stderr, "error: %zu gradient checks exceeded tol %.3g\n",
                 failures, a.tol);
    throw CliFailure{4};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for camera-pose regression losses"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
  synth->add_option("--extents", synth_args.extents, "scene extents X,Y,Z")
      ->required()
      ->expected(3)
      ->delimiter(',');
  synth->add_option("--n-train", synth_args.n_train, "training frames")
      ->required();
  synth->add_option("--n-test", synth_args.n_test, "test frames")->required();
  synth->add_option("--landmarks", synth_args.landmarks,
                    "landmark count (>= 4)");
  synth->add_option("--noise", synth_args.noise, "feature noise sigma");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--out", synth_args.out, "dataset file")->required();
  synth->callback([&] { run_synth(synth_args); });

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a pose regressor");
  train->add_option("--data", train_args.data, "dataset file")->required();
  train->add_option("--loss", train_args.loss, "loss family")
      ->check(CLI::IsMember({"default", "proposed"}));
  auto* gamma_opt =
      train->add_option("--gamma", train_args.gamma,
                        "line-of-sight weight (proposed loss only)");
  train->add_option("--alphas", train_args.alphas, "per-head position weights")
      ->delimiter(',');
  train->add_option("--betas", train_args.betas, "per-head rotation weights")
      ->delimiter(',');
  train->add_option("--iters", train_args.iters, "training iterations");
  train->add_option("--batch", train_args.batch, "batch size");
  train->add_option("--lr", train_args.lr, "learning rate");
  train->add_option("--seed", train_args.seed, "training seed");
  train->add_option("--out", train_args.out, "model file")->required();
  train->callback([&] {
    train_args.gamma_given = gamma_opt->count() > 0;
    run_train(train_args);
  });

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate a model on a test split");
  eval->add_option("--model", eval_args.model, "model file")->required();
  eval->add_option("--data", eval_args.data, "dataset file")->required();
  eval->add_option("--bins", eval_args.bins, "histogram bins");
  eval->add_option("--out", eval_args.out, "report file")->required();
  eval->callback([&] { run_eval(eval_args); });

  CompareArgs compare_args;
  auto* compare =
      app.add_subcommand("compare", "compare two evaluation reports");
  compare->add_option("--a", compare_args.a, "baseline report")->required();
  compare->add_option("--b", compare_args.b, "candidate report")->required();
  compare->add_option("--out", compare_args.out, "comparison file")
      ->required();
  compare->callback([&] { run_compare(compare_args); });

  GridArgs grid_args;
  auto* grid = app.add_subcommand("gridsearch",
                                  "search gamma on a validation split");
  grid->add_option("--data", grid_args.data, "dataset file")->required();
  grid->add_option("--gammas", grid_args.gammas,
                   "candidate gammas (default: scale-proportional grid)")
      ->delimiter(',');
  grid->add_option("--val-fraction", grid_args.val_fraction,
                   "train fraction held out for validation");
  grid->add_option("--alphas", grid_args.alphas, "per-head position weights")
      ->delimiter(',');
  grid->add_option("--betas", grid_args.betas, "per-head rotation weights")
      ->delimiter(',');
  grid->add_option("--iters", grid_args.iters, "iterations per candidate");
  grid->add_option("--batch", grid_args.batch, "batch size");
  grid->add_option("--lr", grid_args.lr, "learning rate");
  grid->add_option("--seed", grid_args.seed, "training seed");
  grid->add_option("--out", grid_args.out, "grid result file")->required();
  grid->callback([&] { run_gridsearch(grid_args); });

  GradcheckArgs gc_args;
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic loss gradients with finite differences");
  gradcheck->add_option("--n", gc_args.n, "sample count");
  gradcheck->add_option("--seed", gc_args.seed, "sampling seed");
  gradcheck->add_option("--tol", gc_args.tol, "relative error tolerance");
  gradcheck->add_option("--out", gc_args.out, "optional report file");
  gradcheck->callback([&] { run_gradcheck(gc_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CliFailure& f) {
    return f.code;
  }
  return 0;
}
