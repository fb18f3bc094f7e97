// Drives the installed CLI binary end to end. The binary path arrives as
// argv[1] (wired up by the test registration); fixtures that cannot be
// produced by the CLI itself are written with the core library.
#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "poselab/io.hpp"

namespace {

std::string g_cli;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      g_cli + " " + args + " > tmp_cli_out.txt 2> tmp_cli_err.txt";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp("tmp_cli_out.txt");
  r.err = slurp("tmp_cli_err.txt");
  std::remove("tmp_cli_out.txt");
  std::remove("tmp_cli_err.txt");
  return r;
}

nlohmann::json payload_of_file(const std::string& path) {
  return nlohmann::json::parse(slurp(path)).at("payload");
}

// Dataset whose every frame shares one pose, plus a zeroed model whose head
// biases hold exactly that pose: evaluation must come out error-free.
void write_memorizing_fixture(const std::string& ds_path,
                              const std::string& model_path) {
  using namespace poselab;
  const Pose pose{{0.25, -0.5, 1.0}, {1.0, 0.0, 0.0, 0.0}};
  SceneDataset ds;
  ds.name = "memorized";
  ds.extents = {1.0, 1.0, 1.0};
  ds.feature_dim = 6;
  for (int i = 0; i < 4; ++i) {
    Frame f;
    f.id = "memorized/" + std::to_string(i);
    f.features = {0.1 * i, 0.2, -0.3, 0.4, 0.5, -0.6};
    f.pose = pose;
    (i < 2 ? ds.train : ds.test).push_back(f);
  }

  RegressorModel m = init_model(6, 8, 3, 0);
  for (double& p : m.params) p = 0.0;
  for (const DenseShape& head : m.heads) {
    double* bias = m.params.data() + head.b_offset;
    bias[0] = pose.position.x;
    bias[1] = pose.position.y;
    bias[2] = pose.position.z;
    bias[3] = pose.rotation.w;
    bias[4] = pose.rotation.x;
    bias[5] = pose.rotation.y;
    bias[6] = pose.rotation.z;
  }

  RunManifest manifest;
  manifest.command = "fixture";
  save_document(ds_path, make_document(manifest, dataset_payload(ds)));
  save_document(model_path, make_document(manifest, model_payload(m)));
}

}  // namespace

TEST_CASE("usage surface") {
  CHECK(run_cli("").code == 2);
  const RunResult help = run_cli("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("gridsearch") != std::string::npos);
  CHECK(run_cli("synth --n-train 5").code == 2);  // missing required flags
  CHECK(run_cli("no-such-command").code == 2);
}

TEST_CASE("synth is reproducible and train collapses to the default loss") {
  const std::string synth_flags =
      "synth --extents 2,0.5,1 --n-train 60 --n-test 12 --seed 0 --out ";
  REQUIRE(run_cli(synth_flags + "tmp_cli_ds_a.json").code == 0);
  REQUIRE(run_cli(synth_flags + "tmp_cli_ds_b.json").code == 0);
  CHECK(payload_of_file("tmp_cli_ds_a.json") ==
        payload_of_file("tmp_cli_ds_b.json"));

  const std::string common =
      "--data tmp_cli_ds_a.json --iters 80 --seed 0 --out ";
  REQUIRE(run_cli("train " + common + "tmp_cli_m_default.json").code == 0);
  REQUIRE(run_cli("train --loss proposed --gamma 0 " + common +
                  "tmp_cli_m_prop0.json")
              .code == 0);
  REQUIRE(run_cli("train --loss proposed --gamma 1 " + common +
                  "tmp_cli_m_prop1.json")
              .code == 0);

  // gamma = 0 under the proposed loss is the default loss, byte for byte.
  CHECK(payload_of_file("tmp_cli_m_default.json").dump() ==
        payload_of_file("tmp_cli_m_prop0.json").dump());
  CHECK(payload_of_file("tmp_cli_m_default.json").dump() !=
        payload_of_file("tmp_cli_m_prop1.json").dump());
  CHECK(slurp("tmp_cli_m_default.json.trace.csv") ==
        slurp("tmp_cli_m_prop0.json.trace.csv"));

  SUBCASE("the trace records a shrinking loss") {
    const std::string trace = slurp("tmp_cli_m_default.json.trace.csv");
    double first_total = -1.0, last_total = -1.0;
    std::istringstream lines(trace);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
      double it, total;
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &it, &total) == 2);
      if (first_total < 0.0) first_total = total;
      last_total = total;
    }
    CHECK(first_total > 0.0);
    CHECK(last_total < first_total);
  }

  SUBCASE("gamma flag discipline") {
    const RunResult missing =
        run_cli("train --loss proposed " + common + "tmp_cli_nope.json");
    CHECK(missing.code == 2);
    CHECK(missing.err.find("gridsearch") != std::string::npos);
    CHECK(run_cli("train --gamma 2 " + common + "tmp_cli_nope.json").code ==
          2);
  }

  SUBCASE("numeric blowups use their own exit code") {
    const RunResult blown = run_cli(
        "train --lr 1e200 " + common + "tmp_cli_blown.json");
    CHECK(blown.code == 4);
    CHECK(blown.err.find("non-finite") != std::string::npos);
  }
}

TEST_CASE("eval reproduces a memorizing model exactly") {
  write_memorizing_fixture("tmp_cli_memo_ds.json", "tmp_cli_memo_model.json");
  const RunResult r = run_cli(
      "eval --model tmp_cli_memo_model.json --data tmp_cli_memo_ds.json "
      "--bins 4 --out tmp_cli_memo_report.json");
  REQUIRE(r.code == 0);

  const auto payload = payload_of_file("tmp_cli_memo_report.json");
  CHECK(payload.at("median_pos_m") == 0.0);
  CHECK(payload.at("median_rot_deg") == 0.0);
  CHECK(payload.at("median_los_deg") == 0.0);

  // Final cumulative fraction is exactly 1 in the emitted table.
  const std::string hist = slurp("tmp_cli_memo_report.json.pos.csv");
  const auto last_comma = hist.find_last_of(',');
  REQUIRE(last_comma != std::string::npos);
  CHECK(std::strtod(hist.c_str() + last_comma + 1, nullptr) == 1.0);

  SUBCASE("re-running yields the identical report payload") {
    REQUIRE(run_cli("eval --model tmp_cli_memo_model.json "
                    "--data tmp_cli_memo_ds.json --bins 4 "
                    "--out tmp_cli_memo_report2.json")
                .code == 0);
    CHECK(payload_of_file("tmp_cli_memo_report.json") ==
          payload_of_file("tmp_cli_memo_report2.json"));
  }

  SUBCASE("feature width mismatch is a data error") {
    REQUIRE(run_cli("synth --extents 1,1,1 --n-train 8 --n-test 4 "
                    "--landmarks 4 --seed 1 --out tmp_cli_narrow.json")
                .code == 0);
    const RunResult bad = run_cli(
        "eval --model tmp_cli_memo_model.json --data tmp_cli_narrow.json "
        "--out tmp_cli_bad_report.json");
    CHECK(bad.code == 3);
  }
}

TEST_CASE("compare reports") {
  // Reports from the training test above; regenerate if run in isolation.
  if (slurp("tmp_cli_ds_a.json").empty()) {
    REQUIRE(run_cli("synth --extents 2,0.5,1 --n-train 60 --n-test 12 "
                    "--seed 0 --out tmp_cli_ds_a.json")
                .code == 0);
    REQUIRE(run_cli("train --data tmp_cli_ds_a.json --iters 80 --seed 0 "
                    "--out tmp_cli_m_default.json")
                .code == 0);
  }
  REQUIRE(run_cli("eval --model tmp_cli_m_default.json "
                  "--data tmp_cli_ds_a.json --out tmp_cli_r_a.json")
              .code == 0);
  const RunResult same = run_cli(
      "compare --a tmp_cli_r_a.json --b tmp_cli_r_a.json "
      "--out tmp_cli_cmp.json");
  REQUIRE(same.code == 0);
  CHECK(same.out.find("position median change: +0%") != std::string::npos);
  CHECK(payload_of_file("tmp_cli_cmp.json").at("pos").at("pct_delta") == 0.0);

  SUBCASE("different scenes cannot be compared") {
    write_memorizing_fixture("tmp_cli_memo_ds.json",
                             "tmp_cli_memo_model.json");
    REQUIRE(run_cli("eval --model tmp_cli_memo_model.json "
                    "--data tmp_cli_memo_ds.json --out tmp_cli_r_memo.json")
                .code == 0);
    CHECK(run_cli("compare --a tmp_cli_r_a.json --b tmp_cli_r_memo.json "
                  "--out tmp_cli_cmp_bad.json")
              .code == 3);
  }
}

TEST_CASE("gridsearch from the command line") {
  if (slurp("tmp_cli_ds_a.json").empty())
    REQUIRE(run_cli("synth --extents 2,0.5,1 --n-train 60 --n-test 12 "
                    "--seed 0 --out tmp_cli_ds_a.json")
                .code == 0);

  SUBCASE("single candidate") {
    const RunResult r = run_cli(
        "gridsearch --data tmp_cli_ds_a.json --gammas 0 --iters 30 "
        "--val-fraction 0.2 --out tmp_cli_grid1.json");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("best gamma: 0") != std::string::npos);
    CHECK(payload_of_file("tmp_cli_grid1.json").at("best_gamma") == 0.0);
  }
  SUBCASE("default grid lists five rows") {
    const RunResult r = run_cli(
        "gridsearch --data tmp_cli_ds_a.json --iters 30 "
        "--val-fraction 0.2 --out tmp_cli_grid5.json");
    REQUIRE(r.code == 0);
    CHECK(payload_of_file("tmp_cli_grid5.json").at("rows").size() == 5);
    const std::string csv = slurp("tmp_cli_grid5.json.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows
  }
  SUBCASE("validation split too small") {
    CHECK(run_cli("gridsearch --data tmp_cli_ds_a.json --gammas 0 "
                  "--iters 30 --val-fraction 0.05 --out tmp_cli_gridx.json")
              .code == 3);
  }
}

TEST_CASE("gradcheck gates on failures") {
  const RunResult good = run_cli("gradcheck --n 20 --seed 0 --tol 1e-5");
  REQUIRE(good.code == 0);
  CHECK(good.out.find("0 failures") != std::string::npos);

  const RunResult strict =
      run_cli("gradcheck --n 5 --seed 0 --tol 1e-30 --out tmp_cli_gc.json");
  CHECK(strict.code == 4);
  CHECK(payload_of_file("tmp_cli_gc.json").at("failures").size() == 5);
}

int cleanup_scratch() {
  const char* files[] = {
      "tmp_cli_ds_a.json",         "tmp_cli_ds_b.json",
      "tmp_cli_m_default.json",    "tmp_cli_m_prop0.json",
      "tmp_cli_m_prop1.json",      "tmp_cli_m_default.json.trace.csv",
      "tmp_cli_m_prop0.json.trace.csv",
      "tmp_cli_m_prop1.json.trace.csv",
      "tmp_cli_memo_ds.json",      "tmp_cli_memo_model.json",
      "tmp_cli_memo_report.json",  "tmp_cli_memo_report.json.pos.csv",
      "tmp_cli_memo_report.json.rot.csv",
      "tmp_cli_memo_report2.json", "tmp_cli_memo_report2.json.pos.csv",
      "tmp_cli_memo_report2.json.rot.csv",
      "tmp_cli_narrow.json",       "tmp_cli_r_a.json",
      "tmp_cli_r_a.json.pos.csv",  "tmp_cli_r_a.json.rot.csv",
      "tmp_cli_r_memo.json",       "tmp_cli_r_memo.json.pos.csv",
      "tmp_cli_r_memo.json.rot.csv",
      "tmp_cli_cmp.json",          "tmp_cli_grid1.json",
      "tmp_cli_grid1.json.csv",    "tmp_cli_grid5.json",
      "tmp_cli_grid5.json.csv",    "tmp_cli_gc.json",
  };
  for (const char* f : files) std::remove(f);
  return 0;
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 1;
  }
  g_cli = argv[1];
  doctest::Context context;
  context.applyCommandLine(1, argv);
  const int rc = context.run();
  cleanup_scratch();
  return rc;
}
