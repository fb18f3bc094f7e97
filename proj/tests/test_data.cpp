#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "poselab/data.hpp"
#include "poselab/error.hpp"
#include "poselab/geom.hpp"

using namespace poselab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error to be raised");
  return ErrorCode::InvalidArgument;
}

bool frames_identical(const std::vector<Frame>& a,
                      const std::vector<Frame>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id) return false;
    if (a[i].features != b[i].features) return false;
    const Pose &p = a[i].pose, &q = b[i].pose;
    if (p.position.x != q.position.x || p.position.y != q.position.y ||
        p.position.z != q.position.z)
      return false;
    if (p.rotation.w != q.rotation.w || p.rotation.x != q.rotation.x ||
        p.rotation.y != q.rotation.y || p.rotation.z != q.rotation.z)
      return false;
  }
  return true;
}

// Ridge-regularized least squares features -> position, solved by Gaussian
// elimination on the normal equations. Test-only learnability oracle.
std::vector<std::vector<double>> fit_linear_probe(
    const std::vector<Frame>& frames, std::size_t dim) {
  const std::size_t d = dim + 1;  // bias column
  std::vector<std::vector<double>> ata(d, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> atb(d, std::vector<double>(3, 0.0));
  for (const Frame& f : frames) {
    std::vector<double> x(f.features);
    x.push_back(1.0);
    const double y[3] = {f.pose.position.x, f.pose.position.y,
                         f.pose.position.z};
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) ata[i][j] += x[i] * x[j];
      for (int k = 0; k < 3; ++k) atb[i][k] += x[i] * y[k];
    }
  }
  for (std::size_t i = 0; i < d; ++i) ata[i][i] += 1e-8;

  // Gaussian elimination with partial pivoting, three right-hand sides.
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
    }
    std::swap(ata[col], ata[piv]);
    std::swap(atb[col], atb[piv]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double m = ata[r][col] / ata[col][col];
      for (std::size_t c = col; c < d; ++c) ata[r][c] -= m * ata[col][c];
      for (int k = 0; k < 3; ++k) atb[r][k] -= m * atb[col][k];
    }
  }
  std::vector<std::vector<double>> w(d, std::vector<double>(3));
  for (std::size_t i = 0; i < d; ++i) {
    for (int k = 0; k < 3; ++k) w[i][k] = atb[i][k] / ata[i][i];
  }
  return w;
}

double mean_sq_pos_error_of_probe(const std::vector<Frame>& frames,
                                  std::size_t dim) {
  const auto w = fit_linear_probe(frames, dim);
  double total = 0.0;
  for (const Frame& f : frames) {
    double pred[3] = {w[dim][0], w[dim][1], w[dim][2]};  // bias row
    for (std::size_t i = 0; i < dim; ++i) {
      for (int k = 0; k < 3; ++k) pred[k] += f.features[i] * w[i][k];
    }
    const Vec3 e = Vec3{pred[0], pred[1], pred[2]} - f.pose.position;
    total += dot(e, e);
  }
  return total / static_cast<double>(frames.size());
}

double mean_sq_pos_error_of_mean(const std::vector<Frame>& frames) {
  Vec3 mean;
  for (const Frame& f : frames) mean = mean + f.pose.position;
  mean = mean * (1.0 / static_cast<double>(frames.size()));
  double total = 0.0;
  for (const Frame& f : frames) {
    const Vec3 e = f.pose.position - mean;
    total += dot(e, e);
  }
  return total / static_cast<double>(frames.size());
}

}  // namespace

TEST_CASE("look_at_rotation points the viewing direction at the target") {
  const Quaternion q = look_at_rotation({0, 0, 0}, {0, 0, 5});
  CHECK(q.w == doctest::Approx(1.0));

  const Quaternion q2 = look_at_rotation({1, 2, 3}, {4, -1, 0});
  const Vec3 v = viewing_direction(q2);
  const Vec3 want = normalize(Vec3{3, -3, -3});
  CHECK_NEAR(v.x, want.x, 1e-12);
  CHECK_NEAR(v.y, want.y, 1e-12);
  CHECK_NEAR(v.z, want.z, 1e-12);

  // Degenerate: eye == target falls back to identity.
  const Quaternion q3 = look_at_rotation({1, 1, 1}, {1, 1, 1});
  CHECK(q3.w == 1.0);

  // Near-vertical forward uses the fallback up-reference.
  const Quaternion q4 = look_at_rotation({0, 0, 0}, {0, 10, 1e-5});
  CHECK(is_unit(q4));
  const Vec3 v4 = viewing_direction(q4);
  CHECK(v4.y == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bearing_features") {
  LandmarkSet ls;
  ls.positions = {{0, 0, 5}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
  CHECK_NOTHROW(validate(ls));

  Pose cam;  // origin, +z
  const std::vector<double> f = bearing_features(cam, ls);
  REQUIRE(f.size() == 12);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[2] == 1.0);
  CHECK(f[3] == 1.0);  // landmark on +x stays +x under identity rotation

  // Rotating the camera rotates bearings into the camera frame: looking +x,
  // a landmark dead ahead must appear at (0,0,1).
  Pose cam2;
  cam2.rotation = look_at_rotation({0, 0, 0}, {10, 0, 0});
  const std::vector<double> g = bearing_features(cam2, ls);
  CHECK_NEAR(g[3], 0.0, 1e-12);
  CHECK_NEAR(g[4], 0.0, 1e-12);
  CHECK_NEAR(g[5], 1.0, 1e-12);
}

TEST_CASE("landmark validation") {
  LandmarkSet few;
  few.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK(code_of([&] { validate(few); }) == ErrorCode::InvalidArgument);

  LandmarkSet flat;
  flat.positions = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {3, -2, 0}, {5, 5, 0}};
  CHECK(code_of([&] { validate(flat); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("synth_scene determinism and shape") {
  const Vec3 extents{2, 0.5, 1};
  const SceneDataset a = synth_scene(extents, 100, 50, 8, 0.01, 42);
  const SceneDataset b = synth_scene(extents, 100, 50, 8, 0.01, 42);
  CHECK(frames_identical(a.train, b.train));
  CHECK(frames_identical(a.test, b.test));
  CHECK(a.name == b.name);
  CHECK(a.feature_dim == 24);

  const SceneDataset c = synth_scene(extents, 100, 50, 8, 0.01, 43);
  CHECK(!frames_identical(a.train, c.train));

  // Positions stay inside the extent box (centred on the origin).
  auto inside = [&](const std::vector<Frame>& fs) {
    for (const Frame& f : fs) {
      if (std::abs(f.pose.position.x) > extents.x / 2) return false;
      if (std::abs(f.pose.position.y) > extents.y / 2) return false;
      if (std::abs(f.pose.position.z) > extents.z / 2) return false;
    }
    return true;
  };
  CHECK(inside(a.train));
  CHECK(inside(a.test));

  // Rotations are unit on every frame.
  for (const Frame& f : a.train) CHECK(is_unit(f.pose.rotation));

  // Train/test ids are disjoint.
  std::set<std::string> ids;
  for (const Frame& f : a.train) ids.insert(f.id);
  for (const Frame& f : a.test) CHECK(ids.count(f.id) == 0);

  CHECK(code_of([&] { synth_scene(extents, 100, 50, 3, 0.01, 0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { synth_scene({0, 1, 1}, 10, 10, 8, 0.01, 0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("zero noise means features are a pure function of the pose") {
  const SceneDataset a = synth_scene({2, 2, 2}, 50, 20, 6, 0.0, 7);
  const SceneDataset b = synth_scene({2, 2, 2}, 50, 20, 6, 0.0, 7);
  CHECK(frames_identical(a.train, b.train));

  // Same seed with nonzero sigma: identical poses, perturbed features.
  const SceneDataset c = synth_scene({2, 2, 2}, 50, 20, 6, 0.1, 7);
  REQUIRE(c.train.size() == a.train.size());
  CHECK(c.train[0].pose.position.x == a.train[0].pose.position.x);
  CHECK(c.train[0].pose.rotation.w == a.train[0].pose.rotation.w);
  CHECK(c.train[0].features != a.train[0].features);
}

TEST_CASE("Heads-like scene is learnable by a linear probe") {
  const SceneDataset ds = synth_scene({2, 0.5, 1}, 1000, 1000, 8, 0.01, 0);
  const double probe = mean_sq_pos_error_of_probe(ds.train, ds.feature_dim);
  const double baseline = mean_sq_pos_error_of_mean(ds.train);
  CHECK(probe < baseline);
}

TEST_CASE("split_stats reproduces the reference split sizes") {
  const SceneDataset heads = synth_scene({2, 0.5, 1}, 1000, 1000, 8, 0.01, 0);
  const SplitStats hs = split_stats(heads);
  CHECK(hs.n_train == 1000);
  CHECK(hs.n_test == 1000);
  CHECK(hs.extents.x <= 2.0);
  CHECK(hs.extents.y <= 0.5);
  CHECK(hs.extents.z <= 1.0);
  CHECK(hs.extents.x > 0.0);

  const SceneDataset chess = synth_scene({3, 2, 1}, 4000, 2000, 8, 0.01, 0);
  const SplitStats cs = split_stats(chess);
  CHECK(cs.n_train == 4000);
  CHECK(cs.n_test == 2000);

  SceneDataset single;
  single.train.push_back({{}, Pose{}, "only"});
  const SplitStats ss = split_stats(single);
  CHECK(ss.n_train == 1);
  CHECK(ss.n_test == 0);
  CHECK(ss.extents.x == 0.0);
  CHECK(ss.extents.y == 0.0);
  CHECK(ss.extents.z == 0.0);
}

TEST_CASE("parse_matrix_pose_file") {
  const Pose id = parse_matrix_pose_file(
      "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
  CHECK(id.position.x == 0.0);
  CHECK(id.rotation.w == doctest::Approx(1.0));

  const Pose moved = parse_matrix_pose_file(
      "1 0 0 1\n0 1 0 2\n0 0 1 3\n0 0 0 1\n");
  CHECK(moved.position.x == 1.0);
  CHECK(moved.position.y == 2.0);
  CHECK(moved.position.z == 3.0);
  CHECK(moved.rotation.w == doctest::Approx(1.0));

  CHECK(code_of([] {
          parse_matrix_pose_file("1 0 0 0 0 1 0 0 0 0 1 0 0 0 1");
        }) == ErrorCode::MalformedFile);  // 15 tokens
  CHECK(code_of([] {
          parse_matrix_pose_file(
              "1 0 0 0\n0 1 0 0\n0 0 x 0\n0 0 0 1\n");
        }) == ErrorCode::MalformedFile);
  CHECK(code_of([] {
          parse_matrix_pose_file(
              "1 0 0 0\n0 1 0 0\n0 0 -1 0\n0 0 0 1\n");
        }) == ErrorCode::NotARotation);  // reflection
}

TEST_CASE("parse_pose_line_file") {
  const std::string good =
      "header one\nheader two\nheader three\n"
      "seq1/frame00001.png 1 2 3 1 0 0 0\n"
      "\n"
      "seq1/frame00002.png 0 0 0 0.5 0.5 0.5 0.5\n";
  const auto entries = parse_pose_line_file(good);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].first == "seq1/frame00001.png");
  CHECK(entries[0].second.position.y == 2.0);
  CHECK(entries[0].second.rotation.w == 1.0);
  // Already-unit quaternion preserved exactly.
  CHECK(entries[1].second.rotation.w == 0.5);
  CHECK(entries[1].second.rotation.z == 0.5);

  SUBCASE("seven fields is malformed, with the line number") {
    const std::string bad =
        "h\nh\nh\nimg.png 1 2 3 1 0 0\n";
    try {
      parse_pose_line_file(bad);
      FAIL("expected MalformedFile");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MalformedFile);
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }

  SUBCASE("far-from-unit quaternion is rejected") {
    const std::string bad =
        "h\nh\nh\nimg.png 1 2 3 2 0 0 0\n";
    try {
      parse_pose_line_file(bad);
      FAIL("expected BadQuaternion");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadQuaternion);
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }

  SUBCASE("mildly rounded quaternion is normalized on ingest") {
    const std::string rounded =
        "h\nh\nh\nimg.png 0 0 0 0.99 0 0 0\n";
    const auto es = parse_pose_line_file(rounded);
    REQUIRE(es.size() == 1);
    CHECK(es[0].second.rotation.w == 1.0);
  }

  SUBCASE("missing header is malformed") {
    CHECK(code_of([] { parse_pose_line_file("only\ntwo lines\n"); }) ==
          ErrorCode::MalformedFile);
  }
}

TEST_CASE("pose-line round-trip") {
  const SceneDataset ds = synth_scene({4, 3, 2}, 20, 5, 5, 0.0, 99);
  std::vector<std::pair<std::string, Pose>> entries;
  for (const Frame& f : ds.train) entries.emplace_back(f.id, f.pose);

  const std::string text = write_pose_line_file(entries);
  const auto back = parse_pose_line_file(text);
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].first == entries[i].first);
    CHECK_NEAR(back[i].second.position.x, entries[i].second.position.x, 1e-9);
    CHECK_NEAR(back[i].second.position.y, entries[i].second.position.y, 1e-9);
    CHECK_NEAR(back[i].second.position.z, entries[i].second.position.z, 1e-9);
    CHECK_NEAR(back[i].second.rotation.w, entries[i].second.rotation.w, 1e-9);
    CHECK_NEAR(back[i].second.rotation.x, entries[i].second.rotation.x, 1e-9);
    CHECK_NEAR(back[i].second.rotation.y, entries[i].second.rotation.y, 1e-9);
    CHECK_NEAR(back[i].second.rotation.z, entries[i].second.rotation.z, 1e-9);
  }
}
