#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "poselab/geom.hpp"

namespace poselab {

/// One training or test sample: a feature vector standing in for an image,
/// its ground-truth pose, and a unique id.
struct Frame {
  std::vector<double> features;
  Pose pose;
  std::string id;
};

struct SceneDataset {
  std::string name;
  Vec3 extents;  // axis-aligned box dimensions in metres, centred on origin
  std::vector<Frame> train;
  std::vector<Frame> test;
  std::size_t feature_dim = 0;
};

/// Fixed 3D points the synthetic features are bearings to. Needs at least
/// four, not all coplanar, for pose recovery to be well-posed.
struct LandmarkSet {
  std::vector<Vec3> positions;
};

/// Raises InvalidArgument when the set has fewer than four landmarks or all
/// of them lie in one plane.
void validate(const LandmarkSet& ls);

/// Rotation whose viewing direction (+z rotated) points from `eye` to
/// `target`. Up reference is +y, falling back to +x near the poles.
/// Returns identity when the two points coincide.
Quaternion look_at_rotation(const Vec3& eye, const Vec3& target);

/// Unit bearing vectors from the camera to every landmark, expressed in the
/// camera frame (world-to-camera = transpose of the pose rotation matrix),
/// concatenated into one vector of length 3 * n_landmarks.
std::vector<double> bearing_features(const Pose& pose, const LandmarkSet& ls);

/// Deterministic synthetic scene: cameras ride a low-frequency sinusoidal
/// path through the extent box while tracking a second sinusoidal look-at
/// target; features are noisy landmark bearings. Train and test come from
/// disjoint leading/trailing trajectory segments.
SceneDataset synth_scene(const Vec3& extents, std::size_t n_train,
                         std::size_t n_test, std::size_t n_landmarks,
                         double noise_sigma, std::uint64_t seed);

/// 16 whitespace-separated reals, a row-major 4x4 homogeneous camera-to-world
/// matrix: position read from the translation column, rotation from the
/// upper-left 3x3. (Camera-to-world is assumed throughout; flip here if a
/// dataset turns out to use the inverse convention.)
Pose parse_matrix_pose_file(const std::string& text);

/// Lines of `<relative-image-path> x y z qw qx qy qz` after a 3-line header;
/// blank lines ignored. Quaternions are normalized on ingest, tolerating
/// file rounding; a norm outside [0.9, 1.1] is rejected as BadQuaternion.
/// Errors carry 1-based line numbers.
std::vector<std::pair<std::string, Pose>> parse_pose_line_file(
    const std::string& text);

/// Inverse of parse_pose_line_file, with a generic 3-line header and
/// round-trip-exact number formatting.
std::string write_pose_line_file(
    const std::vector<std::pair<std::string, Pose>>& entries);

struct SplitStats {
  Vec3 extents;  // axis-aligned bounding box of all ground-truth positions
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

SplitStats split_stats(const SceneDataset& ds);

}  // namespace poselab
