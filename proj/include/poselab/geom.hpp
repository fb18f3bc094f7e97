#pragma once

#include <array>
#include <cmath>

namespace poselab {

// Camera convention used throughout the library: the canonical forward axis
// is +z, so a pose's viewing direction is its quaternion applied to (0,0,1).
// Synthetic scenes, parsers and the line-of-sight loss all share this choice.

/// Unit-norm tolerance for quaternions flagged as rotations.
inline constexpr double kUnitTol = 1e-9;

/// Degeneracy guard (metres): offsets at or below this are treated as zero.
inline constexpr double kEpsDelta = 1e-9;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Scalar-first quaternion (w, x, y, z).
struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline double dot(const Quaternion& a, const Quaternion& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const Quaternion& q) { return std::sqrt(dot(q, q)); }

inline Quaternion operator-(const Quaternion& a, const Quaternion& b) {
  return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}

inline Quaternion operator-(const Quaternion& q) {
  return {-q.w, -q.x, -q.y, -q.z};
}

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double& operator()(int r, int c) { return m[static_cast<size_t>(r) * 3 + c]; }
  double operator()(int r, int c) const {
    return m[static_cast<size_t>(r) * 3 + c];
  }
};

/// Camera pose: position in metres plus a rotation quaternion. Ground-truth
/// poses carry a unit rotation; predictions may be unnormalized until they
/// are evaluated.
struct Pose {
  Vec3 position;
  Quaternion rotation;
};

bool is_unit(const Quaternion& q, double tol = kUnitTol);

/// v / ||v||; raises ZeroNorm when ||v|| <= 1e-12.
Vec3 normalize(const Vec3& v);

/// q / ||q||; raises ZeroNorm when ||q|| <= 1e-12. Sign is preserved.
Quaternion normalize(const Quaternion& q);

/// Geodesic angle between two unit rotations in degrees, in [0, 180].
/// Computed as 2*acos(min(1,|q1.q2|)); invariant under sign flips.
double angular_distance_deg(const Quaternion& q1, const Quaternion& q2);

/// The canonical forward axis +z rotated by q.
Vec3 viewing_direction(const Quaternion& q);

/// Cosine of the angle between the ground-truth viewing direction and the
/// offset from the predicted to the true position, clamped to [-1, 1].
/// Returns 1 when the two positions coincide within kEpsDelta.
double line_of_sight_cos(const Pose& gt, const Vec3& predicted_position);

/// Unit quaternion for a rotation matrix, w >= 0. Raises NotARotation unless
/// m is orthonormal with determinant +1 (tolerance 1e-6).
Quaternion rotmat_to_quat(const Mat3& m);

/// Rotation matrix of a unit quaternion.
Mat3 quat_to_rotmat(const Quaternion& q);

}  // namespace poselab
