#include "poselab/geom.hpp"

#include <algorithm>
#include <cmath>

#include "poselab/error.hpp"

namespace poselab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kRotTol = 1e-6;

void require_unit(const Quaternion& q, const char* where) {
  if (!is_unit(q)) {
    raise(ErrorCode::NotUnit,
          std::string(where) + ": quaternion norm deviates from 1 by more than 1e-9");
  }
}

}  // namespace

bool is_unit(const Quaternion& q, double tol) {
  return std::abs(norm(q) - 1.0) <= tol;
}

Vec3 normalize(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 1e-12)) {
    raise(ErrorCode::ZeroNorm, "cannot normalize a near-zero vector");
  }
  return {v.x / n, v.y / n, v.z / n};
}

Quaternion normalize(const Quaternion& q) {
  const double n = norm(q);
  if (!(n > 1e-12)) {
    raise(ErrorCode::ZeroNorm, "cannot normalize a near-zero quaternion");
  }
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

double angular_distance_deg(const Quaternion& q1, const Quaternion& q2) {
  require_unit(q1, "angular_distance_deg");
  require_unit(q2, "angular_distance_deg");
  const double d = std::abs(dot(q1, q2));
  // Dots within 1e-12 of 1 are normalization residue, not rotation; snap so
  // that the distance between a quaternion and its negation is exactly zero.
  if (d >= 1.0 - 1e-12) return 0.0;
  return 2.0 * std::acos(d) * 180.0 / kPi;
}

Vec3 viewing_direction(const Quaternion& q) {
  require_unit(q, "viewing_direction");
  // Third column of the rotation matrix, i.e. q (0,0,1) q*.
  return {2.0 * (q.x * q.z + q.w * q.y), 2.0 * (q.y * q.z - q.w * q.x),
          1.0 - 2.0 * (q.x * q.x + q.y * q.y)};
}

double line_of_sight_cos(const Pose& gt, const Vec3& predicted_position) {
  const Vec3 v = viewing_direction(gt.rotation);
  const Vec3 delta = gt.position - predicted_position;
  const double nd = norm(delta);
  if (nd <= kEpsDelta) return 1.0;
  const double c = dot(v, delta) / (norm(v) * nd);
  return std::clamp(c, -1.0, 1.0);
}

Quaternion rotmat_to_quat(const Mat3& m) {
  // Orthonormality: M M^T = I.
  double max_dev = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m(r, k) * m(c, k);
      max_dev = std::max(max_dev, std::abs(s - (r == c ? 1.0 : 0.0)));
    }
  }
  const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                     m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                     m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  if (max_dev > kRotTol || std::abs(det - 1.0) > kRotTol) {
    raise(ErrorCode::NotARotation,
          "matrix is not orthonormal with determinant +1 within 1e-6");
  }

  // Shepperd's method: branch on the largest of trace and diagonal entries.
  Quaternion q;
  const double tr = m(0, 0) + m(1, 1) + m(2, 2);
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;  // 4w
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;  // 4x
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    const double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;  // 4y
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;  // 4z
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  q = normalize(q);
  if (q.w < 0.0) q = -q;  // canonical sign
  return q;
}

Mat3 quat_to_rotmat(const Quaternion& q) {
  require_unit(q, "quat_to_rotmat");
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r(0, 0) = 1.0 - 2.0 * (y * y + z * z);
  r(0, 1) = 2.0 * (x * y - w * z);
  r(0, 2) = 2.0 * (x * z + w * y);
  r(1, 0) = 2.0 * (x * y + w * z);
  r(1, 1) = 1.0 - 2.0 * (x * x + z * z);
  r(1, 2) = 2.0 * (y * z - w * x);
  r(2, 0) = 2.0 * (x * z - w * y);
  r(2, 1) = 2.0 * (y * z + w * x);
  r(2, 2) = 1.0 - 2.0 * (x * x + y * y);
  return r;
}

}  // namespace poselab
