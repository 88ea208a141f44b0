#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bonnetforge/grid.hpp"

namespace bonnetforge {

// Rigid alignment of point clouds and conversion between rotation matrices
// and unit quaternions. Sandwich convention throughout: the rotation taking
// p to conj(q) p q has matrix R with R p = that image, for unit q.

/// Unit quaternion q with conj(q) p q = R p for all imaginary p. R must be a
/// proper rotation. The branch with the largest diagonal-based discriminant
/// keeps the extraction stable for all rotation angles; the sign of q is the
/// one with nonnegative scalar part.
inline Quat quat_from_rotation(const Eigen::Matrix3d& R) {
    // For q = w + xi + yj + zk acting as p -> conj(q) p q:
    //   trace R = 3w^2 - (x^2+y^2+z^2) = 4w^2 - 1, and
    //   R(2,1) - R(1,2) = -4 w x  (likewise cyclic), off-diagonal sums give xy etc.
    const double t = R.trace();
    double w, x, y, z;
    if (t >= R(0, 0) && t >= R(1, 1) && t >= R(2, 2)) {
        const double s = std::sqrt(1.0 + t) * 2.0;  // 4w
        w = 0.25 * s;
        x = (R(1, 2) - R(2, 1)) / s;
        y = (R(2, 0) - R(0, 2)) / s;
        z = (R(0, 1) - R(1, 0)) / s;
    } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
        const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;  // 4x
        w = (R(1, 2) - R(2, 1)) / s;
        x = 0.25 * s;
        y = (R(0, 1) + R(1, 0)) / s;
        z = (R(2, 0) + R(0, 2)) / s;
    } else if (R(1, 1) >= R(2, 2)) {
        const double s = std::sqrt(1.0 - R(0, 0) + R(1, 1) - R(2, 2)) * 2.0;  // 4y
        w = (R(2, 0) - R(0, 2)) / s;
        x = (R(0, 1) + R(1, 0)) / s;
        y = 0.25 * s;
        z = (R(1, 2) + R(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 - R(0, 0) - R(1, 1) + R(2, 2)) * 2.0;  // 4z
        w = (R(0, 1) - R(1, 0)) / s;
        x = (R(2, 0) + R(0, 2)) / s;
        y = (R(1, 2) + R(2, 1)) / s;
        z = 0.25 * s;
    }
    Quat q(w, x, y, z);
    if (q.w < 0.0) q = q * -1.0;
    return normalized(q);
}

/// Matrix of p -> conj(q) p q for unit q, acting on column vectors.
inline Eigen::Matrix3d rotation_from_quat(const Quat& q) {
    const Quat u = normalized(q);
    Eigen::Matrix3d R;
    const ImQuat cols[3] = {sandwich(u, ImQuat{1, 0, 0}), sandwich(u, ImQuat{0, 1, 0}),
                            sandwich(u, ImQuat{0, 0, 1})};
    for (int c = 0; c < 3; ++c) {
        R(0, c) = cols[c].x;
        R(1, c) = cols[c].y;
        R(2, c) = cols[c].z;
    }
    return R;
}

struct Alignment {
    Quat rotation;       // unit quaternion, dst ~ conj(rotation) (src - src_mean) rotation + translation
    ImQuat translation;
    double rms = 0.0;    // root mean square residual after alignment
};

/// Least-squares rigid fit (proper rotations only) of one point field onto
/// another over the same grid, via the 4x4 quaternion eigenproblem. The
/// returned rms is the remaining distance, zero iff the clouds are congruent.
inline Alignment align_rigid(const QuatField& src, const QuatField& dst) {
    require_same_grid(src.grid, dst.grid, "align_rigid");
    const std::size_t n = src.values.size();
    ImQuat mean_a{0, 0, 0}, mean_b{0, 0, 0};
    for (std::size_t s = 0; s < n; ++s) {
        mean_a = mean_a + src.values[s].imag();
        mean_b = mean_b + dst.values[s].imag();
    }
    mean_a = mean_a * (1.0 / static_cast<double>(n));
    mean_b = mean_b * (1.0 / static_cast<double>(n));

    Eigen::Matrix3d S = Eigen::Matrix3d::Zero();  // cross-covariance sum a b^T
    for (std::size_t s = 0; s < n; ++s) {
        const ImQuat a = src.values[s].imag() - mean_a;
        const ImQuat b = dst.values[s].imag() - mean_b;
        const double av[3] = {a.x, a.y, a.z};
        const double bv[3] = {b.x, b.y, b.z};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) S(r, c) += av[r] * bv[c];
    }

    Eigen::Matrix4d M;
    M << S(0, 0) + S(1, 1) + S(2, 2), S(1, 2) - S(2, 1), S(2, 0) - S(0, 2), S(0, 1) - S(1, 0),
        S(1, 2) - S(2, 1), S(0, 0) - S(1, 1) - S(2, 2), S(0, 1) + S(1, 0), S(2, 0) + S(0, 2),
        S(2, 0) - S(0, 2), S(0, 1) + S(1, 0), -S(0, 0) + S(1, 1) - S(2, 2), S(1, 2) + S(2, 1),
        S(0, 1) - S(1, 0), S(2, 0) + S(0, 2), S(1, 2) + S(2, 1), -S(0, 0) - S(1, 1) + S(2, 2);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(M);
    const Eigen::Vector4d v = eig.eigenvectors().col(3);  // largest eigenvalue
    // The eigenvector holds the rotation b = R a in matrix convention; the
    // sandwich p -> conj(q) p q with q = (w, -x, -y, -z) realizes the same map.
    Quat q(v(0), -v(1), -v(2), -v(3));
    if (q.w < 0.0) q = q * -1.0;
    q = normalized(q);

    const ImQuat rot_mean = sandwich(q, mean_a);
    Alignment out{q, mean_b - rot_mean, 0.0};
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const ImQuat mapped = sandwich(q, src.values[s].imag()) + out.translation;
        const ImQuat gap = mapped - dst.values[s].imag();
        acc += gap.norm2();
    }
    out.rms = std::sqrt(acc / static_cast<double>(n));
    return out;
}

/// RMS distance between two point fields after the best rigid alignment.
inline double congruence_distance(const QuatField& f, const QuatField& g) {
    return align_rigid(f, g).rms;
}

}  // namespace bonnetforge
