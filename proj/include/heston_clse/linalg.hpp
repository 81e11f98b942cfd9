#pragma once

#include <Eigen/Dense>

namespace heston_clse {

// Row-major dense storage. Parameter vectors are ordered (c, d, gamma, delta)
// on the transformed side and (a, b, alpha, beta) on the original side.
using Matrix2 = Eigen::Matrix<double, 2, 2, Eigen::RowMajor>;
using Matrix4 = Eigen::Matrix<double, 4, 4, Eigen::RowMajor>;
using Vector2 = Eigen::Vector2d;
using Vector4 = Eigen::Vector4d;

inline Matrix4 kron(const Matrix2& lhs, const Matrix2& rhs) {
    Matrix4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = lhs(i, j) * rhs;
    return out;
}

inline Matrix4 symmetrize(const Matrix4& m) { return 0.5 * (m + m.transpose()); }

}  // namespace heston_clse
