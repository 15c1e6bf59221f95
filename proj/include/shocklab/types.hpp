#pragma once

#include <Eigen/Dense>

namespace shocklab {

/// Hard cap on the number of conserved components. Keeps state vectors and
/// Jacobians on the stack so solver kernels never allocate.
inline constexpr int kMaxComponents = 8;

/// A point in state space (conserved variables), dynamic size <= kMaxComponents.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxComponents, 1>;

/// Small dense matrix (Hessians, flux Jacobians).
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxComponents>;

inline Vec state2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec state3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

inline Vec state1(double a) {
    Vec v(1);
    v << a;
    return v;
}

} // namespace shocklab
