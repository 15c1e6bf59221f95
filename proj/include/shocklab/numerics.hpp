#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "shocklab/types.hpp"

namespace shocklab {

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance.
/// Throws QuadratureFailure when the refinement depth limit is exceeded.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-9, int depth_limit = 30);

/// Component-wise central-difference step: max(floor, floor * |x|).
double fd_step(double x, double floor_scale = 1e-6);

/// Central-difference gradient of a scalar function of a state.
Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& u,
                     double step_scale = 1e-6);

/// Central-difference Jacobian of a vector function of a state (rows = outputs).
Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& u,
                     double step_scale = 1e-6);

/// Central-difference derivative of a scalar function of a scalar.
double central_derivative(const std::function<double(double)>& f, double x,
                          double step);

/// Compensated (Neumaier) summation; used for conservation audits and
/// grid integrals so results do not depend on the reduction order.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Monotone cubic interpolant (Fritsch-Carlson tangents) through strictly
/// increasing nodes. C1; second derivatives are taken per segment.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    int segment(double x) const;
    std::vector<double> x_, y_, d_;
};

/// Deterministic 64-bit mix for seeding per-purpose RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace shocklab
