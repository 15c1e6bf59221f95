#include "shocklab/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "shocklab/errors.hpp"

namespace shocklab {

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_recurse(const std::function<double(double)>& f, double a, double fa,
                        double b, double fb, double m, double fm, double whole,
                        double tol, int depth) {
    if (depth <= 0)
        throw QuadratureFailure("adaptive Simpson exceeded depth limit");
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int depth_limit) {
    if (a == b)
        return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return adaptive_recurse(f, a, fa, b, fb, m, fm, whole, abs_tol, depth_limit);
}

double fd_step(double x, double floor_scale) {
    return std::max(floor_scale, floor_scale * std::abs(x));
}

Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& u,
                     double step_scale) {
    const int m = static_cast<int>(u.size());
    Vec g(m);
    Vec up = u, um = u;
    for (int k = 0; k < m; ++k) {
        const double h = fd_step(u[k], step_scale);
        up[k] = u[k] + h;
        um[k] = u[k] - h;
        g[k] = (f(up) - f(um)) / (2.0 * h);
        up[k] = u[k];
        um[k] = u[k];
    }
    return g;
}

Mat central_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& u,
                     double step_scale) {
    const int m = static_cast<int>(u.size());
    Vec up = u, um = u;
    Mat jac;
    for (int k = 0; k < m; ++k) {
        const double h = fd_step(u[k], step_scale);
        up[k] = u[k] + h;
        um[k] = u[k] - h;
        const Vec col = (f(up) - f(um)) / (2.0 * h);
        if (k == 0)
            jac.resize(col.size(), m);
        jac.col(k) = col;
        up[k] = u[k];
        um[k] = u[k];
    }
    return jac;
}

double central_derivative(const std::function<double(double)>& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 2 || y_.size() != x_.size())
        throw DegenerateInput("monotone cubic needs at least two nodes");
    for (int i = 0; i + 1 < n; ++i)
        if (!(x_[i] < x_[i + 1]))
            throw DegenerateInput("monotone cubic nodes must be strictly increasing");

    std::vector<double> h(n - 1), s(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    d_[0] = s[0];
    d_[n - 1] = s[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            // Fritsch-Carlson weighted harmonic mean keeps the interpolant monotone.
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
}

int MonotoneCubic::segment(double x) const {
    const int n = static_cast<int>(x_.size());
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(i, 0, n - 2);
}

double MonotoneCubic::operator()(double x) const {
    const int i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    const int i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double g00 = 6 * t * t - 6 * t;
    const double g10 = 3 * t * t - 4 * t + 1;
    const double g01 = -6 * t * t + 6 * t;
    const double g11 = 3 * t * t - 2 * t;
    return (g00 * y_[i] + g01 * y_[i + 1]) / h + g10 * d_[i] + g11 * d_[i + 1];
}

double MonotoneCubic::second_derivative(double x) const {
    const int i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double k00 = 12 * t - 6;
    const double k10 = 6 * t - 4;
    const double k01 = -12 * t + 6;
    const double k11 = 6 * t - 2;
    return (k00 * y_[i] + k01 * y_[i + 1]) / (h * h) + (k10 * d_[i] + k11 * d_[i + 1]) / h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace shocklab
