#include "shocklab/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shocklab/core.hpp"
#include "shocklab/errors.hpp"

namespace shocklab {

double velocity_functional(const SystemSpec& sys, const Vec& u,
                           const VelocityParams& params) {
    const Vec& ul = params.u_left_ref;
    if (sys.singular_set(u)) {
        // lambda_- may be undefined here; only the ratio branch applies
        return relative_flux(sys, u, ul) / relative_entropy(sys, u, ul) - params.eps;
    }
    const double eta = relative_entropy(sys, u, ul);
    if (eta < params.eta_floor) {
        // 0/0 guard: the ratio tends to a Rayleigh quotient bounded below by
        // lambda_-(u_ref), which is the value that keeps V continuous there
        return std::min(sys.lambda_minus(ul), sys.lambda_minus(u)) - params.eps;
    }
    const double ratio = relative_flux(sys, u, ul) / eta;
    return std::min(ratio, sys.lambda_minus(u)) - params.eps;
}

double windowed_velocity(const SystemSpec& sys, const Field& field, double x,
                         double window, const VelocityParams& params) {
    if (!(window > 0.0))
        throw ConfigError("windowed_velocity: window must be positive");
    if (x < field.x_lo || x + window > field.x_hi)
        throw OutOfDomain("windowed_velocity: window (" + std::to_string(x) + ", " +
                          std::to_string(x + window) + ") leaves the grid");
    const int i0 = std::clamp(field.cell_index(x), 0, field.n - 1);
    const int i1 = std::clamp(field.cell_index(x + window * (1.0 - 1e-14)), 0, field.n - 1);
    double acc = 0.0;
    for (int i = i0; i <= i1; ++i) {
        const double lo = field.x_lo + i * field.dx;
        const double overlap =
            std::min(x + window, lo + field.dx) - std::max(x, lo);
        if (overlap <= 0.0)
            continue;
        acc += overlap * velocity_functional(sys, field.state(i), params);
    }
    return acc / window;
}

std::pair<Vec, Vec> extract_traces(const Field& field, double x, int k_cells,
                                   int layer_skip) {
    if (k_cells < 1)
        throw ConfigError("extract_traces: k_cells must be at least 1");
    const int ix = field.cell_index(x);
    const int lo_left = ix - layer_skip - k_cells;
    const int hi_right = ix + layer_skip + k_cells;
    if (lo_left < 0 || hi_right >= field.n)
        throw OutOfDomain("extract_traces: trace stencil leaves the grid");
    Vec minus = Vec::Zero(field.m), plus = Vec::Zero(field.m);
    for (int j = 1; j <= k_cells; ++j) {
        minus += field.state(ix - layer_skip - j);
        plus += field.state(ix + layer_skip + j);
    }
    return {minus / k_cells, plus / k_cells};
}

ShiftPath init_shift(double x0, double window, int k_cells, int layer_skip) {
    ShiftPath path;
    path.window = window;
    path.k_cells = k_cells;
    path.layer_skip = layer_skip;
    path.t.push_back(0.0);
    path.x.push_back(x0);
    return path;
}

namespace {

void complete_pending(ShiftPath& path, const SystemSpec& sys, const Field& field,
                      const VelocityParams& params) {
    if (path.finalized() == path.size())
        return;
    const double x = path.x.back();
    const double v = windowed_velocity(sys, field, x, path.window, params);
    auto [um, up] = extract_traces(field, x, path.k_cells, path.layer_skip);
    path.v.push_back(v);
    path.u_minus.push_back(std::move(um));
    path.u_plus.push_back(std::move(up));
    path.max_windowed_speed = std::max(path.max_windowed_speed, std::abs(v));
}

} // namespace

void advance_shift(ShiftPath& path, const SystemSpec& sys, const Field& field, double dt,
                   const VelocityParams& params) {
    if (path.size() == 0)
        throw ConfigError("advance_shift: path not initialized");
    complete_pending(path, sys, field, params);
    if (dt <= 0.0)
        return;
    path.x.push_back(path.x.back() + dt * path.v.back());
    path.t.push_back(path.t.back() + dt);
}

void finalize_shift(ShiftPath& path, const SystemSpec& sys, const Field& field,
                    const VelocityParams& params) {
    complete_pending(path, sys, field, params);
}

FilippovReport filippov_check(const ShiftPath& path, const SystemSpec& sys,
                              const VelocityParams& params, double slack) {
    FilippovReport rep;
    const int n = path.finalized();
    if (n == 0)
        return rep;

    std::vector<double> v_minus(n), v_plus(n);
    for (int k = 0; k < n; ++k) {
        v_minus[k] = velocity_functional(sys, path.u_minus[k], params);
        v_plus[k] = velocity_functional(sys, path.u_plus[k], params);
    }

    if (slack < 0.0) {
        double lip = 0.0;
        for (int k = 0; k + 1 < n; ++k) {
            const double dxk = std::max(std::abs(path.x[k + 1] - path.x[k]), 1e-12);
            lip = std::max(lip, std::abs(v_minus[k + 1] - v_minus[k]) / dxk);
            lip = std::max(lip, std::abs(v_plus[k + 1] - v_plus[k]) / dxk);
        }
        double spread = 0.0;
        for (int k = 0; k < n; ++k)
            spread = std::max(spread, std::abs(v_plus[k] - v_minus[k]));
        slack = std::min(path.window * lip, spread) + 1e-6;
    }
    rep.slack = slack;

    for (int k = 0; k < n; ++k) {
        const double vmax = std::max(v_minus[k], v_plus[k]);
        const bool singular =
            sys.singular_set(path.u_minus[k]) || sys.singular_set(path.u_plus[k]);
        const double vmin = singular ? -std::numeric_limits<double>::infinity()
                                     : std::min(v_minus[k], v_plus[k]);
        rep.vmin.push_back(vmin);
        rep.vmax.push_back(vmax);
        ++rep.samples;
        if (path.v[k] > vmax + slack || path.v[k] < vmin - slack)
            ++rep.violations;
    }
    rep.violation_fraction = static_cast<double>(rep.violations) / rep.samples;
    return rep;
}

TraceJumpAudit trace_jump_audit(const ShiftPath& path, const SystemSpec& sys,
                                double jump_tol, double t_min) {
    TraceJumpAudit audit;
    const int n = path.finalized();
    audit.rh_vs_xprime.assign(n, std::numeric_limits<double>::quiet_NaN());
    double sum_x = 0.0, sum_s = 0.0;

    for (int k = 0; k < n; ++k) {
        if (path.t[k] < t_min)
            continue;
        const Vec& um = path.u_minus[k];
        const Vec& up = path.u_plus[k];
        const Vec du = up - um;
        const double jump = du.lpNorm<Eigen::Infinity>();
        if (jump <= jump_tol)
            continue; // continuity sample

        const Vec da = sys.flux(up) - sys.flux(um);
        const double sigma_tr = du.dot(da) / du.squaredNorm();
        const double rh_x = (da - path.v[k] * du).lpNorm<Eigen::Infinity>() / jump;
        const double rh_s = (da - sigma_tr * du).lpNorm<Eigen::Infinity>() / jump;
        audit.rh_vs_xprime[k] = rh_x;

        const double dg = sys.entropy_flux(up) - sys.entropy_flux(um);
        const double de = sys.entropy(up) - sys.entropy(um);
        audit.max_entropy_excess_vs_xprime =
            std::max(audit.max_entropy_excess_vs_xprime, dg - path.v[k] * de);
        audit.max_entropy_excess_vs_sigma =
            std::max(audit.max_entropy_excess_vs_sigma, dg - sigma_tr * de);

        ++audit.jump_samples;
        sum_x += rh_x;
        sum_s += rh_s;
        audit.max_rh_vs_xprime = std::max(audit.max_rh_vs_xprime, rh_x);
        audit.max_rh_vs_sigma = std::max(audit.max_rh_vs_sigma, rh_s);
    }
    if (audit.jump_samples > 0) {
        audit.mean_rh_vs_xprime = sum_x / audit.jump_samples;
        audit.mean_rh_vs_sigma = sum_s / audit.jump_samples;
    }
    audit.max_entropy_excess_vs_sigma = std::max(audit.max_entropy_excess_vs_sigma, 0.0);
    audit.max_entropy_excess_vs_xprime = std::max(audit.max_entropy_excess_vs_xprime, 0.0);
    return audit;
}

} // namespace shocklab
