#include "shocklab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "shocklab/core.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/numerics.hpp"
#include "shocklab/systems.hpp"

namespace shocklab {

namespace {

// Two-wave flux from precomputed endpoint data. Shared by the threaded and
// serial sweeps so both produce bit-identical results.
inline void hll_from_cached(int m, const double* al, const double* ar, const double* ul,
                            const double* ur, double sl, double sr, double* out) {
    if (sl >= 0.0) {
        std::memcpy(out, al, sizeof(double) * m);
    } else if (sr <= 0.0) {
        std::memcpy(out, ar, sizeof(double) * m);
    } else {
        const double inv = 1.0 / (sr - sl);
        for (int k = 0; k < m; ++k)
            out[k] = (sr * al[k] - sl * ar[k] + sl * sr * (ur[k] - ul[k])) * inv;
    }
}

inline double hll_entropy_from_cached(double gl, double gr, double el, double er,
                                      double sl, double sr) {
    if (sl >= 0.0)
        return gl;
    if (sr <= 0.0)
        return gr;
    return (sr * gl - sl * gr + sl * sr * (er - el)) / (sr - sl);
}

struct StepWorkspace {
    // cell arrays include the two ghost cells at indices 0 and n+1
    std::vector<double> flux_cells;  // (n+2) * m
    std::vector<double> lm, lp;      // (n+2)
    std::vector<double> iface;       // (n+1) * m

    void resize(int n, int m) {
        flux_cells.resize(static_cast<std::size_t>(n + 2) * m);
        lm.resize(n + 2);
        lp.resize(n + 2);
        iface.resize(static_cast<std::size_t>(n + 1) * m);
    }
};

double do_step(Field& field, const SystemSpec& sys, const SimConfig& config,
               RunMetadata& meta, double dt_cap, bool parallel) {
    const int n = field.n;
    const int m = field.m;
    StepWorkspace ws;
    ws.resize(n, m);

    auto padded_state = [&](int j) -> Vec {
        if (j == 0)
            return field.ghost_left;
        if (j == n + 1)
            return field.ghost_right;
        return field.state(j - 1);
    };

    // kernel 1: per-cell flux and wave-speed cache (ghosts included)
    double smax = 0.0;
#pragma omp parallel for reduction(max : smax) schedule(static) if (parallel)
    for (int j = 0; j <= n + 1; ++j) {
        const Vec u = padded_state(j);
        const Vec a = sys.flux(u);
        for (int k = 0; k < m; ++k)
            ws.flux_cells[static_cast<std::size_t>(j) * m + k] = a[k];
        ws.lm[j] = sys.lambda_minus(u);
        ws.lp[j] = sys.lambda_plus(u);
        smax = std::max(smax, std::max(std::abs(ws.lm[j]), std::abs(ws.lp[j])));
    }
    if (!(smax > 0.0) || !std::isfinite(smax))
        throw BlowUp("step: wave speeds degenerate or non-finite at t = " +
                     std::to_string(field.time));

    double dt = config.cfl * field.dx / smax;
    if (dt_cap > 0.0)
        dt = std::min(dt, dt_cap);

    // conservation audit input
    std::vector<double> total_before(m, 0.0);
    {
        std::vector<NeumaierSum> acc(m);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < m; ++k)
                acc[k].add(field.cell(i)[k]);
        for (int k = 0; k < m; ++k)
            total_before[k] = acc[k].value();
    }

    // kernel 2: interface fluxes; interface i sits between padded cells i, i+1
    const double margin = config.davis_margin;
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i <= n; ++i) {
        const double sl = std::min(ws.lm[i], ws.lm[i + 1]) - margin;
        const double sr = std::max(ws.lp[i], ws.lp[i + 1]) + margin;
        const Vec ul = padded_state(i);
        const Vec ur = padded_state(i + 1);
        hll_from_cached(m, &ws.flux_cells[static_cast<std::size_t>(i) * m],
                        &ws.flux_cells[static_cast<std::size_t>(i + 1) * m], ul.data(),
                        ur.data(), sl, sr, &ws.iface[static_cast<std::size_t>(i) * m]);
    }

    // kernel 3: conservative update, vacuum flooring, closure check
    const double lambda_dt = dt / field.dx;
    long vacuum_events = 0;
    int first_bad = -1;
#pragma omp parallel for schedule(static) reduction(+ : vacuum_events) if (parallel)
    for (int i = 0; i < n; ++i) {
        double* u = field.cell(i);
        const double* fl = &ws.iface[static_cast<std::size_t>(i) * m];
        const double* fr = &ws.iface[static_cast<std::size_t>(i + 1) * m];
        for (int k = 0; k < m; ++k)
            u[k] -= lambda_dt * (fr[k] - fl[k]);
        Vec v = field.state(i);
        if (sys.apply_floor && sys.apply_floor(v)) {
            field.set_state(i, v);
            ++vacuum_events;
        }
        if (!sys.domain_closure(v)) {
#pragma omp critical
            {
                if (first_bad < 0 || i < first_bad)
                    first_bad = i;
            }
        }
    }
    if (first_bad >= 0)
        throw BlowUp("cell " + std::to_string(first_bad) + " left the domain closure at t = " +
                     std::to_string(field.time + dt));
    meta.vacuum_events += vacuum_events;

    // conservation drift: total change must equal the boundary flux imbalance
    {
        std::vector<NeumaierSum> acc(m);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < m; ++k)
                acc[k].add(field.cell(i)[k]);
        for (int k = 0; k < m; ++k) {
            const double imbalance =
                -dt / field.dx * (ws.iface[static_cast<std::size_t>(n) * m + k] - ws.iface[k]);
            const double drift = std::abs((acc[k].value() - total_before[k]) - imbalance);
            meta.max_conservation_drift = std::max(meta.max_conservation_drift, drift);
        }
    }

    // far-field guard: waves must not touch the pinned boundary cells
    const double btol = config.boundary_tol;
    const double scl = 1.0 + std::max(field.ghost_left.lpNorm<Eigen::Infinity>(),
                                      field.ghost_right.lpNorm<Eigen::Infinity>());
    if ((field.state(0) - field.ghost_left).lpNorm<Eigen::Infinity>() > btol * scl ||
        (field.state(n - 1) - field.ghost_right).lpNorm<Eigen::Infinity>() > btol * scl)
        throw BoundaryBreach("waves reached the pinned far-field cells at t = " +
                             std::to_string(field.time + dt) +
                             "; enlarge the domain or shorten the run");

    field.time += dt;
    field.last_cfl = smax * dt / field.dx;
    meta.max_cfl = std::max(meta.max_cfl, field.last_cfl);
    meta.dt_min = meta.steps == 0 ? dt : std::min(meta.dt_min, dt);
    meta.dt_max = std::max(meta.dt_max, dt);
    ++meta.steps;
    return dt;
}

Vec bumped_state(const SystemSpec& sys, const Vec& base, double rel) {
    // multiplicative density bump at fixed velocity (and internal energy)
    switch (sys.kind) {
    case SystemKind::isentropic: {
        const double rho = base[0] * (1.0 + rel);
        return state2(rho, rho * (base[1] / base[0]));
    }
    case SystemKind::full_euler: {
        const auto pr = euler_primitives(sys, base);
        return full_euler_state(pr.rho * (1.0 + rel), pr.u, pr.e);
    }
    default:
        return base + Vec::Constant(base.size(), rel);
    }
}

double cosine_bump(double x, double center, double width) {
    const double t = (x - center) / (0.5 * width);
    if (std::abs(t) >= 1.0)
        return 0.0;
    const double c = std::cos(0.5 * M_PI * t);
    return c * c;
}

} // namespace

Vec numerical_flux(const SystemSpec& sys, const Vec& u_l, const Vec& u_r, double margin) {
    const double sl = std::min(sys.lambda_minus(u_l), sys.lambda_minus(u_r)) - margin;
    const double sr = std::max(sys.lambda_plus(u_l), sys.lambda_plus(u_r)) + margin;
    const Vec al = sys.flux(u_l);
    const Vec ar = sys.flux(u_r);
    Vec out(u_l.size());
    hll_from_cached(static_cast<int>(u_l.size()), al.data(), ar.data(), u_l.data(),
                    u_r.data(), sl, sr, out.data());
    return out;
}

double numerical_entropy_flux(const SystemSpec& sys, const Vec& u_l, const Vec& u_r,
                              double margin) {
    const double sl = std::min(sys.lambda_minus(u_l), sys.lambda_minus(u_r)) - margin;
    const double sr = std::max(sys.lambda_plus(u_l), sys.lambda_plus(u_r)) + margin;
    return hll_entropy_from_cached(sys.entropy_flux(u_l), sys.entropy_flux(u_r),
                                   sys.entropy(u_l), sys.entropy(u_r), sl, sr);
}

std::pair<double, double> initial_entropy_integrals(const SystemSpec& sys,
                                                    const Field& field,
                                                    const InitSpec& init) {
    NeumaierSum left, right;
    for (int i = 0; i < field.n; ++i) {
        const double x = field.center(i);
        if (x < 0.0)
            left.add(relative_entropy(sys, field.state(i), init.u_left) * field.dx);
        else
            right.add(relative_entropy(sys, field.state(i), init.u_right) * field.dx);
    }
    return {left.value(), right.value()};
}

Field make_initial_field(const SystemSpec& sys, const SimConfig& config) {
    const InitSpec& init = config.init;
    if (config.n_cells < 4 || !(config.x_hi > config.x_lo))
        throw ConfigError("make_initial_field: bad grid parameters");
    if (!(config.x_lo < 0.0 && config.x_hi > 0.0))
        throw ConfigError("make_initial_field: the domain must contain x = 0");
    if (!(config.cfl > 0.0 && config.cfl <= 0.9))
        throw ConfigError("make_initial_field: cfl must lie in (0, 0.9]");
    if (init.u_left.size() != sys.m || init.u_right.size() != sys.m)
        throw ConfigError("make_initial_field: far-field states do not match the system size");

    Field field;
    field.n = config.n_cells;
    field.m = sys.m;
    field.x_lo = config.x_lo;
    field.x_hi = config.x_hi;
    field.dx = (config.x_hi - config.x_lo) / config.n_cells;
    field.time = 0.0;
    field.data.resize(static_cast<std::size_t>(field.n) * field.m);
    field.ghost_left = init.u_left;
    field.ghost_right = init.u_right;

    auto fill = [&](double amp_left, double amp_right, double cl, double cr) {
        for (int i = 0; i < field.n; ++i) {
            const double x = field.center(i);
            if (x < 0.0)
                field.set_state(i, bumped_state(sys, init.u_left,
                                                amp_left * cosine_bump(x, cl, init.left_width)));
            else
                field.set_state(i, bumped_state(sys, init.u_right,
                                                amp_right *
                                                    cosine_bump(x, cr, init.right_width)));
        }
    };

    if (init.kind == InitSpec::Kind::riemann) {
        fill(0.0, 0.0, init.left_center, init.right_center);
        return field;
    }

    // deterministic phase jitter
    std::uint64_t s1 = mix_seed(init.seed, 1), s2 = mix_seed(init.seed, 2);
    auto unit = [](std::uint64_t s) { return (s >> 11) * 0x1.0p-53; };
    const double cl = init.left_center + 0.1 * init.left_width * (unit(s1) - 0.5);
    const double cr = init.right_center + 0.1 * init.right_width * (unit(s2) - 0.5);
    if (cl - 0.5 * init.left_width <= config.x_lo || cl + 0.5 * init.left_width >= 0.0)
        throw ConfigError("left bump support must lie inside (x_lo, 0)");
    if (cr - 0.5 * init.right_width <= 0.0 || cr + 0.5 * init.right_width >= config.x_hi)
        throw ConfigError("right bump support must lie inside (0, x_hi)");

    const double target_l =
        init.target_left > 0.0 ? init.target_left : 0.95 * std::pow(init.eps, 4);
    const double target_r = init.target_right > 0.0 ? init.target_right : 0.95 * init.eps;

    // the integrals are monotone in the amplitudes: bisect each side
    auto solve_amp = [&](bool left_side, double target) {
        if (target <= 0.0)
            return 0.0;
        double lo = 0.0, hi = 0.5;
        auto integral = [&](double a) {
            fill(left_side ? a : 0.0, left_side ? 0.0 : a, cl, cr);
            auto [il, ir] = initial_entropy_integrals(sys, field, init);
            return left_side ? il : ir;
        };
        if (integral(hi) < target)
            throw ConfigError("perturbation amplitude bracket too small for the target");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double val = integral(mid);
            if (std::abs(val / target - 1.0) <= 0.01)
                return mid;
            (val < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    const double amp_l = solve_amp(true, target_l);
    const double amp_r = solve_amp(false, target_r);
    fill(amp_l, amp_r, cl, cr);

    auto [il, ir] = initial_entropy_integrals(sys, field, init);
    if (target_l > 0.0 && std::abs(il / target_l - 1.0) > 0.05)
        throw ConfigError("realized left entropy integral misses its target by over 5%");
    if (target_r > 0.0 && std::abs(ir / target_r - 1.0) > 0.05)
        throw ConfigError("realized right entropy integral misses its target by over 5%");
    return field;
}

double step(Field& field, const SystemSpec& sys, const SimConfig& config,
            RunMetadata& meta, double dt_cap) {
    return do_step(field, sys, config, meta, dt_cap, config.use_parallel);
}

double step_serial(Field& field, const SystemSpec& sys, const SimConfig& config,
                   RunMetadata& meta, double dt_cap) {
    return do_step(field, sys, config, meta, dt_cap, false);
}

std::vector<double> entropy_residual(const Field& before, const Field& after,
                                     const SystemSpec& sys, const SimConfig& config) {
    const int n = before.n;
    const double dt = after.time - before.time;
    if (dt <= 0.0)
        throw ConfigError("entropy_residual: fields must be one positive step apart");

    auto padded_state = [&](int j) -> Vec {
        if (j == 0)
            return before.ghost_left;
        if (j == n + 1)
            return before.ghost_right;
        return before.state(j - 1);
    };

    std::vector<double> ghat(n + 1);
#pragma omp parallel for schedule(static) if (config.use_parallel)
    for (int i = 0; i <= n; ++i)
        ghat[i] = numerical_entropy_flux(sys, padded_state(i), padded_state(i + 1),
                                         config.davis_margin);

    std::vector<double> res(n);
#pragma omp parallel for schedule(static) if (config.use_parallel)
    for (int i = 0; i < n; ++i) {
        const double de = sys.entropy(after.state(i)) - sys.entropy(before.state(i));
        res[i] = de / dt + (ghat[i + 1] - ghat[i]) / before.dx;
    }
    return res;
}

Trajectory run(const SystemSpec& sys, const SimConfig& config) {
    Trajectory out;
    Field field = make_initial_field(sys, config);

    std::vector<double> snaps = config.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    for (double t : snaps)
        if (t <= 1e-14)
            out.snapshots.push_back(field);

    const double t_end = config.t_end;
    Field before = field;
    size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= 1e-14)
        ++next_snap;

    while (field.time < t_end - 1e-14) {
        double cap = t_end - field.time;
        if (next_snap < snaps.size())
            cap = std::min(cap, snaps[next_snap] - field.time);
        before = field;
        const double dt = step(field, sys, config, out.meta, cap);

        const auto res = entropy_residual(before, field, sys, config);
        double eta_inf = 0.0;
        for (int i = 0; i < before.n; ++i)
            eta_inf = std::max(eta_inf, std::abs(sys.entropy(before.state(i))));
        const double tol = config.entropy_tol_factor * std::max(eta_inf, 1.0) / dt;
        NeumaierSum pos;
        for (double r : res) {
            if (r > tol)
                ++out.meta.entropy_violations;
            out.meta.max_entropy_residual = std::max(out.meta.max_entropy_residual, r);
            if (r > 0.0)
                pos.add(r);
        }
        out.meta.positive_entropy_total += pos.value() * field.dx * dt;

        while (next_snap < snaps.size() && field.time >= snaps[next_snap] - 1e-12) {
            out.snapshots.push_back(field);
            ++next_snap;
        }
    }
    out.final_field = field;
    return out;
}

} // namespace shocklab
