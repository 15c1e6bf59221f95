#include "shocklab/lab.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "config_internal.hpp"
#include "shocklab/core.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/numerics.hpp"
#include "shocklab/systems.hpp"

namespace shocklab {

namespace {

// relative entropy against a fixed reference, one entropy callback per state
struct FixedReference {
    double eta0 = 0.0;
    double gflux0 = 0.0;
    Vec grad0, flux0, ref;

    FixedReference() = default;
    FixedReference(const SystemSpec& sys, const Vec& v)
        : eta0(sys.entropy(v)), gflux0(sys.entropy_flux(v)), grad0(grad_eta_of(sys, v)),
          flux0(sys.flux(v)), ref(v) {}

    double rel_entropy(double eta_u, const Vec& u) const {
        return eta_u - eta0 - grad0.dot(u - ref);
    }
    double rel_flux(const SystemSpec& sys, const Vec& u) const {
        return sys.entropy_flux(u) - gflux0 - grad0.dot(sys.flux(u) - flux0);
    }
};

struct ShockEndpoints {
    Vec u_left, u_right;
    double sigma = 0.0;
};

ShockEndpoints resolve_shock(const ExperimentConfig& config) {
    auto curve = make_shock_curve(config.sys, config.shock.base, config.shock.family);
    if (!(config.shock.s > 0.0) || config.shock.s > curve->s_max())
        throw ConfigError("shock spec: s = " + std::to_string(config.shock.s) +
                          " outside the curve range (0, " + std::to_string(curve->s_max()) +
                          "]");
    ShockEndpoints ep;
    const Vec endpoint = curve->state(config.shock.s);
    ep.sigma = curve->speed(config.shock.s);
    if (config.shock.family == Family::one_family) {
        ep.u_left = config.shock.base;
        ep.u_right = endpoint;
    } else {
        ep.u_left = endpoint;
        ep.u_right = config.shock.base;
    }
    auto cls = classify_discontinuity(config.sys, ep.u_left, ep.u_right);
    const double scale = 1.0 + std::abs(cls.sigma);
    if (cls.entropy_production > 1e-10 * scale)
        throw ConfigError("shock spec resolves to an entropy-violating discontinuity");
    return ep;
}

} // namespace

ExperimentConfig mirror_config(const ExperimentConfig& config) {
    ExperimentConfig out = config;
    out.sys = mirror_system(config.sys);
    out.shock.family = config.shock.family == Family::one_family ? Family::n_family
                                                                 : Family::one_family;
    out.x_lo = -config.x_hi;
    out.x_hi = -config.x_lo;
    out.left_center = -config.right_center;
    out.left_width = config.right_width;
    out.right_center = -config.left_center;
    out.right_width = config.left_width;
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.shock.family == Family::n_family)
        return mirror_experiment(config);

    const SystemSpec& sys = config.sys;
    const auto ep = resolve_shock(config);

    SimConfig sim;
    sim.n_cells = config.n_cells;
    sim.x_lo = config.x_lo;
    sim.x_hi = config.x_hi;
    sim.cfl = config.cfl;
    sim.t_end = config.t_end;
    sim.davis_margin = config.davis_margin;
    sim.use_parallel = config.use_parallel;
    sim.init.kind = config.init_kind;
    sim.init.u_left = ep.u_left;
    sim.init.u_right = ep.u_right;
    sim.init.eps = config.eps;
    sim.init.seed = config.seed;
    sim.init.left_center = config.left_center;
    sim.init.left_width = config.left_width;
    sim.init.right_center = config.right_center;
    sim.init.right_width = config.right_width;

    Field field = make_initial_field(sys, sim);

    ExperimentResult res;
    res.u_left = ep.u_left;
    res.u_right = ep.u_right;
    res.sigma = ep.sigma;
    res.window = std::max({config.window_cells * field.dx,
                           config.eps * (config.x_hi - config.x_lo) / 100.0,
                           config.window_abs});

    VelocityParams vp;
    vp.eps = config.eps;
    vp.eta_floor = config.eta_floor;
    vp.u_left_ref = ep.u_left;

    // the path stands off up to one window left of the jump and the captured
    // layer spans about a dozen cells beyond it, so the trace stencil clears
    // both; the effective value is echoed in the report
    const int skip_eff =
        config.layer_skip + static_cast<int>(std::ceil(res.window / field.dx)) + 9;
    ShiftPath path = init_shift(config.x0_offset_windows * res.window, res.window,
                                config.k_cells, skip_eff);

    const FixedReference ref_l(sys, ep.u_left);
    const FixedReference ref_r(sys, ep.u_right);

    EntropyLedger& led = res.ledger;
    led.eps = config.eps;
    led.sigma = ep.sigma;

    std::vector<double> cell_eta(field.n);
    auto record = [&](const Field& f, int k) {
        const double xk = path.x[k];
#pragma omp parallel for schedule(static) if (config.use_parallel)
        for (int i = 0; i < f.n; ++i)
            cell_eta[i] = sys.entropy(f.state(i));
        NeumaierSum left, right;
        for (int i = 0; i < f.n; ++i) {
            const double lo = f.x_lo + i * f.dx;
            const double frac = std::clamp((xk - lo) / f.dx, 0.0, 1.0);
            const Vec u = f.state(i);
            if (frac > 0.0)
                left.add(ref_l.rel_entropy(cell_eta[i], u) * f.dx * frac);
            if (frac < 1.0)
                right.add(ref_r.rel_entropy(cell_eta[i], u) * f.dx * (1.0 - frac));
        }
        const Vec& um = path.u_minus[k];
        const Vec& up = path.u_plus[k];
        const double eta_m = ref_l.rel_entropy(sys.entropy(um), um);
        const double eta_p = ref_r.rel_entropy(sys.entropy(up), up);
        led.times.push_back(path.t[k]);
        led.x.push_back(xk);
        led.x_prime.push_back(path.v[k]);
        led.e_left.push_back(left.value());
        led.e_right.push_back(right.value());
        led.diss_left.push_back(-ref_l.rel_flux(sys, um) + path.v[k] * eta_m);
        led.diss_right.push_back(ref_r.rel_flux(sys, up) - path.v[k] * eta_p);
        led.eta_minus.push_back(eta_m);
        led.eta_plus.push_back(eta_p);
        led.drift.push_back(xk - ep.sigma * path.t[k]);
    };

    std::vector<double> snaps = config.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    size_t next_snap = 0;
    std::vector<double> latest_residuals(field.n, 0.0);
    while (next_snap < snaps.size() && snaps[next_snap] <= 1e-14) {
        res.snapshots.push_back(field);
        res.snapshot_residuals.push_back(latest_residuals);
        ++next_snap;
    }

    Field before = field;
    while (field.time < config.t_end - 1e-14) {
        double cap = config.t_end - field.time;
        if (next_snap < snaps.size())
            cap = std::min(cap, snaps[next_snap] - field.time);
        before = field;
        const double dt = step(field, sys, sim, res.meta, cap);
        advance_shift(path, sys, before, dt, vp);
        record(before, path.finalized() - 1);

        latest_residuals = entropy_residual(before, field, sys, sim);
        double eta_inf = 0.0;
        for (int i = 0; i < before.n; ++i)
            eta_inf = std::max(eta_inf, std::abs(cell_eta[i]));
        const double tol = sim.entropy_tol_factor * std::max(eta_inf, 1.0) / dt;
        NeumaierSum pos;
        for (double r : latest_residuals) {
            if (r > tol)
                ++res.meta.entropy_violations;
            res.meta.max_entropy_residual = std::max(res.meta.max_entropy_residual, r);
            if (r > 0.0)
                pos.add(r);
        }
        res.meta.positive_entropy_total += pos.value() * field.dx * dt;

        while (next_snap < snaps.size() && field.time >= snaps[next_snap] - 1e-12) {
            res.snapshots.push_back(field);
            res.snapshot_residuals.push_back(latest_residuals);
            ++next_snap;
        }
    }
    finalize_shift(path, sys, field, vp);
    record(field, path.finalized() - 1);

    const double eps2 = config.eps * config.eps;
    NeumaierSum bad;
    for (size_t k = 0; k + 1 < led.times.size(); ++k)
        if (led.eta_minus[k] >= eps2)
            bad.add(led.times[k + 1] - led.times[k]);
    led.bad_set_measure = bad.value();

    res.filippov = filippov_check(path, sys, vp);
    const double jump_tol = 0.1 * (ep.u_right - ep.u_left).lpNorm<Eigen::Infinity>();
    res.jump_audit = trace_jump_audit(path, sys, jump_tol, 0.05 * config.t_end);
    res.path = std::move(path);

    // eps0 estimate: sqrt(half the smallest relative entropy on the sphere
    // bounding the tracking neighborhood)
    {
        const double r = config.eps0_ball > 0.0
                             ? config.eps0_ball
                             : 0.5 * (ep.u_right - ep.u_left).norm();
        std::mt19937_64 rng(mix_seed(config.seed, 99));
        std::normal_distribution<double> gauss;
        double min_eta = std::numeric_limits<double>::infinity();
        int accepted = 0;
        for (int i = 0; i < 4000 && accepted < 256; ++i) {
            Vec d(sys.m);
            for (int k = 0; k < sys.m; ++k)
                d[k] = gauss(rng);
            const Vec u = ep.u_left + d * (r / std::max(d.norm(), 1e-12));
            if (!sys.domain_closure(u))
                continue;
            try {
                min_eta = std::min(min_eta, relative_entropy(sys, u, ep.u_left));
                ++accepted;
            } catch (const DomainError&) {
            }
        }
        res.eps0_estimate = accepted > 0 ? std::sqrt(0.5 * min_eta) : 0.0;
    }

    const double eta_scale =
        std::max(relative_entropy(sys, ep.u_right, ep.u_left),
                 relative_entropy(sys, ep.u_left, ep.u_right));
    res.ledger_rate_tol = 10.0 * field.dx * std::max(eta_scale, 1e-300);
    return res;
}

namespace {

Field mirror_field(const Field& f) {
    Field out = f;
    out.x_lo = -f.x_hi;
    out.x_hi = -f.x_lo;
    out.ghost_left = f.ghost_right;
    out.ghost_right = f.ghost_left;
    for (int i = 0; i < f.n; ++i)
        out.set_state(i, f.state(f.n - 1 - i));
    return out;
}

} // namespace

ExperimentResult mirror_experiment(const ExperimentConfig& config) {
    if (config.shock.family != Family::n_family)
        throw ConfigError("mirror_experiment expects an n-family shock spec");

    ExperimentResult m = run_experiment(mirror_config(config));

    ExperimentResult res;
    res.meta = m.meta;
    res.window = m.window;
    res.eps0_estimate = m.eps0_estimate;
    res.ledger_rate_tol = m.ledger_rate_tol;
    res.u_left = m.u_right;
    res.u_right = m.u_left;
    res.sigma = -m.sigma;

    EntropyLedger& led = res.ledger;
    led.eps = m.ledger.eps;
    led.sigma = -m.ledger.sigma;
    led.times = m.ledger.times;
    led.e_left = m.ledger.e_right;
    led.e_right = m.ledger.e_left;
    led.diss_left = m.ledger.diss_right;
    led.diss_right = m.ledger.diss_left;
    led.eta_minus = m.ledger.eta_plus;
    led.eta_plus = m.ledger.eta_minus;
    led.bad_set_measure = m.ledger.bad_set_measure;
    for (size_t k = 0; k < m.ledger.times.size(); ++k) {
        led.x.push_back(-m.ledger.x[k]);
        led.x_prime.push_back(-m.ledger.x_prime[k]);
        led.drift.push_back(-m.ledger.drift[k]);
    }

    res.path = m.path;
    for (int k = 0; k < m.path.size(); ++k)
        res.path.x[k] = -m.path.x[k];
    for (int k = 0; k < m.path.finalized(); ++k) {
        res.path.v[k] = -m.path.v[k];
        res.path.u_minus[k] = m.path.u_plus[k];
        res.path.u_plus[k] = m.path.u_minus[k];
    }

    for (const Field& f : m.snapshots)
        res.snapshots.push_back(mirror_field(f));
    for (const auto& r : m.snapshot_residuals) {
        std::vector<double> rev(r.rbegin(), r.rend());
        res.snapshot_residuals.push_back(std::move(rev));
    }

    // the sandwich and jump audits are meaningful in the tracking frame;
    // they are reported as computed there
    res.filippov = m.filippov;
    res.jump_audit = m.jump_audit;
    return res;
}

StabilityReport stability_report(const EntropyLedger& ledger, double eps, double sigma,
                                 const StabilityThresholds& thresholds) {
    StabilityReport rep;
    rep.eps = eps;
    rep.sigma = sigma;
    const size_t n = ledger.times.size();
    if (n == 0)
        return rep;

    for (size_t k = 0; k + 1 < n; ++k) {
        const double dt = ledger.times[k + 1] - ledger.times[k];
        if (dt <= 0.0)
            continue;
        const double rate = (ledger.e_left[k + 1] - ledger.e_left[k]) / dt;
        rep.left_monotone_violation = std::max(rep.left_monotone_violation, rate);
    }
    rep.left_monotone_violation = std::max(rep.left_monotone_violation, 0.0);
    rep.max_e_left = *std::max_element(ledger.e_left.begin(), ledger.e_left.end());

    const double t_end = ledger.times.back();
    const double t0 = 0.1 * t_end;
    double num_r = 0.0, den_r = 0.0, num_d = 0.0, den_d = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double t = ledger.times[k];
        if (t < t0)
            continue;
        const double g_r = eps * (1.0 + t);
        num_r += ledger.e_right[k] * g_r;
        den_r += g_r * g_r;
        const double g_d = std::sqrt(eps * t * (1.0 + t));
        if (g_d > 0.0) {
            num_d += std::abs(ledger.drift[k]) * g_d;
            den_d += g_d * g_d;
        }
    }
    rep.right_growth_fit = den_r > 0.0 ? num_r / den_r : 0.0;
    rep.drift_fit = den_d > 0.0 ? num_d / den_d : 0.0;
    rep.bad_set_ratio = eps > 0.0 ? ledger.bad_set_measure / eps : 0.0;

    rep.left_ok = rep.left_monotone_violation <= thresholds.left_increment_rate &&
                  (thresholds.left_cap <= 0.0 || rep.max_e_left <= thresholds.left_cap);
    rep.bad_set_ok = rep.bad_set_ratio <= thresholds.bad_set_cap_ratio;
    rep.fits_finite = std::isfinite(rep.right_growth_fit) && std::isfinite(rep.drift_fit) &&
                      std::isfinite(rep.left_monotone_violation);
    return rep;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_ledger_csv(const std::string& path, const EntropyLedger& ledger) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open '" + path + "' for writing");
    out << "t,e_left,e_right,diss_left,diss_right,eta_minus,eta_plus,x,x_prime,drift\n";
    for (size_t k = 0; k < ledger.times.size(); ++k) {
        out << fmt17(ledger.times[k]) << ',' << fmt17(ledger.e_left[k]) << ','
            << fmt17(ledger.e_right[k]) << ',' << fmt17(ledger.diss_left[k]) << ','
            << fmt17(ledger.diss_right[k]) << ',' << fmt17(ledger.eta_minus[k]) << ','
            << fmt17(ledger.eta_plus[k]) << ',' << fmt17(ledger.x[k]) << ','
            << fmt17(ledger.x_prime[k]) << ',' << fmt17(ledger.drift[k]) << '\n';
    }
}

void write_path_csv(const std::string& path, const ShiftPath& shift,
                    const FilippovReport& fil, const TraceJumpAudit& audit) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open '" + path + "' for writing");
    const int m = shift.u_minus.empty() ? 0 : static_cast<int>(shift.u_minus[0].size());
    out << "t,x,x_prime";
    for (int k = 0; k < m; ++k)
        out << ",u_minus_" << k;
    for (int k = 0; k < m; ++k)
        out << ",u_plus_" << k;
    out << ",rh_residual,vmin,vmax\n";
    for (int k = 0; k < shift.finalized(); ++k) {
        out << fmt17(shift.t[k]) << ',' << fmt17(shift.x[k]) << ',' << fmt17(shift.v[k]);
        for (int c = 0; c < m; ++c)
            out << ',' << fmt17(shift.u_minus[k][c]);
        for (int c = 0; c < m; ++c)
            out << ',' << fmt17(shift.u_plus[k][c]);
        const double rh =
            k < static_cast<int>(audit.rh_vs_xprime.size()) ? audit.rh_vs_xprime[k] : 0.0;
        out << ',' << fmt17(rh) << ',' << fmt17(fil.vmin[k]) << ',' << fmt17(fil.vmax[k])
            << '\n';
    }
}

void write_snapshot_csv(const std::string& path, const SystemSpec& sys, const Field& field,
                        const std::vector<double>& entropy_residuals) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open '" + path + "' for writing");
    out << "x";
    for (int k = 0; k < field.m; ++k)
        out << ",u_" << k;
    out << ",eta,entropy_residual\n";
    for (int i = 0; i < field.n; ++i) {
        out << fmt17(field.center(i));
        for (int k = 0; k < field.m; ++k)
            out << ',' << fmt17(field.cell(i)[k]);
        double eta;
        try {
            eta = sys.entropy(field.state(i));
        } catch (const DomainError&) {
            eta = std::numeric_limits<double>::quiet_NaN();
        }
        const double r = i < static_cast<int>(entropy_residuals.size())
                             ? entropy_residuals[i]
                             : 0.0;
        out << ',' << fmt17(eta) << ',' << fmt17(r) << '\n';
    }
}

void write_report_json(const std::string& path, const ExperimentResult& result,
                       const StabilityReport& report, const ExperimentConfig& config) {
    nlohmann::json j;
    j["eps"] = report.eps;
    j["sigma"] = report.sigma;
    j["eps0_estimate"] = result.eps0_estimate;
    j["window"] = result.window;
    j["ledger_rate_tol"] = result.ledger_rate_tol;
    j["fits"] = {{"left_monotone_violation", report.left_monotone_violation},
                 {"max_e_left", report.max_e_left},
                 {"right_growth_fit", report.right_growth_fit},
                 {"bad_set_ratio", report.bad_set_ratio},
                 {"drift_fit", report.drift_fit}};
    j["flags"] = {{"left_ok", report.left_ok},
                  {"bad_set_ok", report.bad_set_ok},
                  {"fits_finite", report.fits_finite}};
    j["filippov"] = {{"violation_fraction", result.filippov.violation_fraction},
                     {"slack", result.filippov.slack},
                     {"samples", result.filippov.samples}};
    j["trace_jumps"] = {{"jump_samples", result.jump_audit.jump_samples},
                        {"mean_rh_vs_xprime", result.jump_audit.mean_rh_vs_xprime},
                        {"mean_rh_vs_sigma", result.jump_audit.mean_rh_vs_sigma},
                        {"max_entropy_excess_vs_sigma",
                         result.jump_audit.max_entropy_excess_vs_sigma}};
    j["solver"] = {{"steps", result.meta.steps},
                   {"max_cfl", result.meta.max_cfl},
                   {"vacuum_events", result.meta.vacuum_events},
                   {"entropy_violations", result.meta.entropy_violations},
                   {"max_entropy_residual", result.meta.max_entropy_residual},
                   {"positive_entropy_total", result.meta.positive_entropy_total},
                   {"max_conservation_drift", result.meta.max_conservation_drift}};
    j["config"] = {{"system", config.sys.name},
                   {"family", config.shock.family == Family::one_family ? "one" : "n"},
                   {"s", config.shock.s},
                   {"n_cells", config.n_cells},
                   {"cfl", config.cfl},
                   {"t_end", config.t_end},
                   {"seed", config.seed}};
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

} // namespace shocklab

// ---------------------------------------------------------------------------
// command-line interface

namespace shocklab {

namespace {

const std::map<std::string, std::string>& builtin_presets() {
    static const std::map<std::string, std::string> presets{
        {"isentropic_g2", R"({"type":"isentropic","gamma":2,"K":10})"},
        {"isentropic_g3", R"({"type":"isentropic","gamma":3,"K":10})"},
        {"full_euler_g14", R"({"type":"full_euler","gamma":1.4,"K":10})"},
        {"isentropic_nonconvex", R"({"type":"isentropic","pressure_law":"nonconvex","K":10})"},
    };
    return presets;
}

nlohmann::json load_config_document(const std::string& spec) {
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            return nlohmann::json::parse(ss.str());
        } catch (const std::exception& e) {
            throw ConfigError("config parse error in '" + spec + "': " + e.what());
        }
    }
    auto it = builtin_presets().find(spec);
    if (it != builtin_presets().end())
        return nlohmann::json::parse(it->second);
    throw ConfigError("config '" + spec + "' is neither a file nor a bundled preset");
}

nlohmann::json system_block(const nlohmann::json& doc) {
    return doc.contains("system") ? doc.at("system") : doc;
}

Vec vec_from_json(const nlohmann::json& arr, const std::string& what) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError("'" + what + "' must be a non-empty array");
    Vec v(static_cast<int>(arr.size()));
    for (int k = 0; k < v.size(); ++k)
        v[k] = arr[k].get<double>();
    return v;
}

Vec default_base(const SystemSpec& sys) {
    switch (sys.kind) {
    case SystemKind::isentropic:
        return isentropic_state(1.0, 0.0);
    case SystemKind::full_euler:
        return full_euler_state(1.0, 0.0, 1.0);
    case SystemKind::scalar:
        return state1(1.0);
    default:
        throw ConfigError("a base state is required for generic systems");
    }
}

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    cfg.sys = detail::make_system_from_json(system_block(doc));

    const nlohmann::json shock = doc.contains("shock") ? doc.at("shock") : nlohmann::json::object();
    cfg.shock.base = shock.contains("base") ? vec_from_json(shock.at("base"), "shock.base")
                                            : default_base(cfg.sys);
    cfg.shock.s = detail::number_or(shock, "s", 1.0);
    if (shock.contains("family")) {
        const std::string f = shock.at("family").get<std::string>();
        if (f == "one" || f == "1")
            cfg.shock.family = Family::one_family;
        else if (f == "n")
            cfg.shock.family = Family::n_family;
        else
            throw ConfigError("shock.family must be 'one' or 'n'");
    }

    const nlohmann::json sim = doc.contains("sim") ? doc.at("sim") : nlohmann::json::object();
    cfg.n_cells = static_cast<int>(detail::number_or(sim, "n_cells", 2000));
    cfg.x_lo = detail::number_or(sim, "x_lo", -2.0);
    cfg.x_hi = detail::number_or(sim, "x_hi", 2.0);
    cfg.cfl = detail::number_or(sim, "cfl", 0.45);
    cfg.t_end = detail::number_or(sim, "t_end", 0.2);
    cfg.davis_margin = detail::number_or(sim, "davis_margin", 0.0);
    if (sim.contains("snapshots"))
        for (const auto& t : sim.at("snapshots"))
            cfg.snapshot_times.push_back(t.get<double>());

    const nlohmann::json exp =
        doc.contains("experiment") ? doc.at("experiment") : nlohmann::json::object();
    const std::string kind =
        exp.contains("kind") ? exp.at("kind").get<std::string>() : "riemann";
    if (kind == "riemann")
        cfg.init_kind = InitSpec::Kind::riemann;
    else if (kind == "perturbed_shock")
        cfg.init_kind = InitSpec::Kind::perturbed_shock;
    else
        throw ConfigError("experiment.kind must be 'riemann' or 'perturbed_shock'");
    cfg.eps = detail::number_or(exp, "eps", 0.05);
    cfg.seed = static_cast<std::uint64_t>(detail::number_or(exp, "seed", 0));
    cfg.left_center = detail::number_or(exp, "left_center", cfg.left_center);
    cfg.left_width = detail::number_or(exp, "left_width", cfg.left_width);
    cfg.right_center = detail::number_or(exp, "right_center", cfg.right_center);
    cfg.right_width = detail::number_or(exp, "right_width", cfg.right_width);

    const nlohmann::json shift =
        doc.contains("shift") ? doc.at("shift") : nlohmann::json::object();
    cfg.window_cells = detail::number_or(shift, "window_cells", 4.0);
    cfg.window_abs = detail::number_or(shift, "window_abs", 0.0);
    cfg.k_cells = static_cast<int>(detail::number_or(shift, "k_cells", 4));
    cfg.layer_skip = static_cast<int>(detail::number_or(shift, "layer_skip", 3));
    cfg.eta_floor = detail::number_or(shift, "eta_floor", 1e-12);
    if (shift.contains("eps"))
        cfg.eps = shift.at("eps").get<double>();
    return cfg;
}

std::vector<Vec> sample_interior_states(const SystemSpec& sys, int count,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed, 17));
    std::uniform_real_distribution<double> rho(0.3, 3.0), vel(-2.0, 2.0), en(0.4, 3.0),
        sc(-3.0, 3.0);
    std::vector<Vec> out;
    int guard = 0;
    while (static_cast<int>(out.size()) < count && ++guard < 100 * count) {
        Vec u;
        switch (sys.kind) {
        case SystemKind::isentropic:
            u = isentropic_state(rho(rng), vel(rng));
            break;
        case SystemKind::full_euler:
            u = full_euler_state(rho(rng), vel(rng), en(rng));
            break;
        default:
            u = state1(sc(rng));
            break;
        }
        if (sys.domain_interior(u))
            out.push_back(std::move(u));
    }
    return out;
}

void ensure_outdir(const std::string& dir) {
    if (!dir.empty())
        std::filesystem::create_directories(dir);
}

int cmd_check_system(const std::string& config, const std::string& outdir, int samples,
                     std::uint64_t seed) {
    const SystemSpec sys = detail::make_system_from_json(system_block(load_config_document(config)));
    const auto states = sample_interior_states(sys, samples, seed);
    if (states.empty())
        throw ConfigError("check-system: could not sample interior states");

    double max_compat = 0.0, min_hess = std::numeric_limits<double>::infinity();
    bool lambda_ordered = true;
    for (const Vec& u : states) {
        max_compat = std::max(max_compat, compatibility_residual(sys, u));
        Eigen::SelfAdjointEigenSolver<Mat> es(hess_eta_of(sys, u));
        min_hess = std::min(min_hess, es.eigenvalues().minCoeff());
        if (!(sys.lambda_minus(u) <= sys.lambda_plus(u) + 1e-12))
            lambda_ordered = false;
    }
    auto est = comparability_constants(sys, {states.front()}, states);

    const bool pass = max_compat <= 1e-6 && min_hess > 0.0 && lambda_ordered;
    nlohmann::json j;
    j["system"] = sys.name;
    j["samples"] = static_cast<int>(states.size());
    j["max_compatibility_residual"] = max_compat;
    j["min_entropy_hessian_eigenvalue"] = min_hess;
    j["wave_speeds_ordered"] = lambda_ordered;
    j["comparability"] = {{"c1", est.c1}, {"c2", est.c2}, {"region", est.sample_region}};
    j["pass"] = pass;
    if (sys.kind == SystemKind::isentropic) {
        double min_d2 = std::numeric_limits<double>::infinity();
        for (const Vec& u : states)
            min_d2 = std::min(min_d2, sys.pressure.d2_rho_p(u[0]));
        j["min_rho_p_second_derivative"] = min_d2;
    }

    const std::string text = j.dump(2);
    std::printf("%s\n", text.c_str());
    if (!outdir.empty()) {
        ensure_outdir(outdir);
        std::ofstream(outdir + "/check_system.json") << text << '\n';
    }
    return pass ? 0 : 1;
}

int cmd_shock_curve(const std::string& config, const std::string& outdir,
                    const std::string& family_name, const std::string& base_arg,
                    double s_max_arg, int samples) {
    const auto doc = load_config_document(config);
    ExperimentConfig ecfg = parse_experiment_config(doc);
    const SystemSpec& sys = ecfg.sys;

    Family family = family_name == "n" ? Family::n_family : Family::one_family;
    Vec base = ecfg.shock.base;
    if (!base_arg.empty()) {
        nlohmann::json arr = nlohmann::json::parse("[" + base_arg + "]");
        base = vec_from_json(arr, "--base");
    }
    auto curve = make_shock_curve(sys, base, family);
    const double s_hi = s_max_arg > 0.0 ? std::min(s_max_arg, curve->s_max()) : curve->s_max();
    std::vector<double> grid;
    for (int i = 0; i < samples; ++i)
        grid.push_back(s_hi * i / (samples - 1));
    const auto sample = sample_curve(sys, *curve, grid);

    ensure_outdir(outdir);
    const std::string file = outdir.empty() ? "shock_curve.csv" : outdir + "/shock_curve.csv";
    std::ofstream out(file);
    out << "s";
    for (int k = 0; k < sys.m; ++k)
        out << ",u_" << k;
    out << ",sigma,rh_residual,entropy_production\n";
    for (size_t i = 0; i < sample.s_grid.size(); ++i) {
        out << fmt17(sample.s_grid[i]);
        for (int k = 0; k < sys.m; ++k)
            out << ',' << fmt17(sample.states[i][k]);
        out << ',' << fmt17(sample.speeds[i]) << ',' << fmt17(sample.rh_residual[i]) << ','
            << fmt17(sample.entropy_production[i]) << '\n';
    }
    std::printf("wrote %s (%zu samples, s_max = %s)\n", file.c_str(), sample.s_grid.size(),
                fmt17(curve->s_max()).c_str());
    return 0;
}

int cmd_verify_lemmas(const std::string& config, const std::string& outdir,
                      std::uint64_t seed) {
    const auto doc = load_config_document(config);
    ExperimentConfig ecfg = parse_experiment_config(doc);
    const SystemSpec& sys = ecfg.sys;
    const HugoniotTolerances tol;

    nlohmann::json j;
    j["system"] = sys.name;
    bool pass = true;

    std::mt19937_64 rng(mix_seed(seed, 5));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (Family family : {Family::one_family, Family::n_family}) {
        const std::string fname = family == Family::one_family ? "one_family" : "n_family";
        auto curve = make_shock_curve(sys, ecfg.shock.base, family, tol);
        const double s_hi = std::min(curve->s_max(), 2.0);

        auto hyp = check_hypotheses(sys, *curve, 41, s_hi, tol);
        nlohmann::json hj;
        hj["speed_at_origin_ok"] = hyp.speed_at_origin_ok;
        hj["liu_monotone"] = hyp.liu_monotone;
        hj["is_contact"] = hyp.is_contact;
        hj["strengthening_ok"] = hyp.strengthening_ok;
        hj["h2_ok"] = hyp.h2_ok;
        hj["h3_ok"] = hyp.h3_ok;
        hj["failures"] = hyp.failures;
        if (!hyp.liu_violations.empty()) {
            nlohmann::json viol = nlohmann::json::array();
            for (auto& [s, sp] : hyp.liu_violations)
                viol.push_back({{"s", s}, {"sigma_prime", sp}});
            hj["liu_violation_interval"] = {{"s_lo", hyp.liu_violations.front().first},
                                            {"s_hi", hyp.liu_violations.back().first}};
            hj["liu_violations"] = viol;
        }
        pass = pass && hyp.all_ok();

        // identity residual sweeps along this curve
        double max_loss_resid = 0.0, max_diss_resid = 0.0, max_lhs = -1e300;
        for (int i = 0; i < 16; ++i) {
            const double s = s_hi * unit(rng);
            const auto vstates = sample_interior_states(sys, 1, seed + i + 1);
            if (!vstates.empty()) {
                auto chk = verify_entropy_loss_identity(sys, *curve, vstates[0], s, tol);
                max_loss_resid = std::max(max_loss_resid, chk.residual);
            }
            const double s0 = s_hi * unit(rng);
            auto d = verify_curve_dissipation(sys, *curve, s, s0, tol);
            max_diss_resid = std::max(max_diss_resid, d.residual);
            max_lhs = std::max(max_lhs, d.oriented_lhs);
        }
        hj["entropy_loss_identity_max_residual"] = max_loss_resid;
        hj["dissipation_identity_max_residual"] = max_diss_resid;
        hj["dissipation_max_lhs"] = max_lhs;
        pass = pass && max_loss_resid <= 1e-6 && max_diss_resid <= 1e-6 && max_lhs <= 1e-9;

        j[fname] = hj;
    }

    if (sys.kind == SystemKind::isentropic) {
        // dual-route phi' agreement
        double max_gap = 0.0;
        std::vector<double> grid;
        for (int i = 1; i <= 16; ++i)
            grid.push_back(0.1 + (2.0 - 0.1) * (i - 1) / 15.0);
        auto prof = pressure_convexity_profile(sys.pressure, ecfg.shock.base[0], grid, tol);
        for (size_t i = 0; i < prof.s.size(); ++i)
            max_gap = std::max(max_gap, std::abs(prof.dphi_fd[i] - prof.dphi_quad[i]));
        j["phi_prime_route_gap"] = max_gap;
        pass = pass && max_gap <= 1e-7;
    }

    // reported only: how fast the curve range varies with the base state
    std::vector<Vec> bases = sample_interior_states(sys, 6, seed + 33);
    if (!bases.empty())
        j["s_max_lipschitz_estimate"] =
            s_max_lipschitz_estimate(sys, Family::one_family, bases);

    j["pass"] = pass;
    const std::string text = j.dump(2);
    std::printf("%s\n", text.c_str());
    if (!outdir.empty()) {
        ensure_outdir(outdir);
        std::ofstream(outdir + "/verify_lemmas.json") << text << '\n';
    }
    return pass ? 0 : 1;
}

int cmd_simulate(const std::string& config, const std::string& outdir, std::uint64_t seed) {
    auto doc = load_config_document(config);
    ExperimentConfig ecfg = parse_experiment_config(doc);
    if (seed != static_cast<std::uint64_t>(-1))
        ecfg.seed = seed;

    // solver-only run on the resolved jump
    SimConfig sim;
    sim.n_cells = ecfg.n_cells;
    sim.x_lo = ecfg.x_lo;
    sim.x_hi = ecfg.x_hi;
    sim.cfl = ecfg.cfl;
    sim.t_end = ecfg.t_end;
    sim.davis_margin = ecfg.davis_margin;
    sim.use_parallel = ecfg.use_parallel;
    sim.snapshot_times = ecfg.snapshot_times;
    if (sim.snapshot_times.empty())
        sim.snapshot_times = {0.0, 0.5 * ecfg.t_end, ecfg.t_end};
    auto curve = make_shock_curve(ecfg.sys, ecfg.shock.base, ecfg.shock.family);
    const Vec endpoint = curve->state(ecfg.shock.s);
    sim.init.kind = ecfg.init_kind;
    sim.init.u_left = ecfg.shock.family == Family::one_family ? ecfg.shock.base : endpoint;
    sim.init.u_right = ecfg.shock.family == Family::one_family ? endpoint : ecfg.shock.base;
    sim.init.eps = ecfg.eps;
    sim.init.seed = ecfg.seed;
    sim.init.left_center = ecfg.left_center;
    sim.init.left_width = ecfg.left_width;
    sim.init.right_center = ecfg.right_center;
    sim.init.right_width = ecfg.right_width;

    auto traj = run(ecfg.sys, sim);

    ensure_outdir(outdir.empty() ? "." : outdir);
    const std::string dir = outdir.empty() ? "." : outdir;
    std::filesystem::create_directories(dir + "/snapshots");
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s/snapshots/snapshot_%03zu.csv", dir.c_str(), i);
        write_snapshot_csv(name, ecfg.sys, traj.snapshots[i], {});
    }
    nlohmann::json meta;
    meta["steps"] = traj.meta.steps;
    meta["dt_min"] = traj.meta.dt_min;
    meta["dt_max"] = traj.meta.dt_max;
    meta["max_cfl"] = traj.meta.max_cfl;
    meta["vacuum_events"] = traj.meta.vacuum_events;
    meta["entropy_violations"] = traj.meta.entropy_violations;
    meta["max_entropy_residual"] = traj.meta.max_entropy_residual;
    meta["positive_entropy_total"] = traj.meta.positive_entropy_total;
    meta["max_conservation_drift"] = traj.meta.max_conservation_drift;
    std::ofstream(dir + "/run_metadata.json") << meta.dump(2) << '\n';
    std::printf("simulated %d steps; outputs in %s\n", traj.meta.steps, dir.c_str());
    return 0;
}

int cmd_stability_report(const std::string& config, const std::string& outdir,
                         std::uint64_t seed) {
    auto doc = load_config_document(config);
    ExperimentConfig ecfg = parse_experiment_config(doc);
    if (seed != static_cast<std::uint64_t>(-1))
        ecfg.seed = seed;

    auto res = run_experiment(ecfg);
    StabilityThresholds th;
    th.left_increment_rate = res.ledger_rate_tol;
    th.left_cap = ecfg.init_kind == InitSpec::Kind::perturbed_shock
                      ? 1.1 * std::pow(ecfg.eps, 4)
                      : 0.0;
    auto rep = stability_report(res.ledger, ecfg.eps, res.sigma, th);

    const std::string dir = outdir.empty() ? "." : outdir;
    ensure_outdir(dir);
    write_ledger_csv(dir + "/ledger.csv", res.ledger);
    write_path_csv(dir + "/path.csv", res.path, res.filippov, res.jump_audit);
    std::filesystem::create_directories(dir + "/snapshots");
    for (size_t i = 0; i < res.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s/snapshots/snapshot_%03zu.csv", dir.c_str(), i);
        write_snapshot_csv(name, ecfg.sys, res.snapshots[i], res.snapshot_residuals[i]);
    }
    write_report_json(dir + "/report.json", res, rep, ecfg);

    const bool pass = rep.left_ok && rep.bad_set_ok && rep.fits_finite;
    std::printf("stability report written to %s (left_ok=%d bad_set_ok=%d)\n", dir.c_str(),
                rep.left_ok, rep.bad_set_ok);
    return pass ? 0 : 1;
}

} // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"numerical laboratory for tracked extremal discontinuities"};
    app.require_subcommand(1);

    std::string config, outdir, family = "one", base_arg;
    int samples = 100;
    int curve_samples = 41;
    double s_max_arg = -1.0;
    std::uint64_t seed = static_cast<std::uint64_t>(-1);

    auto add_common = [&](CLI::App* sub, bool config_required = true) {
        auto* opt = sub->add_option("--config", config, "config file or bundled preset");
        if (config_required)
            opt->required();
        sub->add_option("--out", outdir, "output directory");
        sub->add_option("--seed", seed, "seed for sampled checks / perturbation phases");
    };

    auto* check = app.add_subcommand("check-system", "entropy-pair and domain audits");
    add_common(check);
    check->add_option("--samples", samples, "number of sampled states");

    auto* curve = app.add_subcommand("shock-curve", "emit curve samples as CSV");
    add_common(curve);
    curve->add_option("--family", family, "one|n");
    curve->add_option("--base", base_arg, "comma-separated conserved base state");
    curve->add_option("--s-max", s_max_arg, "largest curve parameter to sample");
    curve->add_option("--samples", curve_samples, "number of samples");

    auto* lemmas = app.add_subcommand("verify-lemmas", "identity and hypothesis checks");
    add_common(lemmas);

    auto* sim = app.add_subcommand("simulate", "finite-volume run with snapshots");
    add_common(sim);

    auto* stab = app.add_subcommand("stability-report", "full tracked experiment");
    add_common(stab);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::fflush(stdout);
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const std::uint64_t sample_seed = seed == static_cast<std::uint64_t>(-1) ? 0 : seed;
        if (check->parsed())
            return cmd_check_system(config, outdir, samples, sample_seed);
        if (curve->parsed())
            return cmd_shock_curve(config, outdir, family, base_arg, s_max_arg,
                                   curve_samples);
        if (lemmas->parsed())
            return cmd_verify_lemmas(config, outdir, sample_seed);
        if (sim->parsed())
            return cmd_simulate(config, outdir, seed);
        if (stab->parsed())
            return cmd_stability_report(config, outdir, seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

} // namespace shocklab
