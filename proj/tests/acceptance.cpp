// Acceptance suite: every stability-laboratory requirement is exercised at
// its stated tolerance and reported as one line. The binary exits with the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shocklab/core.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/hugoniot.hpp"
#include "shocklab/lab.hpp"
#include "shocklab/numerics.hpp"
#include "shocklab/shift.hpp"
#include "shocklab/solver.hpp"
#include "shocklab/systems.hpp"

using namespace shocklab;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s  (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double full_euler_eta_closed(double gamma, double rl, double ul, double el, double rr,
                             double ur, double er) {
    const double h_rel =
        rl * std::log(rl) - rr * std::log(rr) - (std::log(rr) + 1.0) * (rl - rr);
    const double ln_rel = std::log(el) - std::log(er) - (el - er) / er;
    return (gamma - 1.0) * h_rel - rl * ln_rel + 0.5 * rl / er * (ul - ur) * (ul - ur);
}

// --------------------------------------------------------------------------

void criterion_1_compatibility() {
    double worst = 0.0;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> rho(0.3, 3.0), vel(-2.0, 2.0), en(0.4, 3.0);
    for (double gamma : {1.4, 2.0, 3.0}) {
        auto sys = make_isentropic(power_pressure_law(gamma));
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst,
                             compatibility_residual(sys, isentropic_state(rho(rng), vel(rng))));
    }
    auto euler = make_full_euler(1.4);
    for (int i = 0; i < 100; ++i)
        worst = std::max(worst, compatibility_residual(
                                    euler, full_euler_state(rho(rng), vel(rng), en(rng))));
    criterion(1, "entropy-pair compatibility residual <= 1e-6", worst <= 1e-6,
              "max residual " + fmt(worst));
}

void criterion_2_closed_form() {
    const double gamma = 1.4;
    auto sys = make_full_euler(gamma);
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> rho(0.3, 3.0), vel(-1.5, 1.5), en(0.4, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double rl = rho(rng), ul = vel(rng), el = en(rng);
        const double rr = rho(rng), ur = vel(rng), er = en(rng);
        const double a =
            relative_entropy(sys, full_euler_state(rl, ul, el), full_euler_state(rr, ur, er));
        const double b = full_euler_eta_closed(gamma, rl, ul, el, rr, ur, er);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    criterion(2, "polytropic closed-form relative entropy to 1e-10", worst <= 1e-10,
              "max relative gap " + fmt(worst));
}

void criterion_3_curve_exactness() {
    auto iso = make_isentropic(power_pressure_law(2.0));
    auto curve = make_shock_curve(iso, isentropic_state(1.0, 0.0), Family::one_family);
    const Vec S = curve->state(1.0);
    const double sigma = curve->speed(1.0);
    const Vec resid = iso.flux(S) - iso.flux(curve->base()) - sigma * (S - curve->base());
    const double e1 = std::abs(S[0] - 2.0);
    const double e2 = std::abs(S[1] + 2.0 * std::sqrt(1.5));
    const double e3 = std::abs(sigma + std::sqrt(6.0));
    const double rh = resid.lpNorm<Eigen::Infinity>();

    auto euler = make_full_euler(1.4);
    auto ec = make_shock_curve(euler, full_euler_state(1.0, 0.0, 1.0), Family::one_family);
    const auto prL = euler_primitives(euler, ec->base());
    const auto prR = euler_primitives(euler, ec->state(1.0));
    const double pratio_err = std::abs(prR.p / prL.p - 2.75);

    const bool pass = e1 <= 1e-12 && e2 <= 1e-12 && e3 <= 1e-12 && rh <= 1e-12 &&
                      pratio_err <= 1e-12;
    criterion(3, "closed-form curve endpoints and jump residuals", pass,
              "state err " + fmt(std::max(e1, e2)) + ", sigma err " + fmt(e3) + ", rh " +
                  fmt(rh) + ", P-ratio err " + fmt(pratio_err));
}

void criterion_4_dissipation_inequality() {
    double worst_resid = 0.0, worst_lhs = -1e300;
    auto sweep = [&](const SystemSpec& sys, const Vec& base, Family fam, double s_hi) {
        auto curve = make_shock_curve(sys, base, fam);
        const double cap = std::min(s_hi, curve->s_max());
        for (int a = 0; a < 20; ++a) {
            for (int b = 0; b < 20; ++b) {
                const double s = cap * a / 19.0;
                const double s0 = cap * b / 19.0;
                auto chk = verify_curve_dissipation(sys, *curve, s, s0);
                worst_resid = std::max(worst_resid, chk.residual);
                worst_lhs = std::max(worst_lhs, chk.oriented_lhs);
            }
        }
    };
    auto iso = make_isentropic(power_pressure_law(2.0));
    sweep(iso, isentropic_state(1.0, 0.0), Family::one_family, 2.0);
    auto euler = make_full_euler(1.4);
    sweep(euler, full_euler_state(1.0, 0.0, 1.0), Family::one_family, 2.0);
    sweep(euler, full_euler_state(1.0, 0.0, 1.0), Family::n_family, 2.0);
    criterion(4, "curve dissipation identity and sign on 20x20 grids",
              worst_resid <= 1e-7 && worst_lhs <= 1e-10,
              "max residual " + fmt(worst_resid) + ", max oriented lhs " + fmt(worst_lhs));
}

void criterion_5_entropy_loss_identity() {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> rho(0.6, 1.6), vel(-0.5, 0.5), en(0.7, 1.6),
        unit(0.05, 0.95);
    double worst = 0.0;
    auto iso = make_isentropic(power_pressure_law(2.0));
    auto euler = make_full_euler(1.4);
    for (int i = 0; i < 50; ++i) {
        const Family fam = i % 2 ? Family::n_family : Family::one_family;
        {
            auto c = make_shock_curve(iso, isentropic_state(rho(rng), vel(rng)), fam);
            const double s = std::min(unit(rng) * c->s_max(), 2.0);
            auto chk = verify_entropy_loss_identity(iso, *c,
                                                    isentropic_state(rho(rng), vel(rng)), s);
            worst = std::max(worst, chk.residual);
        }
        {
            auto c =
                make_shock_curve(euler, full_euler_state(rho(rng), vel(rng), en(rng)), fam);
            const double s = std::min(unit(rng) * c->s_max(), 2.0);
            auto chk = verify_entropy_loss_identity(
                euler, *c, full_euler_state(rho(rng), vel(rng), en(rng)), s);
            worst = std::max(worst, chk.residual);
        }
    }
    criterion(5, "entropy-loss identity residual <= 1e-7 on random triples", worst <= 1e-7,
              "max residual " + fmt(worst));
}

void criterion_6_liu_convexity() {
    bool power_ok = true;
    auto power = make_isentropic(power_pressure_law(2.0));
    for (double r : {0.6, 1.0, 1.5, 2.0})
        for (double u : {-0.5, 0.0, 0.5})
            for (Family fam : {Family::one_family, Family::n_family}) {
                auto c = make_shock_curve(power, isentropic_state(r, u), fam);
                auto rep = check_hypotheses(power, *c, 31, 1.5);
                power_ok = power_ok && rep.liu_monotone && rep.speed_at_origin_ok &&
                           rep.strengthening_ok;
            }

    auto law = nonconvex_pressure_law();
    double neg_lo = 0.0, neg_hi = 0.0;
    for (double r = 0.5; r < 3.0; r += 1e-3)
        if (law.d2_rho_p(r) < 0.0) {
            if (neg_lo == 0.0)
                neg_lo = r;
            neg_hi = r;
        }
    auto nsys = make_isentropic(law);
    auto nc = make_shock_curve(nsys, isentropic_state(1.0, 0.0), Family::one_family);
    auto nrep = check_hypotheses(nsys, *nc, 101, 1.5);
    bool overlap = false;
    for (const auto& [s, sp] : nrep.liu_violations) {
        const double r = 1.0 + s;
        if (r >= neg_lo - 0.2 && r <= neg_hi + 0.2)
            overlap = true;
    }

    double route_gap = 0.0;
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i)
        grid.push_back(0.1 + (2.0 - 0.1) * i / 19.0);
    for (const PressureLaw& l : {power_pressure_law(2.0), nonconvex_pressure_law()}) {
        auto prof = pressure_convexity_profile(l, 1.0, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            route_gap = std::max(route_gap, std::abs(prof.dphi_fd[i] - prof.dphi_quad[i]));
    }

    const bool pass = power_ok && !nrep.liu_monotone && overlap && route_gap <= 1e-7;
    criterion(6, "speed monotonicity iff [rho P]'' >= 0; phi' dual route", pass,
              std::string("power ok ") + (power_ok ? "y" : "n") + ", flagged interval " +
                  (overlap ? "overlaps" : "misses") + " the dip, route gap " +
                  fmt(route_gap));
}

void criterion_7_strengthening() {
    double min_fd = 1e300, analytic_gap = 0.0;
    auto iso = make_isentropic(power_pressure_law(2.0));
    auto fd_derivative = [](const SystemSpec& sys, const ShockCurve& c, double s) {
        const double h = 1e-6 * (1.0 + s);
        const double a = std::max(s - h, 0.0);
        const double b = std::min(s + h, c.s_max());
        return (relative_entropy(sys, c.base(), c.state(b)) -
                relative_entropy(sys, c.base(), c.state(a))) /
               (b - a);
    };
    for (double r : {0.8, 1.0, 1.4})
        for (Family fam : {Family::one_family, Family::n_family}) {
            auto c = make_shock_curve(iso, isentropic_state(r, 0.1), fam);
            const double cap = std::min(c->s_max(), 2.0);
            for (int i = 1; i <= 20; ++i) {
                const double s = cap * i / 20.0;
                const double fd = fd_derivative(iso, *c, s);
                min_fd = std::min(min_fd, fd);
                const double rs = r + s;
                const auto& law = iso.pressure;
                const double analytic =
                    (s * rs * law.dp(rs) + r * (law.p(rs) - law.p(r))) / (2.0 * rs * rs) +
                    s * law.dp(rs) / rs;
                analytic_gap = std::max(analytic_gap, std::abs(fd - analytic));
            }
        }
    auto euler = make_full_euler(1.4);
    for (Family fam : {Family::one_family, Family::n_family}) {
        auto c = make_shock_curve(euler, full_euler_state(1.0, 0.0, 1.0), fam);
        const double cap = std::min(c->s_max(), 2.0);
        for (int i = 1; i <= 20; ++i)
            min_fd = std::min(min_fd, fd_derivative(euler, *c, cap * i / 20.0));
    }
    criterion(7, "relative entropy to the base grows along curves", min_fd >= -1e-9 &&
                  analytic_gap <= 1e-6,
              "min derivative " + fmt(min_fd) + ", analytic gap " + fmt(analytic_gap));
}

void criterion_8_continuation() {
    auto iso = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto explicit_curve = make_shock_curve(iso, base, Family::one_family);
    auto cont = shock_curve_continuation(iso, base, Family::one_family, 0.02, 60);
    double state_gap = 0.0, speed_gap = 0.0;
    for (size_t i = 0; i < cont.states.size(); ++i) {
        const double s_density = cont.states[i][0] - 1.0;
        if (s_density < 0.0 || s_density > explicit_curve->s_max())
            continue;
        state_gap = std::max(state_gap, (cont.states[i] - explicit_curve->state(s_density))
                                            .lpNorm<Eigen::Infinity>());
        speed_gap = std::max(speed_gap,
                             std::abs(cont.speeds[i] - explicit_curve->speed(s_density)));
    }

    double gn_rel = 0.0;
    auto gn_check = [&gn_rel](const SystemSpec& sys, const Vec& b) {
        auto c = shock_curve_continuation(sys, b, Family::one_family, 0.01, 30);
        const double h = c.s_grid[1] - c.s_grid[0];
        auto dd = [h](double f0, double f1, double f2) {
            return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
        };
        const double ds = dd(c.speeds[0], c.speeds[1], c.speeds[2]);
        const double dl = dd(sys.lambda_minus(c.states[0]), sys.lambda_minus(c.states[1]),
                             sys.lambda_minus(c.states[2]));
        gn_rel = std::max(gn_rel, std::abs(ds - 0.5 * dl) / std::abs(0.5 * dl));
    };
    gn_check(iso, base);
    gn_check(make_full_euler(1.4), full_euler_state(1.0, 0.0, 1.0));

    criterion(8, "continuation matches closed forms; origin speed slope",
              state_gap <= 1e-6 && speed_gap <= 1e-6 && gn_rel <= 1e-3,
              "state gap " + fmt(state_gap) + ", speed gap " + fmt(speed_gap) +
                  ", slope rel err " + fmt(gn_rel));
}

void criterion_9_solver_admissibility() {
    auto sys = make_isentropic(power_pressure_law(2.0));
    auto curve = make_shock_curve(sys, isentropic_state(1.0, 0.0), Family::one_family);
    SimConfig cfg;
    cfg.n_cells = 2000;
    cfg.x_lo = -1.5;
    cfg.x_hi = 1.0;
    cfg.cfl = 0.45;
    cfg.t_end = 0.2;
    cfg.init.u_left = curve->base();
    cfg.init.u_right = curve->state(1.0);
    auto traj = run(sys, cfg);

    // pinned budget: mean positive residual density 1e-6 over space-time
    const double budget = 1e-6 * (cfg.x_hi - cfg.x_lo) * cfg.t_end;
    const Field& f = traj.final_field;
    double mass = 0.0;
    for (int i = 0; i < f.n; ++i)
        mass += f.cell(i)[0] * f.dx;
    const double xs =
        f.x_lo + (mass - cfg.init.u_right[0] * (f.x_hi - f.x_lo)) /
                     (cfg.init.u_left[0] - cfg.init.u_right[0]);
    const double pos_err = std::abs(xs - curve->speed(1.0) * cfg.t_end);

    const bool pass = traj.meta.positive_entropy_total <= budget &&
                      pos_err <= 2.0 * f.dx &&
                      traj.meta.max_conservation_drift <= 1e-12;
    criterion(9, "entropy-admissible shock capture (N=2000, t=0.2)", pass,
              "positive residual " + fmt(traj.meta.positive_entropy_total) + " <= " +
                  fmt(budget) + ", position err " + fmt(pos_err) + " (dx " + fmt(f.dx) +
                  "), conservation " + fmt(traj.meta.max_conservation_drift));
}

void criterion_10_perturbed_stability() {
    const double eps = 0.05;
    struct Fit {
        double c_right, c_drift, max_e_left, viol_rate, rate_tol, bad_set;
        bool left_ok;
    };
    auto run_one = [&](int n) {
        ExperimentConfig cfg;
        cfg.sys = make_isentropic(power_pressure_law(2.0));
        cfg.shock = {Family::one_family, isentropic_state(1.0, 0.0), 1.0};
        cfg.n_cells = n;
        cfg.x_lo = -3.0;
        cfg.x_hi = 3.0;
        cfg.cfl = 0.45;
        cfg.t_end = 0.5;
        cfg.init_kind = InitSpec::Kind::perturbed_shock;
        cfg.eps = eps;
        cfg.window_cells = 8.0;
        cfg.window_abs = 0.012; // physical mollification width, fixed across N
        auto res = run_experiment(cfg);
        StabilityThresholds th;
        th.left_increment_rate = res.ledger_rate_tol;
        th.left_cap = 1.1 * std::pow(eps, 4);
        auto rep = stability_report(res.ledger, eps, res.sigma, th);
        return Fit{rep.right_growth_fit, rep.drift_fit,       rep.max_e_left,
                   rep.left_monotone_violation, res.ledger_rate_tol,
                   rep.bad_set_ratio * eps,
                   rep.left_ok};
    };
    const Fit a = run_one(4000);
    const Fit b = run_one(8000);

    const bool pass_a = a.left_ok && a.max_e_left <= 1.1 * std::pow(eps, 4);
    const bool pass_b = a.bad_set <= 2.0 * eps;
    const bool pass_c = std::abs(b.c_right / a.c_right - 1.0) <= 0.2 &&
                        std::isfinite(a.c_right);
    const bool pass_d = std::abs(b.c_drift / a.c_drift - 1.0) <= 0.2 &&
                        std::isfinite(a.c_drift);
    criterion(10, "perturbed tracking at eps=0.05 (N=4000, doubled to 8000)",
              pass_a && pass_b && pass_c && pass_d,
              "max e_left " + fmt(a.max_e_left) + " <= " + fmt(1.1 * std::pow(eps, 4)) +
                  ", rate " + fmt(a.viol_rate) + " <= " + fmt(a.rate_tol) + ", bad set " +
                  fmt(a.bad_set) + ", C_right " + fmt(a.c_right) + "->" + fmt(b.c_right) +
                  ", C_drift " + fmt(a.c_drift) + "->" + fmt(b.c_drift));
}

void criterion_11_mirror() {
    ExperimentConfig cfg;
    cfg.sys = make_isentropic(power_pressure_law(2.0));
    cfg.shock = {Family::n_family, isentropic_state(1.0, 0.0), 1.0};
    cfg.n_cells = 1000;
    cfg.x_lo = -1.2;
    cfg.x_hi = 1.5;
    cfg.t_end = 0.08;
    cfg.init_kind = InitSpec::Kind::riemann;
    auto res_n = mirror_experiment(cfg);

    auto mcfg = mirror_config(cfg);
    auto res_1 = run_experiment(mcfg);
    double gap = 0.0;
    for (size_t k = 0; k < res_n.ledger.times.size(); ++k) {
        gap = std::max(gap, std::abs(res_n.ledger.e_left[k] - res_1.ledger.e_right[k]));
        gap = std::max(gap, std::abs(res_n.ledger.e_right[k] - res_1.ledger.e_left[k]));
        gap = std::max(gap, std::abs(res_n.ledger.x[k] + res_1.ledger.x[k]));
        gap = std::max(gap, std::abs(res_n.ledger.drift[k] + res_1.ledger.drift[k]));
        gap = std::max(gap,
                       std::abs(res_n.ledger.diss_left[k] - res_1.ledger.diss_right[k]));
        gap = std::max(gap,
                       std::abs(res_n.ledger.diss_right[k] - res_1.ledger.diss_left[k]));
    }
    criterion(11, "coordinate-flip reduction of the largest family", gap <= 1e-12,
              "max ledger gap after flip " + fmt(gap));
}

void criterion_12_velocity_functional() {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec ul = isentropic_state(1.0, 0.0);
    VelocityParams params{.eps = 0.05, .eta_floor = 1e-12, .u_left_ref = ul};

    const bool exact = velocity_functional(sys, ul, params) ==
                       sys.lambda_minus(ul) - params.eps;

    double limit_gap = 0.0;
    Vec dirs[3] = {state2(1.0, 0.0), state2(0.0, 1.0), state2(-0.6, 0.8)};
    for (const Vec& d : dirs) {
        const Vec u = ul + std::pow(2.0, -20) * (d / d.norm());
        limit_gap = std::max(limit_gap,
                             std::abs(velocity_functional(sys, u, params) -
                                      (sys.lambda_minus(ul) - params.eps)));
    }

    ExperimentConfig cfg;
    cfg.sys = sys;
    cfg.shock = {Family::one_family, ul, 1.0};
    cfg.n_cells = 2000;
    cfg.x_lo = -1.5;
    cfg.x_hi = 1.0;
    cfg.t_end = 0.2;
    cfg.init_kind = InitSpec::Kind::riemann;
    cfg.eps = 0.05;
    auto res = run_experiment(cfg);

    const bool pass = exact && limit_gap <= 1e-4 &&
                      res.filippov.violation_fraction <= 0.01;
    criterion(12, "tracking velocity: exact value, limits, speed sandwich", pass,
              std::string("exact at reference ") + (exact ? "y" : "n") +
                  ", directional limit gap " + fmt(limit_gap) + ", sandwich violations " +
                  fmt(res.filippov.violation_fraction));
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_compatibility();
    criterion_2_closed_form();
    criterion_3_curve_exactness();
    criterion_4_dissipation_inequality();
    criterion_5_entropy_loss_identity();
    criterion_6_liu_convexity();
    criterion_7_strengthening();
    criterion_8_continuation();
    criterion_9_solver_admissibility();
    criterion_10_perturbed_stability();
    criterion_11_mirror();
    criterion_12_velocity_functional();
    std::printf("%d of 12 criteria failed\n", g_failures);
    return g_failures;
}
