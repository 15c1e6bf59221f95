#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "shocklab/core.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/hugoniot.hpp"
#include "shocklab/systems.hpp"

using namespace shocklab;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

} // namespace

TEST_CASE("isentropic gamma=2 curve: exact endpoint, speeds, admissibility") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto sample = shock_curve_isentropic(sys, base, Family::one_family, linspace(0, 2, 21));

    CHECK(sample.speeds[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK((sample.states[0] - base).norm() == 0.0);
    for (size_t i = 0; i < sample.s_grid.size(); ++i)
        CHECK(sample.rh_residual[i] <= 1e-12);

    // s = 1: S = (2, -2 sqrt(1.5)), sigma = -sqrt(6)
    auto one = shock_curve_isentropic(sys, base, Family::one_family, {1.0});
    CHECK(one.states[0][0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(one.states[0][1] == doctest::Approx(-2.0 * std::sqrt(1.5)).epsilon(1e-14));
    CHECK(one.speeds[0] == doctest::Approx(-std::sqrt(6.0)).epsilon(1e-14));
    // entropy production at s = 1 is -sqrt(1.5)/2
    CHECK(one.entropy_production[0] ==
          doctest::Approx(-0.5 * std::sqrt(1.5)).epsilon(1e-12));
    CHECK(one.entropy_production[0] < 0.0);

    // writing the momentum with the base density prefactor (instead of the
    // jump-consistent rho+s) breaks the jump relations by an O(1) margin
    const double rho = 1.0, s = 1.0;
    const double dv = std::sqrt((sys.pressure.p(rho + s) - sys.pressure.p(rho)) * s /
                                (rho * (rho + s)));
    const Vec literal = state2(rho + s, 0.0 - rho * dv);
    const Vec du = literal - base;
    const Vec da = sys.flux(literal) - sys.flux(base);
    const double sigma_ls = du.dot(da) / du.squaredNorm();
    CHECK((da - sigma_ls * du).lpNorm<Eigen::Infinity>() > 0.5);
}

TEST_CASE("full Euler curve: pressure ratio, kinetic identity, monotone bracket") {
    auto sys = make_full_euler(1.4);
    const Vec base = full_euler_state(1.0, 0.0, 1.0);

    auto curve = make_shock_curve(sys, base, Family::one_family);
    CHECK(curve->speed(0.0) == doctest::Approx(-std::sqrt(0.56)).epsilon(1e-14));

    // rho ratio 2 gives P ratio 11/4 [(gamma+1)/(gamma-1) = 6]
    const auto pr_base = euler_primitives(sys, base);
    const auto pr_s1 = euler_primitives(sys, curve->state(1.0));
    CHECK(pr_s1.p / pr_base.p == doctest::Approx(2.75).epsilon(1e-12));

    auto sample = shock_curve_full_euler(sys, base, Family::one_family,
                                         linspace(0.0, 2.0, 41));
    double prev_p = 0.0, prev_e = 0.0;
    for (size_t i = 0; i < sample.s_grid.size(); ++i) {
        CHECK(sample.rh_residual[i] <= 1e-12);
        const auto L = pr_base;
        const auto R = euler_primitives(sys, sample.states[i]);
        if (i > 0) {
            CHECK(R.p > prev_p);   // P, rho, e all strictly increase together
            CHECK(R.e > prev_e);
            CHECK(R.p > L.p);
            CHECK(R.e > L.e);
            // (u_L - u_R)^2 = P_R/rho_R (1 - P_L/P_R)(rho_R/rho_L - 1)
            const double lhs = (L.u - R.u) * (L.u - R.u);
            const double rhs = R.p / R.rho * (1.0 - L.p / R.p) * (R.rho / L.rho - 1.0);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
        prev_p = R.p;
        prev_e = R.e;
    }

    // largest-family curve: speeds increase from lambda_plus
    auto ncurve = make_shock_curve(sys, base, Family::n_family);
    CHECK(ncurve->speed(0.0) == doctest::Approx(std::sqrt(0.56)).epsilon(1e-14));
    CHECK(ncurve->speed(1.0) > ncurve->speed(0.5));
    CHECK(sample_curve(sys, *ncurve, linspace(0, 1.5, 16)).rh_residual.back() <= 1e-12);

    CHECK_THROWS_AS(curve->state(0.999 * 5.0 + 1.0), RangeError);
}

TEST_CASE("classification: shocks, reversed shocks, degenerate jumps, contacts") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec ul = isentropic_state(1.0, 0.0);
    auto curve = make_shock_curve(sys, ul, Family::one_family);
    const Vec ur = curve->state(1.0);

    auto rep = classify_discontinuity(sys, ul, ur);
    CHECK(rep.classification == Classification::one_shock);
    CHECK(rep.entropy_production == doctest::Approx(-0.5 * std::sqrt(1.5)).epsilon(1e-10));
    CHECK(rep.lax_left);
    CHECK(rep.lax_right);
    CHECK(rep.curve_checked);
    CHECK(rep.liu_monotone);
    CHECK(rep.strengthening);

    auto reversed = classify_discontinuity(sys, ur, ul);
    CHECK(reversed.classification == Classification::inadmissible);
    CHECK(reversed.entropy_production > 0.0);

    CHECK_THROWS_AS(classify_discontinuity(sys, ul, ul + Vec::Constant(2, 1e-16)),
                    NotADiscontinuity);
    CHECK_THROWS_AS(classify_discontinuity(sys, ul, isentropic_state(2.0, 1.0)),
                    NotADiscontinuity);

    // every curve sample classifies into the curve's family
    for (double s : linspace(0.1, 1.8, 8)) {
        auto r = classify_discontinuity(sys, ul, curve->state(s));
        CHECK(r.classification == Classification::one_shock);
    }
    auto ncurve = make_shock_curve(sys, ul, Family::n_family);
    for (double s : linspace(0.1, 1.8, 8)) {
        auto r = classify_discontinuity(sys, ncurve->state(s), ul);
        CHECK(r.classification == Classification::n_shock);
    }

    // middle-family contact of the polytropic system
    auto euler = make_full_euler(1.4);
    const Vec a = full_euler_state(1.0, 0.3, 1.0);
    const double p = 0.4;
    const Vec b = full_euler_state(1.5, 0.3, p / (0.4 * 1.5));
    auto contact = classify_discontinuity(euler, a, b);
    CHECK(contact.classification == Classification::contact);
    CHECK(std::abs(contact.entropy_production) < 1e-12);

    // constant-speed extremal family of the contact pressure law
    auto csys = make_isentropic(contact_pressure_law(), {.k_bound = 10.0, .rho_floor = 1e-10});
    const Vec cbase = isentropic_state(1.0, 0.0);
    auto ccurve = make_shock_curve(csys, cbase, Family::one_family);
    CHECK(ccurve->speed(1.0) == doctest::Approx(ccurve->speed(0.0)).epsilon(1e-12));
    auto crep = classify_discontinuity(csys, cbase, ccurve->state(1.0));
    CHECK(crep.classification == Classification::contact);
}

TEST_CASE("hypothesis checks pass for the power law and flag the non-convex law") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto curve = make_shock_curve(sys, base, Family::one_family);
    auto rep = check_hypotheses(sys, *curve, 41, 2.0);
    CHECK(rep.speed_at_origin_ok);
    CHECK(rep.liu_monotone);
    CHECK_FALSE(rep.is_contact);
    CHECK(rep.strengthening_ok);
    CHECK(rep.h2_ok);
    CHECK(rep.h3_ok);
    CHECK(rep.h2_checked > 0);
    CHECK(rep.all_ok());

    auto nrep = check_hypotheses(sys, *make_shock_curve(sys, base, Family::n_family), 41, 2.0);
    CHECK(nrep.all_ok());

    // polytropic families
    auto euler = make_full_euler(1.4);
    const Vec ebase = full_euler_state(1.0, 0.0, 1.0);
    for (Family f : {Family::one_family, Family::n_family}) {
        auto er = check_hypotheses(euler, *make_shock_curve(euler, ebase, f), 31, 2.0);
        CHECK(er.all_ok());
    }

    // non-convex law: speed monotonicity fails where [rho P]'' dips negative
    auto law = nonconvex_pressure_law();
    double neg_lo = 0.0, neg_hi = 0.0;
    for (double rho = 1.0; rho < 3.0; rho += 1e-3) {
        if (law.d2_rho_p(rho) < 0.0) {
            if (neg_lo == 0.0)
                neg_lo = rho;
            neg_hi = rho;
        }
    }
    REQUIRE(neg_lo > 0.0);

    auto nsys = make_isentropic(law);
    auto ncurve = make_shock_curve(nsys, base, Family::one_family);
    auto nliu = check_hypotheses(nsys, *ncurve, 101, 1.5);
    CHECK_FALSE(nliu.liu_monotone);
    REQUIRE_FALSE(nliu.liu_violations.empty());
    bool overlap = false;
    for (const auto& [s, sp] : nliu.liu_violations) {
        const double rho = 1.0 + s;
        if (rho >= neg_lo - 0.2 && rho <= neg_hi + 0.2)
            overlap = true;
    }
    CHECK(overlap);

    // contact family: strengthening check is skipped by the guard
    auto csys = make_isentropic(contact_pressure_law());
    auto ccurve = make_shock_curve(csys, base, Family::one_family);
    auto crep = check_hypotheses(csys, *ccurve, 21, 1.0);
    CHECK(crep.is_contact);
    CHECK(crep.liu_monotone);
    CHECK(crep.strengthening_ok);

    // strict monotonicity goes with [rho P]'' > 0: the power-law speed falls
    // strictly, the contact-law speed is flat
    for (double s : linspace(0.05, 1.8, 10)) {
        CHECK(curve->speed_derivative(s) < -1e-3);
        CHECK(std::abs(ccurve->speed_derivative(s)) <= 1e-8);
    }
}

TEST_CASE("pressure convexity profile: two derivative routes agree") {
    auto law = power_pressure_law(2.0);
    auto prof = pressure_convexity_profile(law, 1.0, linspace(0.1, 2.0, 20));
    CHECK(prof.dphi_at_zero == doctest::Approx(3.0).epsilon(1e-12)); // [rho^3]'' / 2
    CHECK(prof.phi_at_zero == doctest::Approx(2.0).epsilon(1e-12));  // P'(1)
    for (size_t i = 0; i < prof.s.size(); ++i)
        CHECK(prof.dphi_fd[i] == doctest::Approx(prof.dphi_quad[i]).epsilon(1e-7));

    // the small-s limit of phi recovers P'
    auto tiny = pressure_convexity_profile(law, 1.0, {1e-8});
    CHECK(tiny.phi[0] == doctest::Approx(2.0).epsilon(1e-6));

    auto ncl = nonconvex_pressure_law();
    auto nprof = pressure_convexity_profile(ncl, 1.0, linspace(0.1, 2.0, 20));
    for (size_t i = 0; i < nprof.s.size(); ++i)
        CHECK(nprof.dphi_fd[i] ==
              doctest::Approx(nprof.dphi_quad[i]).epsilon(1e-6).scale(1.0));
}

TEST_CASE("entropy loss identity along curves") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto curve = make_shock_curve(sys, base, Family::one_family);

    auto chk = verify_entropy_loss_identity(sys, *curve, isentropic_state(1.5, 0.3), 1.0);
    CHECK(chk.residual <= 1e-7);

    auto zero = verify_entropy_loss_identity(sys, *curve, isentropic_state(1.5, 0.3), 0.0);
    CHECK(zero.residual <= 1e-14);

    // random (curve, v, s) triples for both gas systems and the scalar one
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> rho(0.6, 1.6), vel(-0.5, 0.5), en(0.7, 1.6);
    auto euler = make_full_euler(1.4);
    auto burgers = make_scalar_convex([](double u) { return 0.5 * u * u; },
                                      [](double u) { return u; });
    for (int i = 0; i < 50; ++i) {
        {
            auto c = make_shock_curve(sys, isentropic_state(rho(rng), vel(rng)),
                                      i % 2 ? Family::one_family : Family::n_family);
            const double s = 0.9 * c->s_max() * (0.1 + 0.9 * (i / 50.0));
            auto r = verify_entropy_loss_identity(sys, *c,
                                                  isentropic_state(rho(rng), vel(rng)),
                                                  std::min(s, 2.0));
            CHECK(r.residual <= 1e-7);
        }
        {
            auto c = make_shock_curve(euler, full_euler_state(rho(rng), vel(rng), en(rng)),
                                      i % 2 ? Family::one_family : Family::n_family);
            const double s = std::min(0.9 * c->s_max() * (0.1 + 0.9 * (i / 50.0)), 2.0);
            auto r = verify_entropy_loss_identity(
                euler, *c, full_euler_state(rho(rng), vel(rng), en(rng)), s);
            CHECK(r.residual <= 1e-7);
        }
        {
            auto c = make_shock_curve(burgers, state1(vel(rng)),
                                      i % 2 ? Family::one_family : Family::n_family);
            auto r = verify_entropy_loss_identity(burgers, *c, state1(vel(rng)),
                                                  0.3 + i / 50.0);
            CHECK(r.residual <= 1e-7);
        }
    }

    // contact family: the integral vanishes and the identity is exact
    auto csys = make_isentropic(contact_pressure_law());
    auto ccurve = make_shock_curve(csys, base, Family::one_family);
    auto cchk = verify_entropy_loss_identity(csys, *ccurve, isentropic_state(1.2, 0.1), 1.0);
    CHECK(std::abs(cchk.integral) <= 1e-10);
    CHECK(cchk.residual <= 1e-10);
}

TEST_CASE("curve dissipation inequality on a parameter grid") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto curve = make_shock_curve(sys, base, Family::one_family);

    for (double s0 : linspace(0.0, 2.0, 9)) {
        for (double s : linspace(0.0, 2.0, 9)) {
            auto chk = verify_curve_dissipation(sys, *curve, s, s0);
            CHECK(chk.residual <= 1e-7);
            CHECK(chk.lhs <= 1e-10);
        }
    }

    auto same = verify_curve_dissipation(sys, *curve, 1.0, 1.0);
    CHECK(std::abs(same.lhs) <= 1e-14);

    // s = 0 reduces to F(U_L,U_R) - lambda_-(U_L) eta(U_L|U_R) <= 0
    const Vec ur = curve->state(1.0);
    auto at_zero = verify_curve_dissipation(sys, *curve, 0.0, 1.0);
    const double direct = relative_flux(sys, base, ur) -
                          sys.lambda_minus(base) * relative_entropy(sys, base, ur);
    CHECK(at_zero.lhs == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct <= 0.0);
}

TEST_CASE("isentropic strengthening derivative matches its closed form") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const auto& law = sys.pressure;
    const double rho = 1.0;
    const Vec base = isentropic_state(rho, 0.0);
    auto curve = make_shock_curve(sys, base, Family::one_family);

    for (double s : linspace(0.05, 1.8, 12)) {
        const double h = 1e-6 * (1.0 + s);
        const double fd = (relative_entropy(sys, base, curve->state(s + h)) -
                           relative_entropy(sys, base, curve->state(s - h))) /
                          (2.0 * h);
        const double rs = rho + s;
        const double analytic =
            (s * rs * law.dp(rs) + rho * (law.p(rs) - law.p(rho))) / (2.0 * rs * rs) +
            s * law.dp(rs) / rs; // S''(rho+s) = P'(rho+s)/(rho+s)
        CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
        CHECK(fd >= -1e-9);
    }
}

TEST_CASE("continuation reproduces the closed-form isentropic curve") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    const Vec base = isentropic_state(1.0, 0.0);
    auto explicit_curve = make_shock_curve(sys, base, Family::one_family);

    auto cont = shock_curve_continuation(sys, base, Family::one_family, 0.02, 60);
    REQUIRE(cont.states.size() > 10);
    for (size_t i = 0; i < cont.states.size(); ++i) {
        const double s_density = cont.states[i][0] - 1.0;
        if (s_density < 0.0 || s_density > explicit_curve->s_max())
            continue;
        CHECK((cont.states[i] - explicit_curve->state(s_density)).lpNorm<Eigen::Infinity>() <=
              1e-6);
        CHECK(cont.speeds[i] ==
              doctest::Approx(explicit_curve->speed(s_density)).epsilon(1e-6));
        CHECK(cont.rh_residual[i] <= 1e-9);
    }

    auto single = shock_curve_continuation(sys, base, Family::one_family, 0.02, 0);
    CHECK(single.states.size() == 1);
    CHECK((single.states[0] - base).norm() == 0.0);
    CHECK(single.speeds[0] == doctest::Approx(sys.lambda_minus(base)).epsilon(1e-12));
}

TEST_CASE("continuation speed slope at the origin is half the eigenvalue slope") {
    auto check_gn = [](const SystemSpec& sys, const Vec& base) {
        auto cont = shock_curve_continuation(sys, base, Family::one_family, 0.01, 30);
        const double h = cont.s_grid[1] - cont.s_grid[0];
        auto one_sided = [h](double f0, double f1, double f2) {
            return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
        };
        const double dsigma =
            one_sided(cont.speeds[0], cont.speeds[1], cont.speeds[2]);
        const double dlambda = one_sided(sys.lambda_minus(cont.states[0]),
                                         sys.lambda_minus(cont.states[1]),
                                         sys.lambda_minus(cont.states[2]));
        CHECK(dsigma == doctest::Approx(0.5 * dlambda).epsilon(1e-3));
    };
    check_gn(make_isentropic(power_pressure_law(2.0)), isentropic_state(1.0, 0.0));
    check_gn(make_full_euler(1.4), full_euler_state(1.0, 0.0, 1.0));
}

TEST_CASE("mirrored systems expose the dual curve") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    auto dual = mirror_system(sys);
    const Vec base = isentropic_state(1.0, 0.0);

    auto n_orig = make_shock_curve(sys, base, Family::n_family);
    auto one_dual = make_shock_curve(dual, base, Family::one_family);
    for (double s : linspace(0.0, 1.5, 7)) {
        CHECK((n_orig->state(s) - one_dual->state(s)).norm() == doctest::Approx(0.0));
        CHECK(one_dual->speed(s) == doctest::Approx(-n_orig->speed(s)));
    }
    // and the dual curve satisfies the dual system's jump relations
    auto samp = sample_curve(dual, *one_dual, linspace(0.0, 1.5, 7));
    for (double r : samp.rh_residual)
        CHECK(r <= 1e-12);
    auto rep = check_hypotheses(dual, *one_dual, 21, 1.5);
    CHECK(rep.speed_at_origin_ok);
    CHECK(rep.liu_monotone);
}

TEST_CASE("mirrored scalar system: dual curve is self-contained") {
    auto sys = make_scalar_convex([](double u) { return 0.5 * u * u; },
                                  [](double u) { return u; });
    auto dual = mirror_system(sys);
    auto curve = make_shock_curve(dual, state1(0.5), Family::one_family);
    // Burgers dual: sigma~(s) = -(f(u+s)-f(u))/s = -(u + s/2)
    CHECK(curve->speed(0.0) == doctest::Approx(-0.5));
    CHECK(curve->speed(1.0) == doctest::Approx(-1.0));
    CHECK(curve->state(1.0)[0] == doctest::Approx(1.5));
    auto samp = sample_curve(dual, *curve, linspace(0.0, 1.0, 5));
    for (double r : samp.rh_residual)
        CHECK(r <= 1e-14);
}

TEST_CASE("s_max varies Lipschitz-continuously over a base grid (reported)") {
    auto sys = make_isentropic(power_pressure_law(2.0));
    std::vector<Vec> bases;
    for (double rho : {0.8, 1.0, 1.2})
        for (double u : {-0.3, 0.0, 0.3})
            bases.push_back(isentropic_state(rho, u));
    const double lip = s_max_lipschitz_estimate(sys, Family::one_family, bases);
    CHECK(std::isfinite(lip));
    CHECK(lip >= 0.0);
}
