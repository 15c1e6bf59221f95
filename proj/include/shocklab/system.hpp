#pragma once

#include <functional>
#include <string>

#include "shocklab/types.hpp"

namespace shocklab {

/// Barotropic pressure law P(rho). `d2_rho_p` evaluates [rho*P(rho)]''.
/// `s` / `s_prime` are the entropy antiderivative S and S' with
/// S''(rho) = P'(rho)/rho; constructors of bundled laws supply closed forms,
/// otherwise they are filled in by numerical integration.
struct PressureLaw {
    std::function<double(double)> p;
    std::function<double(double)> dp;
    std::function<double(double)> d2_rho_p;
    std::function<double(double)> s;
    std::function<double(double)> s_prime;
    double rho_min = 0.0;
    double rho_max = 0.0;
    std::string name;

    bool valid() const { return static_cast<bool>(p) && rho_max > rho_min; }
};

/// Box bound on primitive variables: 0 < ||(rho, u[, E])||_inf < k_bound,
/// with a numerical vacuum threshold.
struct StateDomainBox {
    double k_bound = 10.0;
    double rho_floor = 1e-10;
};

enum class SystemKind { scalar, isentropic, full_euler, generic };

/// A system of conservation laws with a designated convex entropy pair.
/// All callbacks take conserved variables. Immutable after construction and
/// shareable across threads; every operation on it is a pure function.
///
/// `grad_eta`, `hess_eta`, `jac_flux` are optional; when absent, callers use
/// the central finite-difference fallbacks below (step = max(1e-6, 1e-6|u_k|)
/// per component, scale configurable via `fd_step_scale`).
struct SystemSpec {
    int m = 0;
    SystemKind kind = SystemKind::generic;
    bool mirrored = false; // flux negated relative to the named kind
    std::string name;

    double gamma = 0.0;      // full_euler only
    PressureLaw pressure;    // isentropic only
    StateDomainBox box;

    std::function<Vec(const Vec&)> flux;
    std::function<double(const Vec&)> entropy;
    std::function<double(const Vec&)> entropy_flux;
    std::function<Vec(const Vec&)> grad_eta;
    std::function<Mat(const Vec&)> hess_eta;
    std::function<Mat(const Vec&)> jac_flux;
    std::function<double(const Vec&)> lambda_minus;
    std::function<double(const Vec&)> lambda_plus;
    std::function<bool(const Vec&)> domain_interior; // membership in the open box
    std::function<bool(const Vec&)> domain_closure;  // membership in its closure
    std::function<bool(const Vec&)> singular_set;    // vacuum-like states
    std::function<bool(Vec&)> apply_floor;           // optional; returns true if changed

    double fd_step_scale = 1e-6;
};

/// Gradient of the entropy, falling back to finite differences of `entropy`.
Vec grad_eta_of(const SystemSpec& sys, const Vec& u);

/// Hessian of the entropy; falls back to differencing `grad_eta` (or `entropy`).
Mat hess_eta_of(const SystemSpec& sys, const Vec& u);

/// Flux Jacobian; falls back to differencing `flux`.
Mat jac_flux_of(const SystemSpec& sys, const Vec& u);

/// Builds the x -> -x dual of a system: flux, entropy flux and Jacobian are
/// negated and the extreme wave speeds swap sign and role. One-family
/// structure of the dual matches the n-family structure of the original.
SystemSpec mirror_system(const SystemSpec& sys);

} // namespace shocklab
