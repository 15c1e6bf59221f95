#pragma once

#include <string>
#include <vector>

#include "shocklab/system.hpp"

namespace shocklab {

/// P(rho) = rho^gamma, gamma > 1. Closed-form S(rho) = rho^gamma/(gamma-1).
PressureLaw power_pressure_law(double gamma);

/// Hyperbolic (P' > 0) law whose [rho P(rho)]'' changes sign, so speed
/// monotonicity fails along part of every curve that crosses the dip.
PressureLaw nonconvex_pressure_law();

/// P(rho) = 2 - 1/rho on (0.55, 5): [rho P]'' = 0, so every curve is a
/// contact family with constant speed.
PressureLaw contact_pressure_law();

/// Monotone-cubic interpolated law through (rho, P) pairs; S and S' are
/// integrated numerically at construction.
PressureLaw tabulated_pressure_law(const std::vector<std::pair<double, double>>& table);

/// Isentropic gas dynamics in conserved variables (rho, rho u).
/// Wave speeds u -+ sqrt(P'(rho)); the vacuum (0,0) lies in the closure and
/// in the singular set. Throws ConfigError if P' <= 0 anywhere on the range.
SystemSpec make_isentropic(const PressureLaw& law, const StateDomainBox& box = {});

/// Polytropic gas dynamics in conserved variables (rho, rho u, rho E).
/// e = E - u^2/2 is recovered internally; entropy evaluation enforces
/// e >= 1e-12 and throws DomainError below it. Requires gamma > 1.
SystemSpec make_full_euler(double gamma, const StateDomainBox& box = {});

/// Scalar sanity system: m = 1, eta = u^2/2, entropy flux by quadrature.
SystemSpec make_scalar_convex(std::function<double(double)> flux,
                              std::function<double(double)> dflux = {});

/// Parses a JSON config document (see README for the schema).
SystemSpec parse_system_config_text(const std::string& json_text);

/// Loads and parses a config file. ConfigError carries field diagnostics.
SystemSpec load_system_config(const std::string& path);

/// Conserved state from isentropic primitives.
Vec isentropic_state(double rho, double u);

/// Conserved state from full-Euler primitives (rho, u, e).
Vec full_euler_state(double rho, double u, double e);

struct EulerPrimitives {
    double rho = 0, u = 0, e = 0, E = 0, p = 0;
};

/// Primitive decomposition of a conserved state for either Euler system.
EulerPrimitives euler_primitives(const SystemSpec& sys, const Vec& state);

} // namespace shocklab
