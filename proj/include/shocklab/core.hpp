#pragma once

#include <string>
#include <vector>

#include "shocklab/system.hpp"

namespace shocklab {

/// Two-sided quadratic comparability constants for the relative entropy:
/// c1 |u-v|^2 <= eta(u|v) <= c2 |u-v|^2 on the sampled region.
struct ComparabilityEstimate {
    double c1 = 0.0;
    double c2 = 0.0;
    std::string sample_region;
};

/// eta(u|v) = eta(u) - eta(v) - grad_eta(v).(u - v).
///
/// Requires u in the domain closure and v in the open interior; throws
/// DomainError otherwise (the gradient is undefined on the singular set).
/// Nonnegative, and zero exactly at u = v.
double relative_entropy(const SystemSpec& sys, const Vec& u, const Vec& v);

/// F(u,v) = G(u) - G(v) - grad_eta(v).(A(u) - A(v)); the flux companion of
/// the relative entropy. F(v,v) = 0.
double relative_flux(const SystemSpec& sys, const Vec& u, const Vec& v);

/// Max-norm residual of the entropy-pair compatibility relation
/// grad G = grad_eta^T . jac A, with grad G taken by central differences of G.
/// A nonzero residual pinpoints a miswired entropy pair.
double compatibility_residual(const SystemSpec& sys, const Vec& u,
                              double step_scale = 1e-6);

/// Builds comparability constants from extremal entropy-Hessian eigenvalues
/// sampled along the segments joining `ambient` points to `omega` points,
/// together with direct ratios eta(u|v)/|u-v|^2 for pairs whose segment
/// leaves the open domain. `omega` must be a nonempty sample of the interior;
/// throws DegenerateInput otherwise or when a non-convex entropy is detected.
ComparabilityEstimate comparability_constants(const SystemSpec& sys,
                                              const std::vector<Vec>& omega,
                                              const std::vector<Vec>& ambient,
                                              int segment_samples = 17);

} // namespace shocklab
