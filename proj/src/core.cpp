#include "shocklab/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "shocklab/errors.hpp"
#include "shocklab/numerics.hpp"

namespace shocklab {

namespace {

void require_pair(const SystemSpec& sys, const Vec& u, const Vec& v) {
    if (!sys.domain_closure(u))
        throw DomainError(sys.name + ": first state outside the domain closure");
    if (sys.singular_set(v) || !sys.domain_interior(v))
        throw DomainError(sys.name + ": reference state not in the open interior");
}

} // namespace

double relative_entropy(const SystemSpec& sys, const Vec& u, const Vec& v) {
    require_pair(sys, u, v);
    const Vec g = grad_eta_of(sys, v);
    return sys.entropy(u) - sys.entropy(v) - g.dot(u - v);
}

double relative_flux(const SystemSpec& sys, const Vec& u, const Vec& v) {
    require_pair(sys, u, v);
    const Vec g = grad_eta_of(sys, v);
    return sys.entropy_flux(u) - sys.entropy_flux(v) - g.dot(sys.flux(u) - sys.flux(v));
}

double compatibility_residual(const SystemSpec& sys, const Vec& u, double step_scale) {
    if (!sys.domain_interior(u))
        throw DomainError(sys.name + ": compatibility residual needs an interior state");
    const Vec grad_g = central_gradient(sys.entropy_flux, u, step_scale);
    const Vec expected = jac_flux_of(sys, u).transpose() * grad_eta_of(sys, u);
    return (grad_g - expected).lpNorm<Eigen::Infinity>();
}

ComparabilityEstimate comparability_constants(const SystemSpec& sys,
                                              const std::vector<Vec>& omega,
                                              const std::vector<Vec>& ambient,
                                              int segment_samples) {
    if (omega.empty())
        throw DegenerateInput("comparability_constants: empty interior sample");
    for (const Vec& v : omega)
        if (!sys.domain_interior(v))
            throw DegenerateInput("comparability_constants: omega sample not interior");

    const std::vector<Vec>& amb = ambient.empty() ? omega : ambient;

    double lam_min = std::numeric_limits<double>::infinity();
    double lam_max = 0.0;
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    bool have_ratio = false;

    auto fold_hessian = [&](const Vec& w) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hess_eta_of(sys, w));
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo <= 0.0)
            throw DegenerateInput("comparability_constants: non-convex entropy detected "
                                  "(Hessian eigenvalue " + std::to_string(lo) + ")");
        lam_min = std::min(lam_min, lo);
        lam_max = std::max(lam_max, hi);
    };

    for (const Vec& v : omega) {
        for (const Vec& u : amb) {
            // Segment fully interior: the quadratic-form representation of
            // eta(u|v) is controlled by Hessian eigenvalues along the segment.
            bool interior = true;
            std::vector<Vec> pts;
            pts.reserve(segment_samples);
            for (int k = 0; k < segment_samples; ++k) {
                const double t = segment_samples == 1
                                     ? 0.0
                                     : static_cast<double>(k) / (segment_samples - 1);
                Vec w = v + t * (u - v);
                if (!sys.domain_interior(w)) {
                    interior = false;
                    break;
                }
                pts.push_back(std::move(w));
            }
            if (interior) {
                for (const Vec& w : pts)
                    fold_hessian(w);
            }
            // Far pairs (or pairs reaching the boundary) enter through their
            // direct ratio, which certifies them exactly.
            const double d2 = (u - v).squaredNorm();
            if (d2 > 0.0) {
                const double r = relative_entropy(sys, u, v) / d2;
                ratio_min = std::min(ratio_min, r);
                ratio_max = std::max(ratio_max, r);
                have_ratio = true;
            }
        }
    }

    ComparabilityEstimate est;
    est.c1 = 0.5 * lam_min;
    est.c2 = 0.5 * lam_max;
    if (have_ratio) {
        est.c1 = std::min(est.c1, ratio_min);
        est.c2 = std::max(est.c2, ratio_max);
    }
    std::ostringstream os;
    os << sys.name << ": " << omega.size() << " interior x " << amb.size()
       << " ambient samples, " << segment_samples << " points per segment";
    est.sample_region = os.str();
    return est;
}

} // namespace shocklab
