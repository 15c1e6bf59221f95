#include "shocklab/system.hpp"

#include "shocklab/errors.hpp"
#include "shocklab/numerics.hpp"

namespace shocklab {

Vec grad_eta_of(const SystemSpec& sys, const Vec& u) {
    if (sys.grad_eta)
        return sys.grad_eta(u);
    return central_gradient(sys.entropy, u, sys.fd_step_scale);
}

Mat hess_eta_of(const SystemSpec& sys, const Vec& u) {
    if (sys.hess_eta)
        return sys.hess_eta(u);
    std::function<Vec(const Vec&)> g = [&sys](const Vec& v) { return grad_eta_of(sys, v); };
    Mat h = central_jacobian(g, u, sys.fd_step_scale);
    return 0.5 * (h + h.transpose().eval()); // symmetrize the FD noise
}

Mat jac_flux_of(const SystemSpec& sys, const Vec& u) {
    if (sys.jac_flux)
        return sys.jac_flux(u);
    return central_jacobian(sys.flux, u, sys.fd_step_scale);
}

SystemSpec mirror_system(const SystemSpec& sys) {
    SystemSpec dual = sys;
    dual.mirrored = !sys.mirrored;
    dual.name = sys.name + (sys.mirrored ? " (unmirrored)" : " (mirrored)");

    const auto flux = sys.flux;
    dual.flux = [flux](const Vec& u) -> Vec { return -flux(u); };
    const auto gflux = sys.entropy_flux;
    dual.entropy_flux = [gflux](const Vec& u) { return -gflux(u); };
    if (sys.jac_flux) {
        const auto jac = sys.jac_flux;
        dual.jac_flux = [jac](const Vec& u) -> Mat { return -jac(u); };
    }
    const auto lm = sys.lambda_minus;
    const auto lp = sys.lambda_plus;
    dual.lambda_minus = [lp](const Vec& u) { return -lp(u); };
    dual.lambda_plus = [lm](const Vec& u) { return -lm(u); };
    return dual;
}

} // namespace shocklab
