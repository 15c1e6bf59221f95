#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shocklab/system.hpp"

namespace shocklab {

/// Extremal wave families: curves of states reachable from a base state by a
/// single discontinuity of the smallest (one_family) or largest (n_family)
/// characteristic speed.
enum class Family { one_family, n_family };

/// Tolerances shared by curve construction, classification and checkers.
struct HugoniotTolerances {
    double tol_rh = 1e-9;     // relative jump-relation residual per sample
    double tol_mono = 1e-7;   // speed-monotonicity / strengthening slack
    double tol_sign = 1e-10;  // admissible entropy production slack
    double gap_tol = 1e-6;    // minimal spectral gap for continuation
    double quad_tol = 1e-9;   // absolute quadrature tolerance
    double classify_rh_tol = 1e-6; // relative residual for NotADiscontinuity
};

/// A one-parameter family s -> (S(s), sigma(s)) with S(0) = base and
/// A(S(s)) - A(base) = sigma(s) (S(s) - base). For one_family curves the
/// jump (base, S(s)) travels at sigma(s); for n_family curves the jump is
/// (S(s), base). Parameterized by the density jump for the gas systems and
/// by arclength for generic continuation.
class ShockCurve {
public:
    virtual ~ShockCurve() = default;

    virtual Vec state(double s) const = 0;
    virtual double speed(double s) const = 0;
    virtual double s_max() const = 0;

    Family family() const { return family_; }
    const Vec& base() const { return base_; }

    /// sigma'(s); closed form where available, otherwise second-order
    /// differences (one-sided at the ends).
    virtual double speed_derivative(double s) const;

protected:
    ShockCurve(Family family, Vec base) : family_(family), base_(std::move(base)) {}
    Family family_;
    Vec base_;
};

/// Sampled curve data with per-sample audits.
struct ShockCurveSample {
    Family family = Family::one_family;
    Vec base;
    std::vector<double> s_grid;
    std::vector<Vec> states;
    std::vector<double> speeds;
    std::vector<double> rh_residual;         // max-norm jump-relation residual
    std::vector<double> entropy_production;  // <= 0 for admissible samples
    double s_max = 0.0;
};

/// Builds the curve for the system's kind: closed form for the gas systems
/// and the scalar system, predictor-corrector continuation otherwise.
/// Mirrored systems reuse the opposite family of the unmirrored formulas.
std::unique_ptr<ShockCurve> make_shock_curve(const SystemSpec& sys, const Vec& base,
                                             Family family,
                                             const HugoniotTolerances& tol = {});

/// Samples a curve and fills the audit columns.
ShockCurveSample sample_curve(const SystemSpec& sys, const ShockCurve& curve,
                              const std::vector<double>& s_grid);

/// Closed-form isentropic curve: density parameter s, states (rho+s, .) with
/// the momentum chosen so the jump relations hold to round-off.
ShockCurveSample shock_curve_isentropic(const SystemSpec& sys, const Vec& base,
                                        Family family, const std::vector<double>& s_grid);

/// Closed-form polytropic curve through the pressure/density jump relations.
ShockCurveSample shock_curve_full_euler(const SystemSpec& sys, const Vec& base,
                                        Family family, const std::vector<double>& s_grid);

/// Pseudo-arclength continuation of the jump relations; matches the closed
/// forms where both exist. Throws ContinuationStall / EigenvalueCollision.
ShockCurveSample shock_curve_continuation(const SystemSpec& sys, const Vec& base,
                                          Family family, double step, int n_steps,
                                          const HugoniotTolerances& tol = {});

enum class Classification { one_shock, n_shock, contact, intermediate, inadmissible };

/// Classification report for a single discontinuity.
///
/// Truth table (entropy_production measured against tol_sign):
///   inadmissible : entropy_production > 0 beyond tolerance
///   contact      : some characteristic speed equals sigma on both sides
///   one_shock    : lax_left && lax_right for the smallest-speed family
///   n_shock      : lax_left && lax_right for the largest-speed family
///   intermediate : anything else
/// For one_/n_shock, `lax_left`/`lax_right` refer to the classified family;
/// otherwise they carry the smallest-speed family inequalities.
/// `liu_monotone` / `strengthening` are established along the connecting
/// curve when one exists (`curve_checked`); for generic systems without a
/// reachable curve they fall back to the Lax booleans.
struct AdmissibilityReport {
    double sigma = 0.0;
    double rh_residual = 0.0;     // absolute, max norm
    double rh_residual_rel = 0.0; // relative to the jump size
    double entropy_production = 0.0;
    bool lax_left = false;
    bool lax_right = false;
    bool liu_monotone = false;
    bool strengthening = false;
    bool curve_checked = false;
    Classification classification = Classification::intermediate;
};

/// Least-squares speed fit plus admissibility classification of (u-, u+).
/// Throws NotADiscontinuity for degenerate jumps or residuals beyond
/// tol.classify_rh_tol relative to the jump.
AdmissibilityReport classify_discontinuity(const SystemSpec& sys, const Vec& u_minus,
                                           const Vec& u_plus,
                                           const HugoniotTolerances& tol = {});

/// Structural checks along one curve plus a cross-family admissibility sweep
/// near the base. Never throws; failures are carried in the report.
struct HypothesisReport {
    bool speed_at_origin_ok = false; // sigma(0) equals the extremal speed
    double speed_origin_error = 0.0;
    bool liu_monotone = false;       // sigma' has the family's sign everywhere
    bool is_contact = false;         // sigma' vanishes identically
    bool strengthening_ok = false;   // d/ds eta(base | S(s)) >= 0 (skipped for contacts)
    double min_strengthening_derivative = 0.0;
    std::vector<std::pair<double, double>> liu_violations; // (s, sigma')
    bool h2_ok = false;
    bool h3_ok = false;
    int h2_checked = 0;
    int h3_checked = 0;
    std::vector<std::string> failures;

    bool all_ok() const {
        return speed_at_origin_ok && liu_monotone && (is_contact || strengthening_ok) &&
               h2_ok && h3_ok;
    }
};

HypothesisReport check_hypotheses(const SystemSpec& sys, const ShockCurve& curve,
                                  int grid_points = 41, double s_cap = -1.0,
                                  const HugoniotTolerances& tol = {});

/// phi(s) = ((rho+s)/rho) (P(rho+s)-P(rho))/s and its derivative by two
/// independent routes: central differences and the weighted quadrature of
/// [q P(q)]''. phi'(0) = [rho P(rho)]''/(2 rho).
struct ConvexityProfile {
    std::vector<double> s;
    std::vector<double> phi;
    std::vector<double> dphi_fd;
    std::vector<double> dphi_quad;
    double phi_at_zero = 0.0;  // = P'(rho)
    double dphi_at_zero = 0.0; // = [rho P]''/(2 rho)
};

ConvexityProfile pressure_convexity_profile(const PressureLaw& law, double rho,
                                            const std::vector<double>& s_grid,
                                            const HugoniotTolerances& tol = {});

/// Residual of the identity expressing the relative-entropy flux drop across
/// the jump (base, S(s)) against any reference state v:
///   [F(S(s),v) - sigma(s) eta(S(s)|v)] - [F(base,v) - sigma(s) eta(base|v)]
///     = int_0^s sigma'(t) eta(base | S(t)) dt.
struct IdentityCheck {
    double lhs = 0.0;      // left side of the identity (or inequality)
    double integral = 0.0; // quadrature value of the right side
    double residual = 0.0; // |lhs - integral|
    // lhs in the curve's tracking orientation: the one-family form as is,
    // the n-family form negated (the x -> -x dual). <= 0 on admissible curves.
    double oriented_lhs = 0.0;
};

IdentityCheck verify_entropy_loss_identity(const SystemSpec& sys, const ShockCurve& curve,
                                           const Vec& v, double s,
                                           const HugoniotTolerances& tol = {});

/// The key dissipation inequality between two points of one curve:
///   F(S(s),S(s0)) - sigma(s) eta(S(s)|S(s0))
///     = int_{s0}^{s} sigma'(t) (eta(base|S(t)) - eta(base|S(s0))) dt <= 0.
IdentityCheck verify_curve_dissipation(const SystemSpec& sys, const ShockCurve& curve,
                                       double s, double s0,
                                       const HugoniotTolerances& tol = {});

/// Finite-difference Lipschitz estimate of base -> s_max over a base grid
/// (reported, not asserted).
double s_max_lipschitz_estimate(const SystemSpec& sys, Family family,
                                const std::vector<Vec>& bases);

} // namespace shocklab
