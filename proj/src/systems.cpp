#include "shocklab/systems.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "config_internal.hpp"
#include "shocklab/errors.hpp"
#include "shocklab/numerics.hpp"

namespace shocklab {

namespace {

constexpr double kEnergyFloor = 1e-12;

/// Hermite evaluator for a cumulative antiderivative of `f` on a uniform
/// grid: node values by composite Simpson, node derivatives equal to f.
class CumulativeIntegral {
public:
    CumulativeIntegral(const std::function<double(double)>& f, double lo, double hi,
                       int n_intervals, double x0_value = 0.0) {
        x_.resize(n_intervals + 1);
        y_.resize(n_intervals + 1);
        d_.resize(n_intervals + 1);
        const double h = (hi - lo) / n_intervals;
        x_[0] = lo;
        y_[0] = x0_value;
        d_[0] = f(lo);
        for (int i = 0; i < n_intervals; ++i) {
            const double a = lo + i * h;
            const double b = a + h;
            const double fm = f(0.5 * (a + b));
            const double fb = f(b);
            x_[i + 1] = b;
            d_[i + 1] = fb;
            y_[i + 1] = y_[i] + h / 6.0 * (d_[i] + 4.0 * fm + fb);
        }
    }

    double operator()(double x) const {
        const int n = static_cast<int>(x_.size()) - 1;
        const double h = x_[1] - x_[0];
        int i = static_cast<int>((x - x_[0]) / h);
        i = std::clamp(i, 0, n - 1);
        const double t = (x - x_[i]) / h;
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

private:
    std::vector<double> x_, y_, d_;
};

void fill_entropy_parts(PressureLaw& law) {
    if (law.s && law.s_prime)
        return;
    // S'' = P'/rho integrated twice from the low end of the range; the
    // affine normalization is immaterial for relative quantities.
    const double lo = law.rho_min > 0.0 ? law.rho_min : 1e-6 * law.rho_max;
    const auto dp = law.dp;
    auto sp = std::make_shared<CumulativeIntegral>(
        [dp](double q) { return dp(q) / q; }, lo, law.rho_max, 4096);
    auto s = std::make_shared<CumulativeIntegral>(
        [sp](double q) { return (*sp)(q); }, lo, law.rho_max, 4096);
    law.s_prime = [sp](double rho) { return (*sp)(rho); };
    law.s = [s](double rho) { return (*s)(rho); };
}

void validate_hyperbolic(const PressureLaw& law) {
    const double lo = law.rho_min > 0.0 ? law.rho_min : 1e-6 * law.rho_max;
    for (int i = 0; i <= 256; ++i) {
        const double rho = lo + (law.rho_max - lo) * i / 256.0;
        if (!(law.dp(rho) > 0.0)) {
            std::ostringstream os;
            os << "pressure law '" << law.name << "': P'(" << rho << ") = " << law.dp(rho)
               << " is not positive";
            throw ConfigError(os.str());
        }
    }
}

} // namespace

PressureLaw power_pressure_law(double gamma) {
    if (!(gamma > 1.0))
        throw ConfigError("power pressure law requires gamma > 1, got " +
                          std::to_string(gamma));
    PressureLaw law;
    law.name = "power(gamma=" + std::to_string(gamma) + ")";
    law.rho_min = 0.0;
    law.rho_max = 1e6;
    law.p = [gamma](double rho) { return std::pow(rho, gamma); };
    law.dp = [gamma](double rho) { return gamma * std::pow(rho, gamma - 1.0); };
    law.d2_rho_p = [gamma](double rho) {
        return gamma * (gamma + 1.0) * std::pow(rho, gamma - 1.0);
    };
    law.s = [gamma](double rho) { return std::pow(rho, gamma) / (gamma - 1.0); };
    law.s_prime = [gamma](double rho) {
        return gamma * std::pow(rho, gamma - 1.0) / (gamma - 1.0);
    };
    return law;
}

PressureLaw nonconvex_pressure_law() {
    // P'(rho) = a + 1/(1 + b (rho-1)^2): positive everywhere, but
    // [rho P]'' = 2P' + rho P'' dips negative just right of rho = 1.
    constexpr double a = 0.05;
    constexpr double b = 50.0;
    const double sb = std::sqrt(b);
    const double A = 1.0 / (1.0 + b);

    PressureLaw law;
    law.name = "nonconvex";
    law.rho_min = 0.0;
    law.rho_max = 5.0;
    law.p = [=](double rho) {
        return 0.01 + a * rho + (std::atan(sb * (rho - 1.0)) + std::atan(sb)) / sb;
    };
    law.dp = [=](double rho) {
        const double x = rho - 1.0;
        return a + 1.0 / (1.0 + b * x * x);
    };
    law.d2_rho_p = [=](double rho) {
        const double x = rho - 1.0;
        const double q = 1.0 + b * x * x;
        const double ddp = -2.0 * b * x / (q * q);
        return 2.0 * (a + 1.0 / q) + rho * ddp;
    };
    law.s_prime = [=](double rho) {
        const double x = rho - 1.0;
        return (a + A) * std::log(rho) - 0.5 * A * std::log(1.0 + b * x * x) +
               A * sb * std::atan(sb * x);
    };
    law.s = [=](double rho) {
        const double x = rho - 1.0;
        const double xt = sb * x;
        const double i2 = x * std::log(1.0 + b * x * x) - 2.0 * x + 2.0 / sb * std::atan(xt);
        const double i3 = (xt * std::atan(xt) - 0.5 * std::log1p(xt * xt)) / sb;
        const double plnp = rho > 0.0 ? rho * std::log(rho) : 0.0;
        return (a + A) * (plnp - rho + 1.0) - 0.5 * A * i2 + A * sb * i3;
    };
    return law;
}

PressureLaw contact_pressure_law() {
    PressureLaw law;
    law.name = "contact";
    law.rho_min = 0.55;
    law.rho_max = 5.0;
    law.p = [](double rho) { return 2.0 - 1.0 / rho; };
    law.dp = [](double rho) { return 1.0 / (rho * rho); };
    law.d2_rho_p = [](double) { return 0.0; };
    law.s = [](double rho) { return 0.5 / rho; };
    law.s_prime = [](double rho) { return -0.5 / (rho * rho); };
    return law;
}

PressureLaw tabulated_pressure_law(const std::vector<std::pair<double, double>>& table) {
    if (table.size() < 4)
        throw ConfigError("tabulated pressure law needs at least 4 (rho, P) pairs");
    std::vector<double> xs, ys;
    for (const auto& [rho, p] : table) {
        xs.push_back(rho);
        ys.push_back(p);
    }
    auto interp = std::make_shared<MonotoneCubic>(std::move(xs), std::move(ys));

    PressureLaw law;
    law.name = "tabulated";
    law.rho_min = interp->x_min();
    law.rho_max = interp->x_max();
    law.p = [interp](double rho) { return (*interp)(rho); };
    law.dp = [interp](double rho) { return interp->derivative(rho); };
    law.d2_rho_p = [interp](double rho) {
        return 2.0 * interp->derivative(rho) + rho * interp->second_derivative(rho);
    };
    validate_hyperbolic(law);
    fill_entropy_parts(law);
    return law;
}

Vec isentropic_state(double rho, double u) {
    return state2(rho, rho * u);
}

Vec full_euler_state(double rho, double u, double e) {
    return state3(rho, rho * u, rho * (e + 0.5 * u * u));
}

EulerPrimitives euler_primitives(const SystemSpec& sys, const Vec& state) {
    EulerPrimitives pr;
    pr.rho = state[0];
    pr.u = pr.rho > 0.0 ? state[1] / pr.rho : 0.0;
    if (sys.kind == SystemKind::full_euler) {
        pr.E = pr.rho > 0.0 ? state[2] / pr.rho : 0.0;
        pr.e = pr.E - 0.5 * pr.u * pr.u;
        pr.p = (sys.gamma - 1.0) * pr.rho * pr.e;
    } else if (sys.kind == SystemKind::isentropic) {
        pr.p = sys.pressure.p(pr.rho);
    }
    return pr;
}

SystemSpec make_isentropic(const PressureLaw& law_in, const StateDomainBox& box) {
    if (!law_in.valid())
        throw ConfigError("make_isentropic: invalid pressure law");
    PressureLaw law = law_in;
    validate_hyperbolic(law);
    fill_entropy_parts(law);

    SystemSpec sys;
    sys.m = 2;
    sys.kind = SystemKind::isentropic;
    sys.name = "isentropic[" + law.name + "]";
    sys.pressure = law;
    sys.box = box;

    const double K = box.k_bound;
    const double rho_floor = box.rho_floor;
    const double rho_lo = law.rho_min;
    const double rho_hi = std::min(K, law.rho_max);

    sys.flux = [law](const Vec& w) -> Vec {
        const double a = w[0], b = w[1];
        const double kin = a > 0.0 ? b * b / a : 0.0;
        return state2(b, kin + law.p(std::max(a, 0.0)));
    };
    sys.entropy = [law](const Vec& w) {
        const double a = w[0], b = w[1];
        if (a <= 0.0) {
            if (b != 0.0)
                throw DomainError("isentropic entropy at vacuum with nonzero momentum");
            return law.s(std::max(a, 0.0));
        }
        return 0.5 * b * b / a + law.s(a);
    };
    sys.entropy_flux = [law](const Vec& w) {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            return 0.0;
        return 0.5 * b * b * b / (a * a) + b * law.s_prime(a);
    };
    sys.grad_eta = [law](const Vec& w) -> Vec {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            throw DomainError("isentropic entropy gradient undefined at vacuum");
        return state2(-0.5 * b * b / (a * a) + law.s_prime(a), b / a);
    };
    sys.hess_eta = [law](const Vec& w) -> Mat {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            throw DomainError("isentropic entropy Hessian undefined at vacuum");
        Mat h(2, 2);
        const double spp = law.dp(a) / a; // S'' = P'/rho
        h << b * b / (a * a * a) + spp, -b / (a * a), -b / (a * a), 1.0 / a;
        return h;
    };
    sys.jac_flux = [law](const Vec& w) -> Mat {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            throw DomainError("isentropic flux Jacobian undefined at vacuum");
        const double u = b / a;
        Mat j(2, 2);
        j << 0.0, 1.0, law.dp(a) - u * u, 2.0 * u;
        return j;
    };
    sys.lambda_minus = [law](const Vec& w) {
        const double a = std::max(w[0], 0.0);
        const double u = a > 0.0 ? w[1] / a : 0.0;
        return u - std::sqrt(law.dp(std::max(a, 1e-300)));
    };
    sys.lambda_plus = [law](const Vec& w) {
        const double a = std::max(w[0], 0.0);
        const double u = a > 0.0 ? w[1] / a : 0.0;
        return u + std::sqrt(law.dp(std::max(a, 1e-300)));
    };
    sys.domain_interior = [K, rho_floor, rho_lo, rho_hi](const Vec& w) {
        const double a = w[0];
        if (!(a > std::max(rho_floor, rho_lo)) || !(a < rho_hi))
            return false;
        const double u = w[1] / a;
        return std::abs(u) < K && w.allFinite();
    };
    sys.domain_closure = [K, rho_floor, rho_lo, rho_hi](const Vec& w) {
        const double a = w[0];
        if (!w.allFinite() || a < 0.0)
            return false;
        if (a <= std::max(rho_floor, rho_lo))
            return rho_lo == 0.0 && std::abs(w[1]) <= K * a;
        return a <= rho_hi && std::abs(w[1] / a) <= K;
    };
    sys.singular_set = [rho_floor](const Vec& w) { return w[0] <= rho_floor; };
    sys.apply_floor = [rho_floor](Vec& w) {
        if (w[0] < rho_floor) {
            w[0] = rho_floor;
            w[1] = 0.0;
            return true;
        }
        return false;
    };
    return sys;
}

SystemSpec make_full_euler(double gamma, const StateDomainBox& box) {
    if (!(gamma > 1.0))
        throw ConfigError("make_full_euler requires gamma > 1, got " +
                          std::to_string(gamma));

    SystemSpec sys;
    sys.m = 3;
    sys.kind = SystemKind::full_euler;
    sys.name = "full_euler[gamma=" + std::to_string(gamma) + "]";
    sys.gamma = gamma;
    sys.box = box;

    const double K = box.k_bound;
    const double rho_floor = box.rho_floor;

    auto internal_energy = [](const Vec& w) {
        const double a = w[0];
        if (a <= 0.0)
            return 0.0;
        const double u = w[1] / a;
        return w[2] / a - 0.5 * u * u;
    };
    auto checked_energy = [internal_energy](const Vec& w) {
        const double e = internal_energy(w);
        if (e < kEnergyFloor)
            throw DomainError("full Euler internal energy below floor: e = " +
                              std::to_string(e));
        return e;
    };

    sys.flux = [gamma](const Vec& w) -> Vec {
        const double a = w[0], b = w[1], c = w[2];
        if (a <= 0.0)
            return state3(0.0, 0.0, 0.0);
        const double u = b / a;
        const double p = (gamma - 1.0) * (c - 0.5 * b * u);
        return state3(b, b * u + p, (c + p) * u);
    };
    sys.entropy = [gamma, checked_energy](const Vec& w) {
        const double a = w[0];
        if (a <= 0.0) {
            if (w[1] != 0.0 || w[2] != 0.0)
                throw DomainError("full Euler entropy at vacuum with nonzero momentum/energy");
            return 0.0;
        }
        const double e = checked_energy(w);
        return (gamma - 1.0) * a * std::log(a) - a * std::log(e);
    };
    sys.entropy_flux = [gamma, checked_energy](const Vec& w) {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            return 0.0;
        const double e = checked_energy(w);
        return (gamma - 1.0) * b * std::log(a) - b * std::log(e);
    };
    sys.grad_eta = [gamma, checked_energy](const Vec& w) -> Vec {
        const double a = w[0], b = w[1];
        if (a <= 0.0)
            throw DomainError("full Euler entropy gradient undefined at vacuum");
        const double e = checked_energy(w);
        const double u = b / a;
        return state3((gamma - 1.0) * (std::log(a) + 1.0) - std::log(e) + 1.0 -
                          0.5 * u * u / e,
                      u / e, -1.0 / e);
    };
    sys.jac_flux = [gamma, checked_energy](const Vec& w) -> Mat {
        const double a = w[0], b = w[1], c = w[2];
        if (a <= 0.0)
            throw DomainError("full Euler flux Jacobian undefined at vacuum");
        checked_energy(w);
        const double u = b / a;
        const double p = (gamma - 1.0) * (c - 0.5 * b * u);
        const double H = (c + p) / a;
        Mat j(3, 3);
        j << 0.0, 1.0, 0.0,
            0.5 * (gamma - 3.0) * u * u, (3.0 - gamma) * u, gamma - 1.0,
            0.5 * (gamma - 1.0) * u * u * u - u * H, H - (gamma - 1.0) * u * u, gamma * u;
        return j;
    };
    sys.lambda_minus = [gamma, internal_energy](const Vec& w) {
        const double a = w[0];
        const double u = a > 0.0 ? w[1] / a : 0.0;
        const double e = std::max(internal_energy(w), 0.0);
        return u - std::sqrt(gamma * (gamma - 1.0) * e);
    };
    sys.lambda_plus = [gamma, internal_energy](const Vec& w) {
        const double a = w[0];
        const double u = a > 0.0 ? w[1] / a : 0.0;
        const double e = std::max(internal_energy(w), 0.0);
        return u + std::sqrt(gamma * (gamma - 1.0) * e);
    };
    sys.domain_interior = [K, rho_floor, internal_energy](const Vec& w) {
        const double a = w[0];
        if (!w.allFinite() || !(a > rho_floor) || !(a < K))
            return false;
        const double u = w[1] / a;
        const double E = w[2] / a;
        return internal_energy(w) > kEnergyFloor && std::abs(u) < K && E > 0.0 && E < K;
    };
    sys.domain_closure = [K, rho_floor, internal_energy](const Vec& w) {
        const double a = w[0];
        if (!w.allFinite() || a < 0.0)
            return false;
        if (a <= rho_floor)
            return std::abs(w[1]) <= K * a && w[2] >= 0.0 && w[2] <= K * a;
        const double u = w[1] / a;
        const double E = w[2] / a;
        return a <= K && std::abs(u) <= K && E >= 0.0 && E <= K &&
               internal_energy(w) >= 0.0;
    };
    sys.singular_set = [rho_floor](const Vec& w) { return w[0] <= rho_floor; };
    sys.apply_floor = [rho_floor, internal_energy](Vec& w) {
        bool changed = false;
        if (w[0] < rho_floor) {
            w[0] = rho_floor;
            w[1] = 0.0;
            w[2] = rho_floor * kEnergyFloor;
            return true;
        }
        if (internal_energy(w) < kEnergyFloor) {
            const double u = w[1] / w[0];
            w[2] = w[0] * (kEnergyFloor + 0.5 * u * u);
            changed = true;
        }
        return changed;
    };
    return sys;
}

SystemSpec make_scalar_convex(std::function<double(double)> flux,
                              std::function<double(double)> dflux) {
    if (!dflux) {
        auto f = flux;
        dflux = [f](double u) { return central_derivative(f, u, fd_step(u)); };
    }
    SystemSpec sys;
    sys.m = 1;
    sys.kind = SystemKind::scalar;
    sys.name = "scalar";
    sys.box.k_bound = 1e6;
    sys.box.rho_floor = 0.0;

    auto f = flux;
    auto df = dflux;
    sys.flux = [f](const Vec& w) -> Vec { return state1(f(w[0])); };
    sys.entropy = [](const Vec& w) { return 0.5 * w[0] * w[0]; };
    // G(u) = u f(u) - int_0^u f, so that G' = u f'.
    sys.entropy_flux = [f](const Vec& w) {
        const double u = w[0];
        return u * f(u) - adaptive_simpson(f, 0.0, u, 1e-12, 40);
    };
    sys.grad_eta = [](const Vec& w) -> Vec { return state1(w[0]); };
    sys.hess_eta = [](const Vec&) -> Mat {
        Mat h(1, 1);
        h << 1.0;
        return h;
    };
    sys.jac_flux = [df](const Vec& w) -> Mat {
        Mat j(1, 1);
        j << df(w[0]);
        return j;
    };
    sys.lambda_minus = [df](const Vec& w) { return df(w[0]); };
    sys.lambda_plus = [df](const Vec& w) { return df(w[0]); };
    const double K = sys.box.k_bound;
    sys.domain_interior = [K](const Vec& w) {
        return w.allFinite() && std::abs(w[0]) < K;
    };
    sys.domain_closure = [K](const Vec& w) {
        return w.allFinite() && std::abs(w[0]) <= K;
    };
    sys.singular_set = [](const Vec&) { return false; };
    return sys;
}

namespace detail {

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("missing required config field '" + key + "'");
    if (!j.at(key).is_number())
        throw ConfigError("config field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

double number_or(const nlohmann::json& j, const std::string& key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("config field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

SystemSpec make_system_from_json(const nlohmann::json& j) {
    if (!j.contains("type"))
        throw ConfigError("missing required config field 'type'");
    const std::string type = j.at("type").get<std::string>();

    StateDomainBox box;
    box.k_bound = number_or(j, "K", 10.0);
    box.rho_floor = number_or(j, "rho_floor", 1e-10);

    if (type == "isentropic") {
        PressureLaw law;
        if (j.contains("pressure_table")) {
            std::vector<std::pair<double, double>> table;
            for (const auto& row : j.at("pressure_table")) {
                if (!row.is_array() || row.size() != 2)
                    throw ConfigError("'pressure_table' rows must be [rho, P] pairs");
                table.emplace_back(row[0].get<double>(), row[1].get<double>());
            }
            law = tabulated_pressure_law(table);
        } else {
            const std::string name =
                j.contains("pressure_law") ? j.at("pressure_law").get<std::string>() : "power";
            if (name == "power") {
                const double gamma = require_number(j, "gamma");
                if (!(gamma > 1.0))
                    throw ConfigError("field 'gamma': bundled power laws require gamma > 1");
                law = power_pressure_law(gamma);
            } else if (name == "nonconvex") {
                law = nonconvex_pressure_law();
            } else if (name == "contact") {
                law = contact_pressure_law();
            } else {
                throw ConfigError("unknown pressure_law '" + name + "'");
            }
        }
        return make_isentropic(law, box);
    }
    if (type == "full_euler") {
        return make_full_euler(require_number(j, "gamma"), box);
    }
    if (type == "scalar") {
        const std::string flux =
            j.contains("flux") ? j.at("flux").get<std::string>() : "burgers";
        if (flux != "burgers")
            throw ConfigError("unknown scalar flux '" + flux + "'");
        return make_scalar_convex([](double u) { return 0.5 * u * u; },
                                  [](double u) { return u; });
    }
    throw ConfigError("unknown system type '" + type + "'");
}

} // namespace detail

SystemSpec parse_system_config_text(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return detail::make_system_from_json(j);
}

SystemSpec load_system_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system_config_text(ss.str());
}

} // namespace shocklab
