#include "dampnet/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dampnet/errors.hpp"

namespace dampnet {

std::vector<std::string> check_demand_spec(const JacobiDemandSpec& spec, double t0, double T) {
    std::vector<std::string> problems;
    auto add = [&](const std::string& what) { problems.push_back("demand " + spec.node_id + ": " + what); };
    if (!(spec.kappa > 0.0)) add("kappa must be > 0");
    if (!(spec.sigma >= 0.0)) add("sigma must be >= 0");
    if (!(spec.d0 >= 0.0 && spec.d0 <= 1.0)) add("d0 must lie in [0, 1]");
    if (spec.theta.lower_bound() < 0.0 || spec.theta.upper_bound() > 1.0) {
        // The amplitude bound is conservative; fall back to sampling the horizon.
        constexpr int kSamples = 4096;
        for (int k = 0; k <= kSamples; ++k) {
            const double t = t0 + (T - t0) * k / kSamples;
            const double v = spec.theta(t);
            if (v < 0.0 || v > 1.0) {
                std::ostringstream msg;
                msg << "theta leaves [0, 1] at t = " << t << " (value " << v << ")";
                add(msg.str());
                break;
            }
        }
    }
    return problems;
}

std::size_t DemandPath::index_of(double t, double tol) const {
    const double pos = (t - t0) / dt;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) * dt > tol || rounded < 0.0 || rounded >= static_cast<double>(values.size())) {
        std::ostringstream msg;
        msg << "time " << t << " is not on the demand grid (t0 = " << t0 << ", dt = " << dt
            << ", " << values.size() << " points)";
        throw DomainError(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

std::size_t sde_step_count(double t0, double T, double dt) {
    if (!(dt > 0.0)) throw DomainError("demand grid: dt must be positive");
    if (!(T > t0)) throw DomainError("demand grid: T must exceed t0");
    return static_cast<std::size_t>(std::ceil((T - t0) / dt - 1e-9));
}

DemandPath simulate_jacobi(const JacobiDemandSpec& spec, double t0, double T, double dt,
                           NormalStream& normals) {
    const std::size_t steps = sde_step_count(t0, T, dt);
    DemandPath path{t0, dt, {}};
    path.values.resize(steps + 1);
    double d = spec.d0;
    path.values[0] = d;
    const double sqrt_dt = std::sqrt(dt);
    for (std::size_t j = 0; j < steps; ++j) {
        const double t = path.time(j);
        const double x = normals();
        const double next = d + dt * spec.kappa * (spec.theta(t) - d) +
                            spec.sigma * sqrt_dt * std::sqrt(d * (1.0 - d)) * x;
        if (next >= 1.0) {
            d = 1.0;
        } else if (next <= 0.0) {
            d = 0.0;
        } else {
            d = next;
        }
        path.values[j + 1] = d;
    }
    return path;
}

DemandPath simulate_jacobi(const JacobiDemandSpec& spec, double t0, double T, double dt,
                           std::uint64_t rng_seed) {
    NormalStream normals(rng_seed);
    return simulate_jacobi(spec, t0, T, dt, normals);
}

double conditional_mean(const JacobiDemandSpec& spec, double t_cond, double d_cond, double t) {
    if (t < t_cond) {
        std::ostringstream msg;
        msg << "conditional_mean: t = " << t << " precedes conditioning time " << t_cond;
        throw DomainError(msg.str());
    }
    const double kappa = spec.kappa;
    const double decay = std::exp(-kappa * (t - t_cond));

    // m(t) = d·e^{−κ(t−s)} + κ∫ₛᵗ e^{−κ(t−r)} θ(r) dr, term by term.
    double m = d_cond * decay + spec.theta.constant_part() * (1.0 - decay);
    for (const auto& term : spec.theta.terms()) {
        const double w = term.angular_factor * std::numbers::pi;
        auto primitive = [&](double r) {
            return kappa * std::sin(w * r + term.phase) - w * std::cos(w * r + term.phase);
        };
        m += kappa * term.amplitude / (kappa * kappa + w * w) * (primitive(t) - decay * primitive(t_cond));
    }
    for (const auto& step : spec.theta.steps()) {
        const double on = std::max(t_cond, step.at);
        if (t > on) m += step.delta * (1.0 - std::exp(-kappa * (t - on)));
    }
    return m;
}

}  // namespace dampnet
