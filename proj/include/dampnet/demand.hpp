#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dampnet/random.hpp"
#include "dampnet/timefunc.hpp"

namespace dampnet {

/// Jacobi demand dD = κ(θ(t) − D)dt + σ√(D(1−D)) dW on [0, 1].
struct JacobiDemandSpec {
    std::string node_id;
    double kappa = 1.0;
    TimeFunction theta;
    double sigma = 0.0;
    double d0 = 0.0;

    bool operator==(const JacobiDemandSpec&) const = default;
};

/// Human-readable problems with a spec; empty when valid. θ is checked on
/// [t0, T] by its amplitude bound and, failing that, by sampling.
std::vector<std::string> check_demand_spec(const JacobiDemandSpec& spec, double t0, double T);

/// Demand values on the uniform grid t0 + j·dt.
struct DemandPath {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;

    double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
    std::size_t size() const { return values.size(); }
    /// Index of the grid point at `t`; throws DomainError when t is off-grid.
    std::size_t index_of(double t, double tol = 1e-9) const;
};

/// Number of SDE steps covering [t0, T]; throws DomainError on dt ≤ 0 or T ≤ t0.
std::size_t sde_step_count(double t0, double T, double dt);

/// Truncated Euler–Maruyama path
///
///     D* = D + Δt·κ(θ(tⱼ) − D) + σ·√(Δt·D(1−D))·X,   X ~ N(0,1)
///     D  = 1 if D* ≥ 1, 0 if D* ≤ 0, D* otherwise.
DemandPath simulate_jacobi(const JacobiDemandSpec& spec, double t0, double T, double dt,
                           std::uint64_t rng_seed);
DemandPath simulate_jacobi(const JacobiDemandSpec& spec, double t0, double T, double dt,
                           NormalStream& normals);

/// E[D_t | D_{t_cond} = d_cond]: the solution of m′ = κ(θ − m), m(t_cond) = d_cond,
/// in closed form for the TimeFunction family.
double conditional_mean(const JacobiDemandSpec& spec, double t_cond, double d_cond, double t);

}  // namespace dampnet
