#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dampnet/control.hpp"
#include "dampnet/network.hpp"

namespace dampnet {

/// Per-arc space/time grid with CFL number exactly one: Δtⱼ = Δx/λ(tⱼ).
///
/// Cell l covers ((l)Δx, (l+1)Δx]; its value is read as the density at the
/// right edge, so the last cell is the arc outlet and a boundary value enters
/// cell 0 after one step.
struct ArcGrid {
    double dx = 0.0;
    std::size_t cells = 0;
    std::vector<double> times;  // times.front() = t0, times.back() ≥ T
    double cfl = 1.0;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

/// Throws DomainError unless dx divides the arc length.
ArcGrid make_arc_grid(const ArcSpec& arc, double dx, double t0, double T);

struct ArcState {
    std::vector<double> z;
};

/// One splitting step from grid.times[j] to grid.times[j+1]:
///   transport  z_l ← z_l − ν(z_l − z_{l−1}),  z_{−1} = boundary_flux/λ(tⱼ)
///   damping    z_l ← z_l − Δtⱼ·μ(t_{j+1})·ĝ(z_l)
/// Throws DomainError for a negative boundary flux and NumericsError if a
/// cell turns negative.
void step_arc(ArcState& state, const ArcGrid& grid, std::size_t j, const ArcSpec& arc, double boundary_flux);

/// Supplies the junction split used for the boundary of outgoing arcs.
class AlphaProvider {
public:
    virtual ~AlphaProvider() = default;
    /// α for every outgoing arc of `junction` (net.outgoing order), evaluated
    /// for the boundary of `child` at its grid step `step` (time t).
    virtual std::vector<double> split(NodeIndex junction, ArcIndex child, std::size_t step, double t) const = 0;
};

/// The same α at all times.
class FixedAlpha final : public AlphaProvider {
public:
    explicit FixedAlpha(std::vector<double> alpha) : alpha_(std::move(alpha)) {}
    std::vector<double> split(NodeIndex, ArcIndex, std::size_t, double) const override { return alpha_; }

private:
    std::vector<double> alpha_;
};

/// Boundary inflow u(t) of the root arc. Exact lookup when the profile
/// lives on the root arc's grid, linear interpolation otherwise.
class InflowSeries {
public:
    explicit InflowSeries(const InflowProfile& profile) : times_(profile.times), values_(profile.values) {}
    InflowSeries(std::vector<double> times, std::vector<double> values)
        : times_(std::move(times)), values_(std::move(values)) {}

    double at(std::size_t step, double t) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Linear interpolation in a sampled series; throws NumericsError outside
/// [times.front(), times.back()].
double interpolate(std::span<const double> times, std::span<const double> values, double t);

struct ArcTrace {
    ArcGrid grid;
    std::vector<double> inflow;   // boundary flux at grid.times[j], j < steps
    std::vector<double> outflow;  // λ(tⱼ)·z_last at every grid time
    std::vector<std::vector<double>> field;  // optional z snapshots
    std::vector<std::size_t> field_steps;
};

struct AlphaRecord {
    NodeIndex junction;
    ArcIndex child;
    double t;
    std::vector<double> alpha;
};

struct SupplySeries {
    std::vector<double> times;
    std::vector<double> values;
};

struct SimulationOptions {
    bool record_alpha = false;
    std::size_t field_stride = 0;  // 0: no field dump
};

struct NetworkSimulation {
    std::vector<ArcTrace> arcs;  // indexed by arc
    std::vector<AlphaRecord> alphas;

    /// Outflow of the arc feeding `demand` on that arc's grid.
    SupplySeries supply(const TreeNetwork& net, NodeIndex demand) const;
};

/// Forward simulation of the whole tree on [t0, T]. Arcs are processed in
/// topological order; a child's boundary flux is α·(parent outflow), the
/// outflow interpolated linearly onto the child's grid.
NetworkSimulation simulate_network(const TreeNetwork& net, const InflowSeries& inflow, const AlphaProvider& alpha,
                                   const std::vector<std::vector<double>>& initial_data, double t0, double T,
                                   double dx, const SimulationOptions& options = {});

/// Same with prebuilt grids (one per arc, as from make_arc_grid).
NetworkSimulation simulate_network(const TreeNetwork& net, const InflowSeries& inflow, const AlphaProvider& alpha,
                                   const std::vector<std::vector<double>>& initial_data,
                                   const std::vector<ArcGrid>& grids, const SimulationOptions& options = {});

/// Junction split plans for every outgoing-arc grid step, plus the arrival
/// of each update time at each junction. Immutable; shared across runs.
class SplitPlanCache {
public:
    SplitPlanCache(const TreeNetwork& net, const std::vector<ArcGrid>& grids, std::span<const double> update_times);

    /// Latest update whose injection has reached `junction` by time t.
    std::size_t window_at(NodeIndex junction, double t) const;
    /// Plans (one per sibling) for `child` at grid step `step`, or nullptr
    /// when the step is not cached at exactly time t.
    const std::vector<FluxPlan>* plans(ArcIndex child, std::size_t step, double t) const;

private:
    std::vector<std::vector<double>> update_arrivals_;  // [junction node][update]
    std::vector<std::vector<std::vector<FluxPlan>>> plans_;  // [child arc][step][sibling]
    std::vector<std::vector<double>> plan_times_;
};

/// α from backward-required fluxes under an information policy. The targets
/// used at a junction at time t come from the latest update whose injection
/// has reached the junction by t.
class PolicySplitter final : public AlphaProvider {
public:
    /// All three references must outlive the splitter.
    PolicySplitter(const SplitPlanCache& cache, const TreeNetwork& net, const PolicyTargets& targets)
        : cache_(cache), net_(net), targets_(targets) {}

    std::vector<double> split(NodeIndex junction, ArcIndex child, std::size_t step, double t) const override;

    /// Number of all-zero (equal split) evaluations so far.
    std::size_t degenerate_count() const { return degenerate_; }

private:
    const SplitPlanCache& cache_;
    const TreeNetwork& net_;
    const PolicyTargets& targets_;
    mutable std::size_t degenerate_ = 0;
};

}  // namespace dampnet
