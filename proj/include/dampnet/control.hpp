#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dampnet/demand.hpp"
#include "dampnet/network.hpp"

namespace dampnet {

/// Conditional-mean demand at one node: m(t) = E[D_t | D_{t_cond} = d_cond].
struct ConditionalTarget {
    const JacobiDemandSpec* spec = nullptr;
    double t_cond = 0.0;
    double d_cond = 0.0;

    double at(double t) const;
};

/// Targets for every demand node of a network, indexed by node index.
class DemandTargets {
public:
    DemandTargets() = default;
    explicit DemandTargets(std::size_t node_count) : targets_(node_count) {}

    void set(NodeIndex node, ConditionalTarget target);
    double mean(NodeIndex node, double t) const;

private:
    std::vector<ConditionalTarget> targets_;
};

/// Reorders `specs` to follow net.demand_nodes(). Throws SchemaError when a
/// demand node has no spec or a spec names an unknown node.
std::vector<JacobiDemandSpec> align_demands(const TreeNetwork& net, std::span<const JacobiDemandSpec> specs);

/// Times at which a unit injected at t_in reaches the head of each arc of `path`.
std::vector<double> arrival_times(const TreeNetwork& net, const ArcPath& path, double t_in);

/// The characteristic tree spanned by one starting point (arc, time, position):
/// entry/exit times, velocities and damping masses of every downstream arc.
/// Depends on λ and μ only, so one plan serves any demand realization and
/// any damping shape.
class FluxPlan {
public:
    struct Segment {
        ArcIndex arc;
        std::size_t parent;  // npos for the starting segment
        NodeIndex demand;    // head node when it is a demand node, npos otherwise
        double t_enter;
        double t_exit;
        double lambda_enter;
        double lambda_exit;
        double damping_mass;
    };
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    FluxPlan() = default;
    /// Plan for the characteristic through `arc` at time `t`, `remaining`
    /// length units before the arc's head (remaining = length: arc entry).
    FluxPlan(const TreeNetwork& net, ArcIndex arc, double t, double remaining);

    /// Required density z on the starting segment so that every downstream
    /// demand node receives its target flux. Damping shapes are read from
    /// `net`, which must share the plan's topology.
    double required_density(const TreeNetwork& net, const DemandTargets& targets) const;
    /// λ(t)·required_density: the flux the starting point must carry.
    double required_flux(const TreeNetwork& net, const DemandTargets& targets) const;

    const std::vector<Segment>& segments() const { return segments_; }

private:
    void expand(const TreeNetwork& net, ArcIndex arc, double t, double remaining, std::size_t parent);

    std::vector<Segment> segments_;  // pre-order: parents before children
};

/// Flux that must enter `arc` at t_enter so that the whole subtree below it
/// delivers its conditional-mean targets. Throws InfeasibleError naming the
/// arc whose backward damping blows up.
double required_flux_into_arc(const TreeNetwork& net, ArcIndex arc, double t_enter,
                              const DemandTargets& targets);

/// Sequence of update times with the demand observed at each one.
struct InformationPolicy {
    std::vector<double> update_times;
    /// observations[j][k]: demand of the k-th demand node (net.demand_nodes()
    /// order) seen at update_times[j].
    std::vector<std::vector<double>> observations;

    /// Index of the latest update ≤ t (0 before the first update).
    std::size_t window_at(double t) const;
    /// Checks ordering and shape; throws DomainError.
    void check(std::size_t demand_count, double t0) const;
};

/// Conditional-mean targets for every update window of a policy.
class PolicyTargets {
public:
    /// `aligned` must follow net.demand_nodes(); it is referenced, not copied.
    PolicyTargets(const TreeNetwork& net, std::span<const JacobiDemandSpec> aligned,
                  const InformationPolicy& policy);

    std::size_t window_count() const { return windows_.size(); }
    const DemandTargets& window(std::size_t j) const { return windows_.at(j); }
    const InformationPolicy& policy() const { return policy_; }

private:
    InformationPolicy policy_;
    std::vector<DemandTargets> windows_;
};

/// Inflow u(t_in) ≥ 0 on the injection grid; `window[i]` is the update
/// window whose information produced values[i].
struct InflowProfile {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<std::size_t> window;
};

/// Precomputed root-arc plans for an injection grid.
class InflowPlanner {
public:
    InflowPlanner(const TreeNetwork& net, std::span<const double> injection_grid);

    InflowProfile profile(const TreeNetwork& net, const PolicyTargets& targets) const;

private:
    std::vector<double> grid_;
    std::vector<FluxPlan> plans_;
};

/// u(t_in) = required flux into the root arc with targets from the latest
/// update ≤ t_in. Infeasibility is rethrown annotated with t_in.
InflowProfile optimal_inflow_profile(const TreeNetwork& net, std::span<const JacobiDemandSpec> demands,
                                     const InformationPolicy& policy, std::span<const double> injection_grid);

/// Flux split at a junction.
struct Split {
    std::vector<double> alpha;  // aligned with net.outgoing(junction)
    bool degenerate = false;    // all required fluxes were zero; equal split used
};

/// α_k = R_k / Σ_j R_j with R_k the required flux into outgoing arc k at t_junction.
Split distribution_params(const TreeNetwork& net, NodeIndex junction, double t_junction,
                          const DemandTargets& targets);
Split split_from_required(std::span<const double> required);

/// Initial arc state from backward characteristics: cell l (right edge at
/// (l+1)·dx) holds the density whose downstream evolution meets `targets`.
std::vector<double> warm_start_state(const TreeNetwork& net, ArcIndex arc, double dx, double t0,
                                     const DemandTargets& targets);

}  // namespace dampnet
