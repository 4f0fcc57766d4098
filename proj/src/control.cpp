#include "dampnet/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dampnet/damping.hpp"
#include "dampnet/errors.hpp"

namespace dampnet {

double ConditionalTarget::at(double t) const {
    if (spec == nullptr) throw DomainError("conditional target has no demand spec");
    return conditional_mean(*spec, t_cond, d_cond, t);
}

void DemandTargets::set(NodeIndex node, ConditionalTarget target) {
    if (node >= targets_.size()) targets_.resize(node + 1);
    targets_[node] = target;
}

double DemandTargets::mean(NodeIndex node, double t) const {
    if (node >= targets_.size() || targets_[node].spec == nullptr) {
        throw DomainError("no demand target for node index " + std::to_string(node));
    }
    const double m = targets_[node].at(t);
    if (m < 0.0) {
        std::ostringstream msg;
        msg << "negative target mean " << m << " for demand node '" << targets_[node].spec->node_id << "'";
        throw DomainError(msg.str());
    }
    return m;
}

std::vector<JacobiDemandSpec> align_demands(const TreeNetwork& net, std::span<const JacobiDemandSpec> specs) {
    std::vector<JacobiDemandSpec> aligned;
    for (NodeIndex d : net.demand_nodes()) {
        const auto& id = net.node(d).id;
        const auto it = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return s.node_id == id; });
        if (it == specs.end()) throw SchemaError("demand node '" + id + "' has no demand spec");
        aligned.push_back(*it);
    }
    for (const auto& s : specs) {
        const auto n = net.find_node(s.node_id);
        if (!n || net.node(*n).kind != NodeKind::demand) {
            throw SchemaError("demand spec refers to '" + s.node_id + "', which is not a demand node");
        }
    }
    return aligned;
}

std::vector<double> arrival_times(const TreeNetwork& net, const ArcPath& path, double t_in) {
    std::vector<double> times;
    times.reserve(path.size());
    double t = t_in;
    for (ArcIndex a : path) {
        const auto& arc = net.arc(a);
        t = arc.velocity.advance_by_integral(t, arc.length);
        times.push_back(t);
    }
    return times;
}

FluxPlan::FluxPlan(const TreeNetwork& net, ArcIndex arc, double t, double remaining) {
    expand(net, arc, t, remaining, npos);
}

void FluxPlan::expand(const TreeNetwork& net, ArcIndex arc, double t, double remaining, std::size_t parent) {
    const auto& spec = net.arc(arc);
    Segment seg{};
    seg.arc = arc;
    seg.parent = parent;
    seg.demand = net.head_is_demand(arc) ? net.head_node(arc) : npos;
    seg.t_enter = t;
    seg.t_exit = spec.velocity.advance_by_integral(t, std::max(0.0, remaining));
    seg.lambda_enter = spec.velocity(seg.t_enter);
    seg.lambda_exit = spec.velocity(seg.t_exit);
    seg.damping_mass = spec.damping_factor.integral(seg.t_enter, seg.t_exit);
    const std::size_t self = segments_.size();
    segments_.push_back(seg);
    if (seg.demand == npos) {
        for (ArcIndex child : net.outgoing(net.head_node(arc))) {
            expand(net, child, seg.t_exit, net.arc(child).length, self);
        }
    }
}

double FluxPlan::required_density(const TreeNetwork& net, const DemandTargets& targets) const {
    if (segments_.empty()) throw DomainError("empty flux plan");
    // Reverse pre-order visits every child before its parent.
    std::vector<double> exit_flux(segments_.size(), 0.0);
    double density = 0.0;
    for (std::size_t i = segments_.size(); i-- > 0;) {
        const auto& seg = segments_[i];
        const double f_exit = seg.demand != npos ? targets.mean(seg.demand, seg.t_exit) : exit_flux[i];
        const double z_exit = f_exit / seg.lambda_exit;
        double z_enter;
        try {
            z_enter = backward_damp_mass(net.arc(seg.arc).damping, seg.damping_mass, z_exit);
        } catch (const InfeasibleError& e) {
            const auto& id = net.arc(seg.arc).id;
            std::ostringstream msg;
            msg << "arc '" << id << "' on [" << seg.t_enter << ", " << seg.t_exit << "]: " << e.what();
            throw InfeasibleError(msg.str(), id, e.damping_mass());
        }
        if (seg.parent == npos) {
            density = z_enter;
        } else {
            exit_flux[seg.parent] += seg.lambda_enter * z_enter;
        }
    }
    return density;
}

double FluxPlan::required_flux(const TreeNetwork& net, const DemandTargets& targets) const {
    return segments_.front().lambda_enter * required_density(net, targets);
}

double required_flux_into_arc(const TreeNetwork& net, ArcIndex arc, double t_enter,
                              const DemandTargets& targets) {
    return FluxPlan(net, arc, t_enter, net.arc(arc).length).required_flux(net, targets);
}

std::size_t InformationPolicy::window_at(double t) const {
    const auto it = std::upper_bound(update_times.begin(), update_times.end(), t);
    if (it == update_times.begin()) return 0;
    return static_cast<std::size_t>(it - update_times.begin()) - 1;
}

void InformationPolicy::check(std::size_t demand_count, double t0) const {
    if (update_times.empty()) throw DomainError("information policy needs at least one update time");
    if (update_times.front() > t0) throw DomainError("first update time must not exceed t0");
    for (std::size_t j = 1; j < update_times.size(); ++j) {
        if (!(update_times[j] > update_times[j - 1])) throw DomainError("update times must be strictly increasing");
    }
    if (observations.size() != update_times.size()) {
        throw DomainError("information policy needs one observation row per update time");
    }
    for (const auto& row : observations) {
        if (row.size() != demand_count) throw DomainError("observation row does not match the demand node count");
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) throw DomainError("observed demand outside [0, 1]");
        }
    }
}

PolicyTargets::PolicyTargets(const TreeNetwork& net, std::span<const JacobiDemandSpec> aligned,
                             const InformationPolicy& policy)
    : policy_(policy) {
    const auto& demand_nodes = net.demand_nodes();
    if (aligned.size() != demand_nodes.size()) throw DomainError("demand specs are not aligned with the network");
    policy_.check(demand_nodes.size(), policy_.update_times.empty() ? 0.0 : policy_.update_times.front());
    windows_.reserve(policy_.update_times.size());
    for (std::size_t j = 0; j < policy_.update_times.size(); ++j) {
        DemandTargets targets(net.nodes().size());
        for (std::size_t k = 0; k < demand_nodes.size(); ++k) {
            targets.set(demand_nodes[k], {&aligned[k], policy_.update_times[j], policy_.observations[j][k]});
        }
        windows_.push_back(std::move(targets));
    }
}

InflowPlanner::InflowPlanner(const TreeNetwork& net, std::span<const double> injection_grid)
    : grid_(injection_grid.begin(), injection_grid.end()) {
    const ArcIndex root = net.root_arc();
    plans_.reserve(grid_.size());
    for (double t : grid_) plans_.emplace_back(net, root, t, net.arc(root).length);
}

InflowProfile InflowPlanner::profile(const TreeNetwork& net, const PolicyTargets& targets) const {
    InflowProfile out;
    out.times = grid_;
    out.values.resize(grid_.size());
    out.window.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const std::size_t w = targets.policy().window_at(grid_[i]);
        out.window[i] = w;
        try {
            out.values[i] = plans_[i].required_flux(net, targets.window(w));
        } catch (const InfeasibleError& e) {
            std::ostringstream msg;
            msg << "inflow at t_in = " << grid_[i] << " (update window " << w << "): " << e.what();
            throw InfeasibleError(msg.str(), e.arc_id(), e.damping_mass());
        }
    }
    return out;
}

InflowProfile optimal_inflow_profile(const TreeNetwork& net, std::span<const JacobiDemandSpec> demands,
                                     const InformationPolicy& policy, std::span<const double> injection_grid) {
    const auto aligned = align_demands(net, demands);
    const PolicyTargets targets(net, aligned, policy);
    return InflowPlanner(net, injection_grid).profile(net, targets);
}

Split split_from_required(std::span<const double> required) {
    Split split;
    split.alpha.resize(required.size());
    double total = 0.0;
    for (double r : required) total += r;
    if (!(total > 0.0)) {
        split.degenerate = true;
        std::fill(split.alpha.begin(), split.alpha.end(), 1.0 / static_cast<double>(required.size()));
        return split;
    }
    for (std::size_t k = 0; k < required.size(); ++k) split.alpha[k] = required[k] / total;
    return split;
}

Split distribution_params(const TreeNetwork& net, NodeIndex junction, double t_junction,
                          const DemandTargets& targets) {
    if (net.node(junction).kind != NodeKind::junction) {
        throw DomainError("distribution_params: node '" + net.node(junction).id + "' is not a junction");
    }
    const auto& out = net.outgoing(junction);
    std::vector<double> required;
    required.reserve(out.size());
    for (ArcIndex a : out) required.push_back(required_flux_into_arc(net, a, t_junction, targets));
    return split_from_required(required);
}

std::vector<double> warm_start_state(const TreeNetwork& net, ArcIndex arc, double dx, double t0,
                                     const DemandTargets& targets) {
    const auto& spec = net.arc(arc);
    const auto cells = static_cast<std::size_t>(std::llround(spec.length / dx));
    std::vector<double> z(cells);
    for (std::size_t l = 0; l < cells; ++l) {
        const double remaining = spec.length - static_cast<double>(l + 1) * dx;
        z[l] = FluxPlan(net, arc, t0, remaining).required_density(net, targets);
    }
    return z;
}

}  // namespace dampnet
