#include "dampnet/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dampnet/errors.hpp"

namespace dampnet {

namespace {

// ĝ without the domain check; z ≥ 0 is enforced by the caller.
inline double damping_value(const DampingShape& shape, double z) {
    if (shape.is_none()) return 0.0;
    double p = z;
    for (int k = 1; k < shape.degree(); ++k) p *= z;
    return shape.coefficient() * p;
}

}  // namespace

ArcGrid make_arc_grid(const ArcSpec& arc, double dx, double t0, double T) {
    if (!(dx > 0.0)) throw DomainError("pde grid: dx must be positive");
    if (!(T > t0)) throw DomainError("pde grid: T must exceed t0");
    const double ratio = arc.length / dx;
    const double cells = std::round(ratio);
    if (cells < 1.0 || std::abs(ratio - cells) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "pde grid: dx = " << dx << " does not divide length " << arc.length << " of arc '" << arc.id << "'";
        throw DomainError(msg.str());
    }
    ArcGrid grid;
    grid.dx = dx;
    grid.cells = static_cast<std::size_t>(cells);
    grid.times.push_back(t0);
    double t = t0;
    const double slack = 1e-12 * std::max(1.0, std::abs(T));
    while (t < T - slack) {
        const double lambda = arc.velocity(t);
        if (!(lambda > 0.0)) throw NumericsError("pde grid: non-positive velocity on arc '" + arc.id + "'");
        t += dx / lambda;
        grid.times.push_back(t);
    }
    return grid;
}

void step_arc(ArcState& state, const ArcGrid& grid, std::size_t j, const ArcSpec& arc, double boundary_flux) {
    if (boundary_flux < 0.0) {
        std::ostringstream msg;
        msg << "negative boundary flux " << boundary_flux << " on arc '" << arc.id << "'";
        throw DomainError(msg.str());
    }
    auto& z = state.z;
    if (z.size() != grid.cells) throw NumericsError("arc state does not match its grid");
    const double t = grid.times[j];
    const double t_next = grid.times[j + 1];
    const double dt = t_next - t;
    const double nu = grid.cfl;

    // Upwind transport, right to left so z_{l−1} is still the old value.
    const double ghost = boundary_flux / arc.velocity(t);
    if (nu == 1.0) {
        for (std::size_t l = z.size(); l-- > 1;) z[l] = z[l - 1];
        z[0] = ghost;
    } else {
        for (std::size_t l = z.size(); l-- > 1;) z[l] = z[l] - nu * (z[l] - z[l - 1]);
        z[0] = z[0] - nu * (z[0] - ghost);
    }

    // Damping substep, μ at the new time level.
    if (arc.damping.is_none()) return;
    const double factor = dt * arc.damping_factor(t_next);
    if (factor == 0.0) return;
    for (double& v : z) {
        v -= factor * damping_value(arc.damping, v);
        if (v < 0.0) {
            std::ostringstream msg;
            msg << "damping step produced a negative density " << v << " on arc '" << arc.id << "' at t = "
                << t_next << " (step too large for the damping strength)";
            throw NumericsError(msg.str());
        }
    }
}

double interpolate(std::span<const double> times, std::span<const double> values, double t) {
    if (times.empty() || times.size() != values.size()) throw NumericsError("interpolate: malformed series");
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    if (t < times.front() - slack || t > times.back() + slack) {
        std::ostringstream msg;
        msg << "interpolate: t = " << t << " outside [" << times.front() << ", " << times.back() << "]";
        throw NumericsError(msg.str());
    }
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    if (it == times.end()) return values.back();
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[i - 1], t1 = times[i];
    const double w = (t - t0) / (t1 - t0);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

double InflowSeries::at(std::size_t step, double t) const {
    if (step < times_.size() && times_[step] == t) return values_[step];
    return interpolate(times_, values_, t);
}

SupplySeries NetworkSimulation::supply(const TreeNetwork& net, NodeIndex demand) const {
    const auto& trace = arcs.at(net.leaf_arc(demand));
    return {trace.grid.times, trace.outflow};
}

NetworkSimulation simulate_network(const TreeNetwork& net, const InflowSeries& inflow, const AlphaProvider& alpha,
                                   const std::vector<std::vector<double>>& initial_data, double t0, double T,
                                   double dx, const SimulationOptions& options) {
    std::vector<ArcGrid> grids;
    grids.reserve(net.arcs().size());
    for (const auto& arc : net.arcs()) grids.push_back(make_arc_grid(arc, dx, t0, T));
    return simulate_network(net, inflow, alpha, initial_data, grids, options);
}

NetworkSimulation simulate_network(const TreeNetwork& net, const InflowSeries& inflow, const AlphaProvider& alpha,
                                   const std::vector<std::vector<double>>& initial_data,
                                   const std::vector<ArcGrid>& grids, const SimulationOptions& options) {
    const auto& arcs = net.arcs();
    if (grids.size() != arcs.size()) throw NumericsError("simulate_network: one grid per arc required");
    if (initial_data.size() != arcs.size()) throw NumericsError("simulate_network: one initial state per arc required");

    NetworkSimulation sim;
    sim.arcs.resize(arcs.size());
    const ArcIndex root = net.root_arc();

    for (ArcIndex a : net.topological_arcs()) {
        const auto& spec = arcs[a];
        auto& trace = sim.arcs[a];
        trace.grid = grids[a];
        const auto& grid = trace.grid;

        ArcState state{initial_data[a]};
        if (state.z.size() != grid.cells) {
            throw NumericsError("initial data for arc '" + spec.id + "' has the wrong number of cells");
        }
        for (double v : state.z) {
            if (v < 0.0) throw DomainError("negative initial density on arc '" + spec.id + "'");
        }

        const NodeIndex tail = net.tail_node(a);
        const ArcTrace* parent = nullptr;
        std::size_t child_slot = 0;
        if (a != root) {
            parent = &sim.arcs[net.incoming_arc(tail)];
            const auto& siblings = net.outgoing(tail);
            child_slot = static_cast<std::size_t>(std::find(siblings.begin(), siblings.end(), a) - siblings.begin());
        }

        const std::size_t steps = grid.steps();
        trace.inflow.resize(steps);
        trace.outflow.resize(steps + 1);
        trace.outflow[0] = spec.velocity(grid.times[0]) * state.z.back();
        if (options.field_stride > 0) {
            trace.field.push_back(state.z);
            trace.field_steps.push_back(0);
        }

        for (std::size_t j = 0; j < steps; ++j) {
            const double t = grid.times[j];
            double boundary;
            if (parent == nullptr) {
                boundary = inflow.at(j, t);
            } else {
                const auto split = alpha.split(tail, a, j, t);
                if (split.size() != net.outgoing(tail).size()) {
                    std::ostringstream msg;
                    msg << "alpha provider returned " << split.size() << " values for junction '" << net.node(tail).id
                        << "' at t = " << t;
                    throw NumericsError(msg.str());
                }
                if (options.record_alpha) sim.alphas.push_back({tail, a, t, split});
                boundary = split[child_slot] * interpolate(parent->grid.times, parent->outflow, t);
            }
            trace.inflow[j] = boundary;
            step_arc(state, grid, j, spec, boundary);
            trace.outflow[j + 1] = spec.velocity(grid.times[j + 1]) * state.z.back();
            if (options.field_stride > 0 && (j + 1) % options.field_stride == 0) {
                trace.field.push_back(state.z);
                trace.field_steps.push_back(j + 1);
            }
        }
    }
    return sim;
}

SplitPlanCache::SplitPlanCache(const TreeNetwork& net, const std::vector<ArcGrid>& grids,
                               std::span<const double> update_times) {
    const auto& arcs = net.arcs();
    update_arrivals_.resize(net.nodes().size());
    plans_.resize(arcs.size());
    plan_times_.resize(arcs.size());

    const auto paths = net.root_to_leaf_paths();
    for (NodeIndex junction : net.junction_nodes()) {
        // Path from the root to the arc entering this junction.
        const ArcIndex incoming = net.incoming_arc(junction);
        ArcPath path;
        for (const auto& p : paths) {
            const auto it = std::find(p.begin(), p.end(), incoming);
            if (it != p.end()) {
                path.assign(p.begin(), it + 1);
                break;
            }
        }
        for (double t_hat : update_times) update_arrivals_[junction].push_back(arrival_times(net, path, t_hat).back());

        const auto& out = net.outgoing(junction);
        for (ArcIndex child : out) {
            const auto& grid = grids.at(child);
            auto& per_step = plans_[child];
            per_step.resize(grid.steps());
            plan_times_[child].assign(grid.times.begin(), grid.times.begin() + static_cast<std::ptrdiff_t>(grid.steps()));
            for (std::size_t j = 0; j < grid.steps(); ++j) {
                auto& sibling_plans = per_step[j];
                sibling_plans.reserve(out.size());
                for (ArcIndex sibling : out) {
                    sibling_plans.emplace_back(net, sibling, grid.times[j], net.arc(sibling).length);
                }
            }
        }
    }
}

std::size_t SplitPlanCache::window_at(NodeIndex junction, double t) const {
    const auto& arrivals = update_arrivals_.at(junction);
    const auto it = std::upper_bound(arrivals.begin(), arrivals.end(), t);
    if (it == arrivals.begin()) return 0;
    return static_cast<std::size_t>(it - arrivals.begin()) - 1;
}

const std::vector<FluxPlan>* SplitPlanCache::plans(ArcIndex child, std::size_t step, double t) const {
    if (child < plans_.size() && step < plans_[child].size() && plan_times_[child][step] == t) {
        return &plans_[child][step];
    }
    return nullptr;
}

std::vector<double> PolicySplitter::split(NodeIndex junction, ArcIndex child, std::size_t step, double t) const {
    const auto& targets = targets_.window(cache_.window_at(junction, t));
    std::vector<double> required;
    const auto& out = net_.outgoing(junction);
    required.reserve(out.size());
    if (const auto* plans = cache_.plans(child, step, t)) {
        for (const auto& plan : *plans) required.push_back(plan.required_flux(net_, targets));
    } else {
        for (ArcIndex a : out) required.push_back(required_flux_into_arc(net_, a, t, targets));
    }
    auto s = split_from_required(required);
    if (s.degenerate) ++degenerate_;
    return s.alpha;
}

}  // namespace dampnet
