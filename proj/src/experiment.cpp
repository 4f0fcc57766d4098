#include "dampnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "dampnet/errors.hpp"

namespace dampnet {

std::vector<DampingVariant> reference_damping_variants() {
    std::vector<DampingVariant> v{{"none", DampingShape::none()}};
    for (int n = 1; n <= 4; ++n) v.push_back({"n" + std::to_string(n), DampingShape::monomial(n)});
    return v;
}

void check_config(ScenarioConfig& config) {
    config.network.require_valid();

    std::vector<std::string> problems;
    if (!(config.T > config.t0)) problems.push_back("horizon: T must exceed t0");
    if (!(config.sde_dt > 0.0)) problems.push_back("numerics: sde_dt must be positive");
    if (!(config.pde_dx > 0.0)) problems.push_back("numerics: pde_dx must be positive");
    if (config.monte_carlo_runs < 1) problems.push_back("experiment: monte_carlo_runs must be >= 1");
    if (config.workers < 1) problems.push_back("experiment: workers must be >= 1");

    try {
        align_demands(config.network, config.demands);
    } catch (const SchemaError& e) {
        problems.push_back(e.what());
    }
    for (const auto& spec : config.demands) {
        for (auto& p : check_demand_spec(spec, config.t0, config.T)) problems.push_back(std::move(p));
    }

    const auto& ut = config.update_times;
    if (ut.empty()) {
        problems.push_back("experiment: at least one update time is required");
    } else {
        if (std::abs(ut.front() - config.t0) > 1e-9) problems.push_back("experiment: the first update time must be t0");
        for (std::size_t j = 0; j < ut.size(); ++j) {
            if (j > 0 && !(ut[j] > ut[j - 1])) problems.push_back("experiment: update times must be strictly increasing");
            if (ut[j] < config.t0 - 1e-9 || ut[j] > config.T + 1e-9) {
                problems.push_back("experiment: update time " + std::to_string(ut[j]) + " outside [t0, T]");
            }
            if (config.sde_dt > 0.0) {
                const double pos = (ut[j] - config.t0) / config.sde_dt;
                if (std::abs(pos - std::round(pos)) * config.sde_dt > 1e-9) {
                    std::ostringstream msg;
                    msg << "experiment: update time " << ut[j] << " is not on the SDE grid (dt = " << config.sde_dt << ")";
                    problems.push_back(msg.str());
                }
            }
        }
    }

    if (config.pde_dx > 0.0) {
        for (const auto& arc : config.network.arcs()) {
            const double ratio = arc.length / config.pde_dx;
            if (std::round(ratio) < 1.0 || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                std::ostringstream msg;
                msg << "numerics: pde_dx = " << config.pde_dx << " does not divide the length of arc '" << arc.id << "'";
                problems.push_back(msg.str());
            }
        }
    }

    std::set<std::string> labels;
    for (const auto& v : config.variants) {
        if (v.label.empty()) problems.push_back("experiment: damping variant without label");
        if (!labels.insert(v.label).second) problems.push_back("experiment: duplicate damping variant '" + v.label + "'");
    }

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario:";
        for (const auto& p : problems) msg << "\n  " << p;
        throw SchemaError(msg.str());
    }
}

LeafObjective objective_estimate(const DemandPath& demand, const SupplySeries& supply,
                                 std::span<const double> window_starts) {
    LeafObjective out;
    out.per_window.assign(std::max<std::size_t>(1, window_starts.size()), 0.0);
    if (demand.size() < 2) return out;
    if (supply.times.empty() || supply.times.front() > demand.time(0) + 1e-12 ||
        supply.times.back() < demand.time(demand.size() - 1) - 1e-12) {
        throw DomainError("objective_estimate: supply series does not cover the demand grid");
    }
    std::vector<double> sq(demand.size());
    for (std::size_t i = 0; i < demand.size(); ++i) {
        const double s = interpolate(supply.times, supply.values, demand.time(i));
        const double d = demand.values[i] - s;
        sq[i] = d * d;
    }
    for (std::size_t i = 0; i + 1 < demand.size(); ++i) {
        const double piece = 0.5 * demand.dt * (sq[i] + sq[i + 1]);
        const double mid = demand.time(i) + 0.5 * demand.dt;
        std::size_t w = 0;
        while (w + 1 < window_starts.size() && window_starts[w + 1] <= mid) ++w;
        out.per_window[w] += piece;
    }
    // Summed separately so the total does not depend on the window split.
    for (std::size_t i = 0; i + 1 < demand.size(); ++i) out.total += 0.5 * demand.dt * (sq[i] + sq[i + 1]);
    return out;
}

void SeriesAccumulator::add(const std::vector<std::vector<double>>& series) {
    if (count_ == 0) {
        mean_.assign(series.size(), {});
        m2_.assign(series.size(), {});
        for (std::size_t s = 0; s < series.size(); ++s) {
            mean_[s].assign(series[s].size(), 0.0);
            m2_[s].assign(series[s].size(), 0.0);
        }
    }
    if (series.size() != mean_.size()) throw NumericsError("accumulator: series count changed between runs");
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t s = 0; s < series.size(); ++s) {
        if (series[s].size() != mean_[s].size()) throw NumericsError("accumulator: series length changed between runs");
        auto& mean = mean_[s];
        auto& m2 = m2_[s];
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double x = series[s][i];
            const double delta = x - mean[i];
            mean[i] += delta / n;
            m2[i] += delta * (x - mean[i]);
        }
    }
}

void SeriesAccumulator::merge(const SeriesAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
        *this = other;
        return;
    }
    if (other.mean_.size() != mean_.size()) throw NumericsError("accumulator: incompatible merge");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t s = 0; s < mean_.size(); ++s) {
        for (std::size_t i = 0; i < mean_[s].size(); ++i) {
            const double delta = other.mean_[s][i] - mean_[s][i];
            mean_[s][i] += delta * nb / n;
            m2_[s][i] += other.m2_[s][i] + delta * delta * na * nb / n;
        }
    }
    count_ += other.count_;
}

std::vector<double> SeriesAccumulator::std_error(std::size_t s) const {
    std::vector<double> se(mean_.at(s).size(), 0.0);
    if (count_ < 2) return se;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < se.size(); ++i) se[i] = std::sqrt(std::max(0.0, m2_[s][i]) / (n - 1.0) / n);
    return se;
}

Experiment::Experiment(ScenarioConfig config) : config_(std::move(config)) {
    check_config(config_);
    const auto& net = config_.network;
    demands_ = align_demands(net, config_.demands);

    if (config_.variants.empty()) {
        arms_.push_back({"network", net});
    } else {
        for (const auto& v : config_.variants) {
            Arm arm{v.label, net};
            arm.network.set_damping_everywhere(v.shape);
            arms_.push_back(std::move(arm));
        }
    }

    for (const auto& arc : net.arcs()) grids_.push_back(make_arc_grid(arc, config_.pde_dx, config_.t0, config_.T));
    inflow_planner_ = std::make_unique<InflowPlanner>(net, grids_[net.root_arc()].times);
    split_cache_ = std::make_unique<SplitPlanCache>(net, grids_, config_.update_times);

    warm_plans_.resize(net.arcs().size());
    for (ArcIndex a = 0; a < net.arcs().size(); ++a) {
        const auto& arc = net.arc(a);
        for (std::size_t l = 0; l < grids_[a].cells; ++l) {
            const double remaining = arc.length - static_cast<double>(l + 1) * config_.pde_dx;
            warm_plans_[a].emplace_back(net, a, config_.t0, remaining);
        }
    }

    const auto paths = net.root_to_leaf_paths();
    for (const auto& path : paths) {
        std::vector<double> starts;
        for (std::size_t j = 0; j < config_.update_times.size(); ++j) {
            starts.push_back(j == 0 ? config_.t0 : arrival_times(net, path, config_.update_times[j]).back());
        }
        window_starts_.push_back(std::move(starts));
    }
}

std::vector<std::string> Experiment::variant_labels() const {
    std::vector<std::string> labels;
    for (const auto& arm : arms_) labels.push_back(arm.label);
    return labels;
}

std::vector<DemandPath> Experiment::simulate_demands(std::size_t run_index) const {
    std::vector<DemandPath> paths;
    paths.reserve(demands_.size());
    for (std::size_t k = 0; k < demands_.size(); ++k) {
        paths.push_back(simulate_jacobi(demands_[k], config_.t0, config_.T, config_.sde_dt,
                                        derive_seed(config_.master_seed, run_index, k)));
    }
    return paths;
}

InformationPolicy Experiment::policy_from(const std::vector<DemandPath>& paths) const {
    InformationPolicy policy;
    policy.update_times = config_.update_times;
    for (double t : config_.update_times) {
        std::vector<double> row;
        for (const auto& p : paths) row.push_back(p.values[p.index_of(t)]);
        policy.observations.push_back(std::move(row));
    }
    return policy;
}

std::vector<double> Experiment::window_starts(NodeIndex k) const { return window_starts_.at(k); }

std::vector<std::vector<double>> Experiment::initial_data(const Arm& arm, const DemandTargets& targets) const {
    std::vector<std::vector<double>> init(grids_.size());
    for (ArcIndex a = 0; a < grids_.size(); ++a) {
        if (config_.initial_data == InitialDataMode::zero) {
            init[a].assign(grids_[a].cells, 0.0);
            continue;
        }
        init[a].reserve(grids_[a].cells);
        for (const auto& plan : warm_plans_[a]) init[a].push_back(plan.required_density(arm.network, targets));
    }
    return init;
}

std::vector<std::size_t> Experiment::selected_arms(const RunOptions& options) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        const auto& only = options.only_variants;
        if (only.empty() || std::find(only.begin(), only.end(), arms_[i].label) != only.end()) out.push_back(i);
    }
    for (const auto& label : options.only_variants) {
        if (std::none_of(arms_.begin(), arms_.end(), [&](const Arm& a) { return a.label == label; })) {
            throw SchemaError("unknown damping variant '" + label + "'");
        }
    }
    return out;
}

VariantResult Experiment::run_variant(std::size_t variant, const std::vector<DemandPath>& paths,
                                      const InformationPolicy& policy, const RunOptions& options) const {
    const Arm& arm = arms_.at(variant);
    const auto& net = arm.network;
    VariantResult result;
    result.label = arm.label;

    try {
        const PolicyTargets targets(net, demands_, policy);
        result.inflow = inflow_planner_->profile(net, targets);
        const auto init = initial_data(arm, targets.window(0));
        const PolicySplitter splitter(*split_cache_, net, targets);
        SimulationOptions sim_options;
        sim_options.record_alpha = options.record_alpha;
        sim_options.field_stride = options.field_stride;
        const auto sim = simulate_network(net, InflowSeries(result.inflow), splitter, init, grids_, sim_options);
        result.degenerate_splits = splitter.degenerate_count();
        result.alphas = sim.alphas;
        if (options.field_stride > 0) result.traces = sim.arcs;
        const auto& demand_nodes = net.demand_nodes();
        for (std::size_t k = 0; k < demand_nodes.size(); ++k) {
            result.supply.push_back(sim.supply(net, demand_nodes[k]));
            result.objective.push_back(objective_estimate(paths.at(k), result.supply.back(), window_starts_[k]));
        }
    } catch (const InfeasibleError& e) {
        throw InfeasibleError("variant '" + arm.label + "': " + e.what(), e.arc_id(), e.damping_mass());
    }
    return result;
}

SimulationResult Experiment::run_single(std::size_t run_index, const RunOptions& options) const {
    SimulationResult result;
    result.run_index = run_index;
    result.demands = simulate_demands(run_index);
    result.policy = policy_from(result.demands);
    for (std::size_t v : selected_arms(options)) {
        result.variants.push_back(run_variant(v, result.demands, result.policy, options));
    }
    return result;
}

namespace {

double max_jump(const std::vector<double>& v) {
    double m = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) m = std::max(m, std::abs(v[i] - v[i - 1]));
    return m;
}

}  // namespace

EnsembleResult Experiment::run_monte_carlo(std::optional<std::size_t> runs, const RunOptions& options) const {
    const std::size_t n_runs = runs.value_or(config_.monte_carlo_runs);
    if (n_runs < 1) throw DomainError("run_monte_carlo: at least one run is required");
    const auto arms = selected_arms(options);
    RunOptions run_options = options;
    run_options.record_alpha = false;
    run_options.field_stride = 0;

    // Series layout per run: demand per node, then per arm the inflow, the
    // supply per node and the objective per node (length-1 series).
    const std::size_t n_demand = demands_.size();
    auto flatten = [&](const SimulationResult& r) {
        std::vector<std::vector<double>> series;
        for (const auto& p : r.demands) series.push_back(p.values);
        for (const auto& v : r.variants) {
            series.push_back(v.inflow.values);
            for (const auto& s : v.supply) series.push_back(s.values);
            for (const auto& o : v.objective) series.push_back({o.total});
        }
        return series;
    };

    constexpr std::size_t kBlock = 16;
    const std::size_t n_blocks = (n_runs + kBlock - 1) / kBlock;
    std::atomic<std::size_t> next_block{0};
    std::atomic<bool> abort{false};
    std::mutex mutex;
    std::map<std::size_t, SeriesAccumulator> pending;
    std::size_t next_merge = 0;
    SeriesAccumulator total;
    std::vector<double> first_run_jumps(arms.size(), 0.0);
    std::size_t failed_run = n_runs;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t b = next_block.fetch_add(1);
            if (b >= n_blocks || abort.load()) return;
            SeriesAccumulator block;
            const std::size_t end = std::min(n_runs, (b + 1) * kBlock);
            for (std::size_t run = b * kBlock; run < end; ++run) {
                try {
                    SimulationResult r;
                    r.run_index = run;
                    r.demands = simulate_demands(run);
                    r.policy = policy_from(r.demands);
                    for (std::size_t v : arms) r.variants.push_back(run_variant(v, r.demands, r.policy, run_options));
                    if (run == 0) {
                        std::lock_guard lock(mutex);
                        for (std::size_t i = 0; i < arms.size(); ++i) first_run_jumps[i] = max_jump(r.variants[i].inflow.values);
                    }
                    block.add(flatten(r));
                } catch (...) {
                    std::lock_guard lock(mutex);
                    if (run < failed_run) {
                        failed_run = run;
                        failure = std::current_exception();
                    }
                    abort = true;
                    return;
                }
            }
            std::lock_guard lock(mutex);
            pending.emplace(b, std::move(block));
            while (!pending.empty() && pending.begin()->first == next_merge) {
                total.merge(pending.begin()->second);
                pending.erase(pending.begin());
                ++next_merge;
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(config_.workers, static_cast<unsigned>(n_blocks)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    if (failure) {
        try {
            std::rethrow_exception(failure);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("Monte Carlo run " + std::to_string(failed_run) + ": " + e.what(), e.arc_id(),
                                  e.damping_mass());
        } catch (const Error& e) {
            throw NumericsError("Monte Carlo run " + std::to_string(failed_run) + ": " + e.what());
        }
    }

    EnsembleResult out;
    out.runs = total.count();
    std::size_t s = 0;
    DemandPath grid_proto{config_.t0, config_.sde_dt, {}};
    grid_proto.values.resize(sde_step_count(config_.t0, config_.T, config_.sde_dt) + 1);
    std::vector<double> demand_times(grid_proto.size());
    for (std::size_t i = 0; i < demand_times.size(); ++i) demand_times[i] = grid_proto.time(i);
    for (std::size_t k = 0; k < n_demand; ++k, ++s) out.demand.push_back({demand_times, total.mean(s), total.std_error(s)});

    const auto& net = config_.network;
    const auto& inflow_times = grids_[net.root_arc()].times;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        VariantEnsemble ve;
        ve.label = arms_[arms[i]].label;
        ve.inflow = {inflow_times, total.mean(s), total.std_error(s)};
        ++s;
        for (std::size_t k = 0; k < n_demand; ++k, ++s) {
            ve.supply.push_back({grids_[net.leaf_arc(net.demand_nodes()[k])].times, total.mean(s), total.std_error(s)});
        }
        for (std::size_t k = 0; k < n_demand; ++k, ++s) {
            ve.objective_mean.push_back(total.mean(s).front());
            ve.objective_std_error.push_back(total.std_error(s).front());
        }
        ve.max_jump_mean_inflow = max_jump(ve.inflow.mean);
        ve.max_jump_single_inflow = first_run_jumps[i];
        out.variants.push_back(std::move(ve));
    }
    return out;
}

}  // namespace dampnet
