#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dampnet/control.hpp"
#include "dampnet/demand.hpp"
#include "dampnet/network.hpp"
#include "dampnet/pde.hpp"

namespace dampnet {

enum class InitialDataMode { warm, zero };

/// Damping shape applied to every arc of the network for one experiment arm.
struct DampingVariant {
    std::string label;
    DampingShape shape;

    bool operator==(const DampingVariant&) const = default;
};

/// The five arms of the reference comparison: none and monomials n = 1..4.
std::vector<DampingVariant> reference_damping_variants();

struct ScenarioConfig {
    TreeNetwork network;
    std::vector<JacobiDemandSpec> demands;
    double t0 = 0.0;
    double T = 1.0;
    std::vector<double> update_times{0.0};
    double sde_dt = 1e-3;
    double pde_dx = 1.0 / 200.0;
    std::size_t monte_carlo_runs = 1;
    std::uint64_t master_seed = 0;
    /// Empty: a single arm using the damping declared on each arc.
    std::vector<DampingVariant> variants;
    InitialDataMode initial_data = InitialDataMode::warm;
    unsigned workers = 1;
};

/// Validates the network (ValidationError) and every other field
/// (SchemaError): demand specs, update times on the SDE grid, Δx dividing
/// each arc length, run count ≥ 1.
void check_config(ScenarioConfig& config);

/// ∫ (demand − supply)² over the demand grid, split by update window.
struct LeafObjective {
    double total = 0.0;
    std::vector<double> per_window;
};

/// Trapezoidal objective with supply interpolated linearly onto the demand
/// grid. `window_starts[j]` is the time from which window j is charged
/// (window 0 always starts at the grid origin). Throws DomainError if the
/// supply does not cover the demand grid.
LeafObjective objective_estimate(const DemandPath& demand, const SupplySeries& supply,
                                 std::span<const double> window_starts = {});

struct VariantResult {
    std::string label;
    InflowProfile inflow;
    std::vector<SupplySeries> supply;       // per demand node
    std::vector<LeafObjective> objective;   // per demand node
    std::vector<AlphaRecord> alphas;
    std::size_t degenerate_splits = 0;
    std::vector<ArcTrace> traces;  // filled only when RunOptions::field_stride > 0
};

struct SimulationResult {
    std::size_t run_index = 0;
    std::vector<DemandPath> demands;  // per demand node
    InformationPolicy policy;
    std::vector<VariantResult> variants;
};

struct SeriesStats {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
};

struct VariantEnsemble {
    std::string label;
    SeriesStats inflow;
    std::vector<SeriesStats> supply;  // per demand node, leaf arc grid
    std::vector<double> objective_mean;
    std::vector<double> objective_std_error;
    double max_jump_mean_inflow = 0.0;
    double max_jump_single_inflow = 0.0;  // run 0
};

struct EnsembleResult {
    std::size_t runs = 0;
    std::vector<SeriesStats> demand;  // per demand node, SDE grid
    std::vector<VariantEnsemble> variants;
};

/// Per-point mean and variance over runs (Welford, merged with Chan's
/// pairwise update). Merging in a fixed order gives reproducible results.
class SeriesAccumulator {
public:
    /// Adds one run; `series` must have the same shapes on every call.
    void add(const std::vector<std::vector<double>>& series);
    void merge(const SeriesAccumulator& other);

    std::size_t count() const { return count_; }
    const std::vector<double>& mean(std::size_t s) const { return mean_.at(s); }
    /// Standard error of the mean (0 for fewer than two runs).
    std::vector<double> std_error(std::size_t s) const;

private:
    std::size_t count_ = 0;
    std::vector<std::vector<double>> mean_;
    std::vector<std::vector<double>> m2_;
};

struct RunOptions {
    bool record_alpha = true;
    std::size_t field_stride = 0;
    /// Restrict to these variant labels (empty: all).
    std::vector<std::string> only_variants;
};

/// A validated scenario with every realization-independent quantity
/// (grids, characteristic plans) computed once.
class Experiment {
public:
    explicit Experiment(ScenarioConfig config);

    const ScenarioConfig& config() const { return config_; }
    const TreeNetwork& network() const { return config_.network; }
    /// Demand specs in net.demand_nodes() order.
    const std::vector<JacobiDemandSpec>& demands() const { return demands_; }
    const std::vector<ArcGrid>& grids() const { return grids_; }
    std::vector<std::string> variant_labels() const;

    std::vector<DemandPath> simulate_demands(std::size_t run_index) const;
    /// Observations read from the paths at every update time.
    InformationPolicy policy_from(const std::vector<DemandPath>& paths) const;
    /// Times from which the objective of each window is charged at a leaf.
    std::vector<double> window_starts(NodeIndex demand) const;

    /// Inflow, forward simulation and objective for every selected arm.
    VariantResult run_variant(std::size_t variant, const std::vector<DemandPath>& paths,
                              const InformationPolicy& policy, const RunOptions& options = {}) const;

    SimulationResult run_single(std::size_t run_index, const RunOptions& options = {}) const;

    /// Runs [0, runs) in parallel (config.workers threads) and reduces in a
    /// fixed order, so the result does not depend on the worker count.
    EnsembleResult run_monte_carlo(std::optional<std::size_t> runs = std::nullopt,
                                   const RunOptions& options = {}) const;

private:
    struct Arm {
        std::string label;
        TreeNetwork network;
    };

    std::vector<std::size_t> selected_arms(const RunOptions& options) const;
    std::vector<std::vector<double>> initial_data(const Arm& arm, const DemandTargets& targets) const;

    ScenarioConfig config_;
    std::vector<JacobiDemandSpec> demands_;
    std::vector<Arm> arms_;
    std::vector<ArcGrid> grids_;
    std::unique_ptr<InflowPlanner> inflow_planner_;
    std::unique_ptr<SplitPlanCache> split_cache_;
    std::vector<std::vector<FluxPlan>> warm_plans_;  // [arc][cell]
    std::vector<std::vector<double>> window_starts_;  // [demand k][window]
};

}  // namespace dampnet
