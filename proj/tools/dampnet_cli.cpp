#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dampnet/config.hpp"
#include "dampnet/errors.hpp"
#include "dampnet/experiment.hpp"
#include "dampnet/output.hpp"

namespace {

using dampnet::Json;

enum ExitCode : int {
    exit_ok = 0,
    exit_io = 1,
    exit_schema = 2,
    exit_validation = 3,
    exit_infeasible = 4,
    exit_numerics = 5,
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<unsigned> workers;
    std::vector<std::string> variants;
};

void report_error(const std::string& kind, const std::string& message, Json extra = Json::object()) {
    extra["error"] = kind;
    extra["message"] = message;
    std::cerr << extra.dump() << '\n';
}

dampnet::ScenarioConfig load(const std::string& path, const Overrides& o) {
    auto cfg = dampnet::load_config(path);
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.runs) cfg.monte_carlo_runs = *o.runs;
    if (o.workers) cfg.workers = *o.workers;
    return cfg;
}

Json describe_time_function(const dampnet::TimeFunction& f) { return dampnet::to_json(f); }

int cmd_validate(const std::string& path, const Overrides& o) {
    auto cfg = load(path, o);
    dampnet::check_config(cfg);
    Json arcs = Json::array();
    for (const auto& a : cfg.network.arcs()) {
        arcs.push_back({{"id", a.id},
                        {"tail", a.tail},
                        {"head", a.head},
                        {"length", a.length},
                        {"velocity", describe_time_function(a.velocity)},
                        {"damping_factor", describe_time_function(a.damping_factor)},
                        {"damping", dampnet::to_json(a.damping)}});
    }
    Json demands = Json::array();
    for (const auto& d : cfg.demands) {
        demands.push_back({{"node", d.node_id},
                           {"kappa", d.kappa},
                           {"theta", describe_time_function(d.theta)},
                           {"sigma", d.sigma},
                           {"d0", d.d0}});
    }
    Json variants = Json::array();
    for (const auto& v : cfg.variants) variants.push_back({{"label", v.label}, {"damping", dampnet::to_json(v.shape)}});
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(dampnet::config_hash(cfg)));
    const Json report = {{"status", "ok"},
                         {"config_hash", hash},
                         {"arcs", arcs},
                         {"demands", demands},
                         {"t0", cfg.t0},
                         {"T", cfg.T},
                         {"sde_dt", cfg.sde_dt},
                         {"pde_dx", cfg.pde_dx},
                         {"update_times", cfg.update_times},
                         {"monte_carlo_runs", cfg.monte_carlo_runs},
                         {"master_seed", cfg.master_seed},
                         {"damping_variants", variants}};
    std::cout << report.dump(2) << '\n';
    return exit_ok;
}

dampnet::RunOptions run_options(const Overrides& o, bool record_alpha, std::size_t field_stride = 0) {
    dampnet::RunOptions opts;
    opts.record_alpha = record_alpha;
    opts.field_stride = field_stride;
    opts.only_variants = o.variants;
    return opts;
}

int cmd_inflow(const std::string& path, const Overrides& o, const std::string& out_dir, std::size_t run_index) {
    const dampnet::Experiment exp(load(path, o));
    const auto result = exp.run_single(run_index, run_options(o, false));
    dampnet::OutputSet out(out_dir);
    for (const auto& v : result.variants) dampnet::write_inflow_csv(out.add("inflow_" + v.label + ".csv"), v.inflow);
    auto meta = dampnet::manifest_meta(exp, "inflow");
    meta["run_index"] = run_index;
    out.write_manifest(meta);
    return exit_ok;
}

int cmd_simulate(const std::string& path, const Overrides& o, const std::string& out_dir, std::size_t run_index,
                 std::size_t field_stride) {
    const dampnet::Experiment exp(load(path, o));
    const auto result = exp.run_single(run_index, run_options(o, true, field_stride));
    dampnet::OutputSet out(out_dir);
    dampnet::write_single_result(out, exp, result, field_stride > 0);
    auto meta = dampnet::manifest_meta(exp, "simulate");
    meta["run_index"] = run_index;
    out.write_manifest(meta);
    return exit_ok;
}

int cmd_montecarlo(const std::string& path, const Overrides& o, const std::string& out_dir) {
    const dampnet::Experiment exp(load(path, o));
    const auto result = exp.run_monte_carlo(std::nullopt, run_options(o, false));
    dampnet::OutputSet out(out_dir);
    dampnet::write_ensemble_result(out, exp, result);
    auto meta = dampnet::manifest_meta(exp, "montecarlo");
    meta["runs"] = result.runs;
    out.write_manifest(meta);
    return exit_ok;
}

int cmd_compare(const std::string& path, const Overrides& o, const std::string& out_dir, std::size_t run_index) {
    auto cfg = load(path, o);
    if (cfg.variants.empty()) cfg.variants = dampnet::reference_damping_variants();
    const dampnet::Experiment exp(std::move(cfg));
    const auto result = exp.run_single(run_index, run_options(o, true));
    dampnet::OutputSet out(out_dir);
    dampnet::write_comparison(out, exp, result);
    auto meta = dampnet::manifest_meta(exp, "compare-damping");
    meta["run_index"] = run_index;
    out.write_manifest(meta);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal inflow control for damped transport on tree networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::size_t run_index = 0;
    std::size_t field_stride = 0;
    Overrides o;

    auto add_common = [&](CLI::App* sub, bool with_output) {
        sub->add_option("config", config_path, "Scenario file (JSON)")->required();
        sub->add_option("--seed", o.seed, "Override experiment.master_seed");
        sub->add_option("--workers", o.workers, "Override experiment.workers")->check(CLI::PositiveNumber);
        if (with_output) {
            sub->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
            sub->add_option("--variant", o.variants, "Only run these damping variants (repeatable)");
        }
    };

    auto* validate = app.add_subcommand("validate", "Check a scenario file and echo its parameters");
    add_common(validate, false);
    auto* inflow = app.add_subcommand("inflow", "Optimal inflow profile for one realization");
    add_common(inflow, true);
    inflow->add_option("--run-index", run_index, "Realization index")->capture_default_str();
    auto* simulate = app.add_subcommand("simulate", "Inflow, forward simulation and objective for one realization");
    add_common(simulate, true);
    simulate->add_option("--run-index", run_index, "Realization index")->capture_default_str();
    simulate->add_option("--field-stride", field_stride, "Dump every k-th arc state (0: off)")->capture_default_str();
    auto* montecarlo = app.add_subcommand("montecarlo", "Monte Carlo means and standard errors");
    add_common(montecarlo, true);
    montecarlo->add_option("--runs", o.runs, "Override experiment.monte_carlo_runs")->check(CLI::PositiveNumber);
    auto* compare = app.add_subcommand("compare-damping", "Stacked per-variant series for one realization");
    add_common(compare, true);
    compare->add_option("--run-index", run_index, "Realization index")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path, o);
        if (inflow->parsed()) return cmd_inflow(config_path, o, out_dir, run_index);
        if (simulate->parsed()) return cmd_simulate(config_path, o, out_dir, run_index, field_stride);
        if (montecarlo->parsed()) return cmd_montecarlo(config_path, o, out_dir);
        if (compare->parsed()) return cmd_compare(config_path, o, out_dir, run_index);
    } catch (const dampnet::IoError& e) {
        report_error("io", e.what());
        return exit_io;
    } catch (const dampnet::SchemaError& e) {
        report_error("schema", e.what());
        return exit_schema;
    } catch (const dampnet::ValidationError& e) {
        Json list = Json::array();
        for (const auto& v : e.violations()) list.push_back({{"code", v.code}, {"message", v.message}});
        report_error("validation", e.what(), {{"violations", list}});
        return exit_validation;
    } catch (const dampnet::InfeasibleError& e) {
        report_error("infeasible", e.what(), {{"arc", e.arc_id()}, {"damping_mass", e.damping_mass()}});
        return exit_infeasible;
    } catch (const dampnet::NumericsError& e) {
        report_error("numerics", e.what());
        return exit_numerics;
    } catch (const dampnet::DomainError& e) {
        report_error("numerics", e.what());
        return exit_numerics;
    }
    return exit_ok;
}
