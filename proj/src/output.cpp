#include "dampnet/output.hpp"

#include <charconv>
#include <cstdio>

#include "dampnet/config.hpp"
#include "dampnet/errors.hpp"

namespace dampnet {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
    for (const auto& h : header) cell(h);
    end_row();
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (!first_) out_ << ',';
    out_ << v;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

OutputSet::OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
}

fs::path OutputSet::add(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
}

void OutputSet::write_manifest(nlohmann::json meta) const {
    meta["files"] = files_;
    std::ofstream out(dir_ / "manifest.json");
    if (!out) throw IoError("cannot write manifest in '" + dir_.string() + "'");
    out << meta.dump(2) << '\n';
}

void write_demand_csv(const fs::path& path, const DemandPath& demand) {
    CsvWriter csv(path, {"t", "value"});
    for (std::size_t i = 0; i < demand.size(); ++i) {
        csv.cell(demand.time(i)).cell(demand.values[i]);
        csv.end_row();
    }
}

void write_inflow_csv(const fs::path& path, const InflowProfile& inflow) {
    CsvWriter csv(path, {"t_in", "u", "window"});
    for (std::size_t i = 0; i < inflow.times.size(); ++i) {
        csv.cell(inflow.times[i]).cell(inflow.values[i]).cell(inflow.window[i]);
        csv.end_row();
    }
}

void write_supply_csv(const fs::path& path, const SupplySeries& supply) {
    CsvWriter csv(path, {"t", "supply"});
    for (std::size_t i = 0; i < supply.times.size(); ++i) {
        csv.cell(supply.times[i]).cell(supply.values[i]);
        csv.end_row();
    }
}

void write_alpha_csv(const fs::path& path, const TreeNetwork& net, NodeIndex junction,
                     const std::vector<AlphaRecord>& records) {
    CsvWriter csv(path, {"t", "arc", "alpha"});
    const auto& out = net.outgoing(junction);
    for (const auto& r : records) {
        if (r.junction != junction) continue;
        const auto slot = static_cast<std::size_t>(std::find(out.begin(), out.end(), r.child) - out.begin());
        csv.cell(r.t).cell(net.arc(r.child).id).cell(r.alpha.at(slot));
        csv.end_row();
    }
}

void write_stats_csv(const fs::path& path, const SeriesStats& stats, const std::string& value_name) {
    CsvWriter csv(path, {"t", value_name + "_mean", value_name + "_se"});
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        csv.cell(stats.times[i]).cell(stats.mean[i]).cell(stats.std_error[i]);
        csv.end_row();
    }
}

void write_field_csv(const fs::path& path, const ArcTrace& trace) {
    CsvWriter csv(path, {"t", "x", "z"});
    for (std::size_t s = 0; s < trace.field.size(); ++s) {
        const double t = trace.grid.times[trace.field_steps[s]];
        const auto& z = trace.field[s];
        for (std::size_t l = 0; l < z.size(); ++l) {
            csv.cell(t).cell(static_cast<double>(l + 1) * trace.grid.dx).cell(z[l]);
            csv.end_row();
        }
    }
}

nlohmann::json manifest_meta(const Experiment& experiment, const std::string& command) {
    const auto& cfg = experiment.config();
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    nlohmann::json grids = nlohmann::json::object();
    for (ArcIndex a = 0; a < experiment.grids().size(); ++a) {
        const auto& g = experiment.grids()[a];
        grids[cfg.network.arc(a).id] = {{"cells", g.cells}, {"steps", g.steps()}, {"dx", g.dx}};
    }
    return {{"command", command},
            {"config_hash", hash},
            {"master_seed", cfg.master_seed},
            {"t0", cfg.t0},
            {"T", cfg.T},
            {"sde_dt", cfg.sde_dt},
            {"pde_dx", cfg.pde_dx},
            {"update_times", cfg.update_times},
            {"arc_grids", grids},
            {"variants", experiment.variant_labels()},
            {"normal_generator", "mt19937_64 + Box-Muller, seed = derive_seed(master_seed, run, demand_index)"}};
}

namespace {

const std::string& node_id(const Experiment& e, std::size_t k) {
    return e.network().node(e.network().demand_nodes()[k]).id;
}

}  // namespace

void write_single_result(OutputSet& out, const Experiment& experiment, const SimulationResult& result,
                         bool field_dump) {
    const auto& net = experiment.network();
    for (std::size_t k = 0; k < result.demands.size(); ++k) {
        write_demand_csv(out.add("demand_" + node_id(experiment, k) + ".csv"), result.demands[k]);
    }
    for (const auto& v : result.variants) {
        write_inflow_csv(out.add("inflow_" + v.label + ".csv"), v.inflow);
        for (std::size_t k = 0; k < v.supply.size(); ++k) {
            write_supply_csv(out.add("supply_" + v.label + "_" + node_id(experiment, k) + ".csv"), v.supply[k]);
        }
        for (NodeIndex j : net.junction_nodes()) {
            write_alpha_csv(out.add("alpha_" + v.label + "_" + net.node(j).id + ".csv"), net, j, v.alphas);
        }
        if (field_dump) {
            for (ArcIndex a = 0; a < v.traces.size(); ++a) {
                write_field_csv(out.add("field_" + v.label + "_arc" + net.arc(a).id + ".csv"), v.traces[a]);
            }
        }
    }
    CsvWriter csv(out.add("objective.csv"), {"variant", "node", "window", "value"});
    for (const auto& v : result.variants) {
        for (std::size_t k = 0; k < v.objective.size(); ++k) {
            const auto& o = v.objective[k];
            for (std::size_t w = 0; w < o.per_window.size(); ++w) {
                csv.cell(v.label).cell(node_id(experiment, k)).cell(std::to_string(w)).cell(o.per_window[w]);
                csv.end_row();
            }
            csv.cell(v.label).cell(node_id(experiment, k)).cell(std::string("total")).cell(o.total);
            csv.end_row();
        }
    }
}

void write_ensemble_result(OutputSet& out, const Experiment& experiment, const EnsembleResult& result) {
    for (std::size_t k = 0; k < result.demand.size(); ++k) {
        write_stats_csv(out.add("demand_mean_" + node_id(experiment, k) + ".csv"), result.demand[k], "demand");
    }
    CsvWriter summary(out.add("ensemble_summary.csv"),
                      {"variant", "node", "objective_mean", "objective_se", "max_jump_mean_inflow",
                       "max_jump_single_inflow"});
    for (const auto& v : result.variants) {
        write_stats_csv(out.add("inflow_mean_" + v.label + ".csv"), v.inflow, "u");
        for (std::size_t k = 0; k < v.supply.size(); ++k) {
            write_stats_csv(out.add("supply_mean_" + v.label + "_" + node_id(experiment, k) + ".csv"), v.supply[k],
                            "supply");
            summary.cell(v.label)
                .cell(node_id(experiment, k))
                .cell(v.objective_mean[k])
                .cell(v.objective_std_error[k])
                .cell(v.max_jump_mean_inflow)
                .cell(v.max_jump_single_inflow);
            summary.end_row();
        }
    }
}

void write_comparison(OutputSet& out, const Experiment& experiment, const SimulationResult& result) {
    const auto& net = experiment.network();
    for (std::size_t k = 0; k < result.demands.size(); ++k) {
        write_demand_csv(out.add("demand_" + node_id(experiment, k) + ".csv"), result.demands[k]);
    }
    {
        CsvWriter csv(out.add("compare_inflow.csv"), {"variant", "t_in", "u", "window"});
        for (const auto& v : result.variants) {
            for (std::size_t i = 0; i < v.inflow.times.size(); ++i) {
                csv.cell(v.label).cell(v.inflow.times[i]).cell(v.inflow.values[i]).cell(v.inflow.window[i]);
                csv.end_row();
            }
        }
    }
    {
        CsvWriter csv(out.add("compare_supply.csv"), {"variant", "node", "t", "supply"});
        for (const auto& v : result.variants) {
            for (std::size_t k = 0; k < v.supply.size(); ++k) {
                for (std::size_t i = 0; i < v.supply[k].times.size(); ++i) {
                    csv.cell(v.label).cell(node_id(experiment, k)).cell(v.supply[k].times[i]).cell(v.supply[k].values[i]);
                    csv.end_row();
                }
            }
        }
    }
    {
        CsvWriter csv(out.add("compare_alpha.csv"), {"variant", "junction", "t", "arc", "alpha"});
        for (const auto& v : result.variants) {
            for (const auto& r : v.alphas) {
                const auto& outgoing = net.outgoing(r.junction);
                const auto slot = static_cast<std::size_t>(std::find(outgoing.begin(), outgoing.end(), r.child) - outgoing.begin());
                csv.cell(v.label).cell(net.node(r.junction).id).cell(r.t).cell(net.arc(r.child).id).cell(r.alpha.at(slot));
                csv.end_row();
            }
        }
    }
    {
        CsvWriter csv(out.add("compare_objective.csv"), {"variant", "node", "objective"});
        for (const auto& v : result.variants) {
            for (std::size_t k = 0; k < v.objective.size(); ++k) {
                csv.cell(v.label).cell(node_id(experiment, k)).cell(v.objective[k].total);
                csv.end_row();
            }
        }
    }
}

}  // namespace dampnet
