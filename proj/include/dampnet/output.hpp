#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dampnet/experiment.hpp"

namespace dampnet {

/// Shortest round-trip decimal representation ("0.1", "1e-05", ...).
std::string format_number(double v);

/// Minimal CSV writer: header row, unquoted numeric cells, '\n' line ends.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::size_t v);
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    std::ofstream out_;
    bool first_ = true;
};

/// Files written into an output directory, recorded in manifest.json.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path add(const std::string& name);
    const std::vector<std::string>& files() const { return files_; }

    /// Writes manifest.json with `meta` plus the file list.
    void write_manifest(nlohmann::json meta) const;

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

void write_demand_csv(const std::filesystem::path& path, const DemandPath& path_values);
void write_inflow_csv(const std::filesystem::path& path, const InflowProfile& inflow);
void write_supply_csv(const std::filesystem::path& path, const SupplySeries& supply);
/// Long format (t, arc, alpha) for one junction.
void write_alpha_csv(const std::filesystem::path& path, const TreeNetwork& net, NodeIndex junction,
                     const std::vector<AlphaRecord>& records);
void write_stats_csv(const std::filesystem::path& path, const SeriesStats& stats, const std::string& value_name);
/// Space-time dump (t, x, z) of an arc trace; needs a field_stride run.
void write_field_csv(const std::filesystem::path& path, const ArcTrace& trace);

/// Manifest metadata shared by every command: config hash, seed, grids.
nlohmann::json manifest_meta(const Experiment& experiment, const std::string& command);

/// All series of a single realization.
void write_single_result(OutputSet& out, const Experiment& experiment, const SimulationResult& result,
                         bool field_dump = false);
void write_ensemble_result(OutputSet& out, const Experiment& experiment, const EnsembleResult& result);
/// Stacked per-variant files: (variant, t_in, u), (variant, node, t, supply), (variant, t, arc, alpha).
void write_comparison(OutputSet& out, const Experiment& experiment, const SimulationResult& result);

}  // namespace dampnet
