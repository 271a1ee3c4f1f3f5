#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ringcoord/collision.hpp"
#include "ringcoord/geometry.hpp"
#include "ringcoord/sim.hpp"

namespace ringcoord {

/// Campaign definition: one simulation run per (node count, replicate,
/// propagation model), sharing a deterministic seed schedule.
struct ExperimentPlan {
    std::vector<int> node_counts;
    int replicates = 1;
    std::vector<PropagationModel> models = {PropagationModel::FreeSpace};
    ProtocolConfig protocol;
    double width = 50.0;
    double height = 50.0;
    Point sink{25.0, 25.0};
    double range = 10.0;
    double path_loss_exponent = 3.0;
    double shadowing_sigma_db = 4.0;
    double delta_offset = 0.0;  // 0 means the default 0.01 * range
    int table_rings = 8;        // offset tables prebuilt for rings 1..table_rings
    std::uint64_t base_seed = 1;
    std::filesystem::path out_dir;
    bool write_event_log = false;

    /// Seed of one run: base_seed * 10^6 + node_count * 10^3 + replicate.
    std::uint64_t run_seed(int node_count, int replicate) const;
};

struct CountDegreeStat {
    int node_count = 0;
    int degree = 0;
    long long samples = 0;
    double mean_collisions = 0.0;
    double ci95_half_width = 0.0;
};

struct CountStat {
    int node_count = 0;
    long long samples = 0;
    double mean_collisions = 0.0;
    double ci95_half_width = 0.0;
};

struct ModelSummary {
    PropagationModel model = PropagationModel::FreeSpace;
    CollisionReport aggregate;               // per-degree, all counts pooled
    std::vector<CountDegreeStat> by_count_degree;
    std::vector<CountStat> by_count;
    double global_mean_collisions = 0.0;
    long long initialized_nodes = 0;
    long long uninitialized_nodes = 0;
};

struct CampaignSummary {
    std::vector<ModelSummary> models;
    std::vector<std::filesystem::path> files_written;
    std::vector<std::string> run_errors;  // failed runs, recorded not fatal
};

const char* model_name(PropagationModel model);
PropagationModel model_from_name(const std::string& name);

/// Execute the plan: place, link, initialize, map coordinates and count
/// collisions for every run; write per-run node dumps and per-model
/// aggregates under plan.out_dir. Byte-identical outputs for identical
/// plans and base seeds.
CampaignSummary run_campaign(const ExperimentPlan& plan);

/// One row of the per-run node dump CSV.
struct NodeDumpRow {
    int node_id = 0;
    double x = 0.0;
    double y = 0.0;
    int ring = 0;
    int degree = 0;
    int count_inner = 0;
    int count_same = 0;
    int count_outer = 0;
    double matched_offset = 0.0;
    double proj_distance = 0.0;
    double coordinate = 0.0;
    long long collisions_seen = 0;
    bool initialized = false;
};

std::vector<NodeDumpRow> read_node_dump_csv(const std::filesystem::path& path);

/// Emit gnuplot-compatible data files plus a plot script for the aggregates
/// found in campaign_dir: one mean-vs-degree series with 95% CI bars per
/// propagation model, overlaid with the theoretical expectation curve.
/// Raises MissingDataError (listing the absent files) when no aggregate is
/// present.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& campaign_dir,
                                              const std::filesystem::path& out_dir);

/// `table build`: write offset-table CSVs for rings n_min..n_max.
std::vector<std::filesystem::path> build_table_files(int n_min, int n_max, double range,
                                                     double delta,
                                                     const std::filesystem::path& out_dir);

struct TableCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct TableInspection {
    OffsetTable table;
    std::vector<TableCheck> checks;
    bool all_pass = false;
    /// Present when recompute was requested: per-offset comparison of the
    /// stored curve against fresh quadrature and against the closed form.
    std::vector<CrossCheckRow> cross_check;
};

/// `table inspect`: structural and monotonicity/conservation checks on a
/// stored table; optionally recompute the curve and run the closed-form
/// cross-check.
TableInspection inspect_table_file(const std::filesystem::path& path, bool recompute);

}  // namespace ringcoord
