#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringcoord/errors.hpp"
#include "ringcoord/harness.hpp"
#include "ringcoord/numeric_io.hpp"

namespace {

using namespace ringcoord;

struct SimOptions {
    int nodes = 50;
    double width = 50.0;
    double height = 50.0;
    double sink_x = 25.0;
    double sink_y = 25.0;
    double range = 10.0;
    std::string model = "freespace";
    double eta = 3.0;
    double sigma = 4.0;
    std::string mode = "wave";
    int slots = 16;
    std::uint64_t seed = 1;
    int replicates = 1;
    double delta = 0.0;
    std::string out = "out";
    bool events = false;
};

void add_common_options(CLI::App& cmd, SimOptions& opt) {
    cmd.add_option("--width", opt.width, "Field width");
    cmd.add_option("--height", opt.height, "Field height");
    cmd.add_option("--sink-x", opt.sink_x, "Sink x position");
    cmd.add_option("--sink-y", opt.sink_y, "Sink y position");
    cmd.add_option("--range", opt.range, "Radio range R");
    cmd.add_option("--eta", opt.eta, "Path loss exponent (shadowing model)");
    cmd.add_option("--sigma", opt.sigma, "Shadowing sigma in dB");
    cmd.add_option("--mode", opt.mode, "Protocol mode: wave|contention")
        ->check(CLI::IsMember({"wave", "contention"}));
    cmd.add_option("--slots", opt.slots, "Contention slots per period");
    cmd.add_option("--seed", opt.seed, "Base seed");
    cmd.add_option("--replicates", opt.replicates, "Replicates per node count");
    cmd.add_option("--delta", opt.delta, "Offset table step (default 0.01*range)");
    cmd.add_option("--out", opt.out, "Output directory");
    cmd.add_flag("--events", opt.events, "Also write per-run event logs");
}

ExperimentPlan plan_from_options(const SimOptions& opt, const std::vector<int>& counts,
                                 const std::vector<std::string>& models) {
    ExperimentPlan plan;
    plan.node_counts = counts;
    plan.replicates = opt.replicates;
    plan.models.clear();
    for (const auto& m : models) plan.models.push_back(model_from_name(m));
    plan.protocol.mode = opt.mode == "wave" ? ProtocolConfig::Mode::WaveIdealized
                                            : ProtocolConfig::Mode::Contention;
    plan.protocol.slots_per_period = opt.slots;
    plan.width = opt.width;
    plan.height = opt.height;
    plan.sink = {opt.sink_x, opt.sink_y};
    plan.range = opt.range;
    plan.path_loss_exponent = opt.eta;
    plan.shadowing_sigma_db = opt.sigma;
    plan.delta_offset = opt.delta;
    plan.base_seed = opt.seed;
    plan.out_dir = opt.out;
    plan.write_event_log = opt.events;
    return plan;
}

void print_summary(const CampaignSummary& summary) {
    for (const auto& ms : summary.models) {
        std::cout << "model " << model_name(ms.model) << ": initialized "
                  << ms.initialized_nodes << " nodes";
        if (ms.uninitialized_nodes > 0) {
            std::cout << " (" << ms.uninitialized_nodes << " uninitialized, excluded)";
        }
        std::cout << ", mean collisions seen "
                  << format_double(ms.global_mean_collisions) << "\n";
        for (const auto& row : ms.by_count) {
            std::cout << "  count " << row.node_count << ": mean "
                      << format_double(row.mean_collisions) << " +/- "
                      << format_double(row.ci95_half_width) << " (" << row.samples
                      << " nodes)\n";
        }
    }
    if (!summary.run_errors.empty()) {
        std::cout << summary.run_errors.size() << " run(s) failed:\n";
        for (const auto& err : summary.run_errors) std::cout << "  " << err << "\n";
    }
    std::cout << summary.files_written.size() << " file(s) written\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D ring coordinates for convergecast sensor networks"};
    app.require_subcommand(1);

    SimOptions sim_opt;
    auto* simulate = app.add_subcommand(
        "simulate", "Run replicates at one node count and write dumps + aggregate");
    simulate->add_option("--nodes", sim_opt.nodes, "Number of sensor nodes");
    simulate->add_option("--model", sim_opt.model, "Propagation model")
        ->check(CLI::IsMember({"freespace", "shadowing"}));
    add_common_options(*simulate, sim_opt);
    simulate->set_config("--config", "", "Read options from a key=value file");

    SimOptions camp_opt;
    std::vector<int> camp_counts;
    std::vector<std::string> camp_models = {"freespace"};
    auto* campaign = app.add_subcommand(
        "campaign", "Run a full experiment campaign over node counts and models");
    campaign->add_option("--counts", camp_counts, "Node counts to sweep")
        ->delimiter(',')
        ->required();
    campaign->add_option("--models", camp_models, "Propagation models to run")
        ->delimiter(',');
    add_common_options(*campaign, camp_opt);
    campaign->set_config("--plan", "", "Campaign plan file (key=value, flags override)");

    std::string plot_in;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "Emit gnuplot data and script for a campaign");
    plot->add_option("--in", plot_in, "Campaign output directory")->required();
    plot->add_option("--out", plot_out, "Plot output directory (default: --in)");

    auto* table = app.add_subcommand("table", "Offset table tooling");
    table->require_subcommand(1);
    int tb_nmin = 1, tb_nmax = 5;
    double tb_range = 10.0, tb_delta = 0.1;
    std::string tb_out = "tables";
    auto* tbuild = table->add_subcommand("build", "Write offset table CSVs");
    tbuild->add_option("--n-min", tb_nmin, "First ring index");
    tbuild->add_option("--n-max", tb_nmax, "Last ring index");
    tbuild->add_option("--range", tb_range, "Radio range R");
    tbuild->add_option("--delta", tb_delta, "Offset step");
    tbuild->add_option("--out", tb_out, "Output directory");

    std::string ti_file;
    bool ti_recompute = false;
    auto* tinspect = table->add_subcommand("inspect", "Check a stored offset table");
    tinspect->add_option("--file", ti_file, "Offset table CSV")->required();
    tinspect->add_flag("--recompute", ti_recompute,
                       "Recompute the curve and run the closed-form cross-check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            auto plan = plan_from_options(sim_opt, {sim_opt.nodes}, {sim_opt.model});
            print_summary(run_campaign(plan));
        } else if (campaign->parsed()) {
            auto plan = plan_from_options(camp_opt, camp_counts, camp_models);
            print_summary(run_campaign(plan));
        } else if (plot->parsed()) {
            const std::filesystem::path in = plot_in;
            const std::filesystem::path out =
                plot_out.empty() ? in : std::filesystem::path(plot_out);
            for (const auto& path : emit_plots(in, out)) {
                std::cout << "wrote " << path.string() << "\n";
            }
        } else if (tbuild->parsed()) {
            for (const auto& path :
                 build_table_files(tb_nmin, tb_nmax, tb_range, tb_delta, tb_out)) {
                std::cout << "wrote " << path.string() << "\n";
            }
        } else if (tinspect->parsed()) {
            const TableInspection report = inspect_table_file(ti_file, ti_recompute);
            for (const auto& check : report.checks) {
                std::cout << (check.pass ? "ok   " : "FAIL ") << check.name << ": "
                          << check.detail << "\n";
            }
            if (!report.cross_check.empty()) {
                std::size_t disagreements = 0;
                for (const auto& row : report.cross_check) {
                    if (!row.agrees) ++disagreements;
                }
                std::cout << "closed-form cross-check: " << disagreements << " of "
                          << report.cross_check.size()
                          << " offsets disagree beyond 1e-4 relative\n";
                for (const auto& row : report.cross_check) {
                    if (!row.agrees) {
                        std::cout << "  offset " << format_double(row.offset)
                                  << ": quadrature " << format_double(row.quadrature)
                                  << " vs closed form " << format_double(row.closed_form)
                                  << " (rel " << format_double(row.rel_diff) << ")\n";
                    }
                }
            }
            if (!report.all_pass) {
                std::cerr << "table inspection failed\n";
                return 1;
            }
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
