#include "ringcoord/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ringcoord/errors.hpp"
#include "ringcoord/numeric_io.hpp"

namespace ringcoord {

namespace fs = std::filesystem;

const char* model_name(PropagationModel model) {
    return model == PropagationModel::FreeSpace ? "freespace" : "shadowing";
}

PropagationModel model_from_name(const std::string& name) {
    if (name == "freespace") return PropagationModel::FreeSpace;
    if (name == "shadowing") return PropagationModel::LogNormalShadowing;
    throw std::invalid_argument("unknown propagation model: " + name);
}

std::uint64_t ExperimentPlan::run_seed(int node_count, int replicate) const {
    return base_seed * 1'000'000ULL + static_cast<std::uint64_t>(node_count) * 1'000ULL +
           static_cast<std::uint64_t>(replicate);
}

namespace {

struct Acc {
    long long n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        n += 1;
        sum += x;
        sum_sq += x * x;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double ci95() const {
        if (n < 2) return 0.0;
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
        return 1.96 * std::sqrt(var / n);
    }
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    return out;
}

void write_node_dump(const fs::path& path, const Topology& topo,
                     const std::vector<NodeOutcome>& nodes,
                     const std::vector<std::optional<MappingResult>>& coords,
                     const std::vector<int>& degrees,
                     const std::vector<long long>& collisions) {
    auto out = open_out(path);
    out << "node_id,x,y,ring,degree,count_inner,count_same,count_outer,"
           "matched_offset,proj_distance,coordinate,collisions_seen,initialized\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const NodeOutcome& node = nodes[i];
        const bool init = node.initialized;
        const MappingResult mapping = coords[i] ? *coords[i] : MappingResult{nan, nan, nan, nan};
        out << i << ',' << format_double(topo.nodes[i].x) << ','
            << format_double(topo.nodes[i].y) << ',' << (init ? node.ring : 0) << ','
            << degrees[i] << ',' << (init ? node.census.count_inner : 0) << ','
            << (init ? node.census.count_same : 0) << ','
            << (init ? node.census.count_outer : 0) << ','
            << format_double(mapping.matched_offset) << ','
            << format_double(mapping.projection_distance) << ','
            << format_double(mapping.coordinate) << ',' << collisions[i] << ','
            << (init ? 1 : 0) << "\n";
    }
}

CollisionReport report_from_acc(const std::map<int, Acc>& by_degree) {
    CollisionReport report;
    double total_sum = 0.0;
    for (const auto& [degree, acc] : by_degree) {
        DegreeBucket bucket;
        bucket.degree = degree;
        bucket.samples = acc.n;
        bucket.mean_collisions = acc.mean();
        bucket.ci95_half_width = acc.ci95();
        bucket.low_confidence = acc.n < 5;
        report.buckets.push_back(bucket);
        report.total_samples += acc.n;
        total_sum += acc.sum;
    }
    if (report.total_samples > 0) {
        report.global_mean = total_sum / report.total_samples;
    }
    return report;
}

}  // namespace

CampaignSummary run_campaign(const ExperimentPlan& plan) {
    if (plan.node_counts.empty()) {
        throw std::invalid_argument("plan has no node counts");
    }
    for (const int count : plan.node_counts) {
        if (count < 1) throw std::invalid_argument("node counts must be >= 1");
    }
    if (plan.replicates < 1) {
        throw std::invalid_argument("replicates must be >= 1");
    }
    if (plan.models.empty()) {
        throw std::invalid_argument("plan has no propagation models");
    }
    if (!(plan.range > 0.0)) {
        throw std::invalid_argument("range must be > 0");
    }
    const double delta =
        plan.delta_offset > 0.0 ? plan.delta_offset : 0.01 * plan.range;
    if (!(delta < plan.range)) {
        throw std::invalid_argument("delta_offset must be below range");
    }
    fs::create_directories(plan.out_dir);

    std::vector<OffsetTable> tables;
    tables.reserve(static_cast<std::size_t>(plan.table_rings));
    for (int ring = 1; ring <= plan.table_rings; ++ring) {
        tables.push_back(build_offset_table({plan.range, ring}, delta));
    }

    CampaignSummary summary;
    for (const PropagationModel model : plan.models) {
        PropagationConfig prop;
        prop.model = model;
        prop.range = plan.range;
        prop.path_loss_exponent = plan.path_loss_exponent;
        prop.shadowing_sigma_db = plan.shadowing_sigma_db;

        ModelSummary ms;
        ms.model = model;
        std::map<int, Acc> by_degree;
        std::map<int, std::map<int, Acc>> by_count_degree;
        std::map<int, Acc> by_count;

        for (const int count : plan.node_counts) {
            for (int rep = 0; rep < plan.replicates; ++rep) {
                const std::uint64_t seed = plan.run_seed(count, rep);
                try {
                    const Topology topo = place_nodes(count, plan.width, plan.height,
                                                      plan.sink, mix_seed(seed, 1));
                    const Adjacency adj = build_links(topo, prop, mix_seed(seed, 2));
                    const SimOutcome outcome = run_initialization(
                        topo, adj, plan.protocol, mix_seed(seed, 3), plan.write_event_log);
                    const auto coords =
                        compute_all_coordinates(outcome, tables, plan.range);

                    // Collision statistics run on the subgraph of nodes that
                    // own a coordinate; uninitialized nodes are flagged in
                    // the dump and skipped here.
                    const int n = count;
                    std::vector<int> compact(static_cast<std::size_t>(n), -1);
                    std::vector<int> members;
                    for (int i = 0; i < n; ++i) {
                        if (coords[static_cast<std::size_t>(i)]) {
                            compact[static_cast<std::size_t>(i)] =
                                static_cast<int>(members.size());
                            members.push_back(i);
                        }
                    }
                    Adjacency sub(members.size());
                    std::vector<double> sub_coords(members.size());
                    for (std::size_t ci = 0; ci < members.size(); ++ci) {
                        const int id = members[ci];
                        sub_coords[ci] = coords[static_cast<std::size_t>(id)]->coordinate;
                        for (const int nb : adj[static_cast<std::size_t>(id)]) {
                            if (nb < n && compact[static_cast<std::size_t>(nb)] >= 0) {
                                sub[ci].push_back(compact[static_cast<std::size_t>(nb)]);
                            }
                        }
                    }
                    const std::vector<long long> sub_collisions =
                        collisions_seen(sub, sub_coords);

                    std::vector<int> degrees(static_cast<std::size_t>(n), 0);
                    std::vector<long long> collisions(static_cast<std::size_t>(n), 0);
                    for (int i = 0; i < n; ++i) {
                        int deg = 0;
                        for (const int nb : adj[static_cast<std::size_t>(i)]) {
                            if (nb < n && compact[static_cast<std::size_t>(nb)] >= 0) ++deg;
                        }
                        degrees[static_cast<std::size_t>(i)] = deg;
                        const int ci = compact[static_cast<std::size_t>(i)];
                        if (ci >= 0) {
                            collisions[static_cast<std::size_t>(i)] =
                                sub_collisions[static_cast<std::size_t>(ci)];
                        }
                    }

                    for (int i = 0; i < n; ++i) {
                        if (compact[static_cast<std::size_t>(i)] < 0) {
                            ms.uninitialized_nodes += 1;
                            continue;
                        }
                        ms.initialized_nodes += 1;
                        const auto x =
                            static_cast<double>(collisions[static_cast<std::size_t>(i)]);
                        const int deg = degrees[static_cast<std::size_t>(i)];
                        by_degree[deg].add(x);
                        by_count_degree[count][deg].add(x);
                        by_count[count].add(x);
                    }

                    std::ostringstream name;
                    name << "nodes_" << model_name(model) << "_n" << count << "_r" << rep
                         << ".csv";
                    const fs::path dump_path = plan.out_dir / name.str();
                    write_node_dump(dump_path, topo, outcome.nodes, coords, degrees,
                                    collisions);
                    summary.files_written.push_back(dump_path);

                    if (plan.write_event_log) {
                        std::ostringstream log_name;
                        log_name << "events_" << model_name(model) << "_n" << count << "_r"
                                 << rep << ".log";
                        const fs::path log_path = plan.out_dir / log_name.str();
                        auto out = open_out(log_path);
                        out << "time,event,node,detail\n";
                        for (const SimEvent& ev : outcome.events) {
                            out << format_double(ev.time) << ',' << ev.event << ','
                                << ev.node << ',' << ev.detail << "\n";
                        }
                        summary.files_written.push_back(log_path);
                    }
                } catch (const std::exception& ex) {
                    std::ostringstream err;
                    err << "model=" << model_name(model) << " count=" << count
                        << " replicate=" << rep << ": " << ex.what();
                    summary.run_errors.push_back(err.str());
                }
            }
        }

        ms.aggregate = report_from_acc(by_degree);
        ms.global_mean_collisions = ms.aggregate.global_mean;
        for (const auto& [count, degree_map] : by_count_degree) {
            for (const auto& [degree, acc] : degree_map) {
                ms.by_count_degree.push_back(
                    {count, degree, acc.n, acc.mean(), acc.ci95()});
            }
        }
        for (const auto& [count, acc] : by_count) {
            ms.by_count.push_back({count, acc.n, acc.mean(), acc.ci95()});
        }

        const fs::path agg_path =
            plan.out_dir / (std::string("aggregate_") + model_name(model) + ".csv");
        {
            auto out = open_out(agg_path);
            write_collision_report_csv(ms.aggregate, out);
        }
        summary.files_written.push_back(agg_path);

        const fs::path density_path =
            plan.out_dir / (std::string("density_") + model_name(model) + ".csv");
        {
            auto out = open_out(density_path);
            out << "node_count,degree,samples,mean_collisions,ci95_half_width\n";
            for (const auto& row : ms.by_count_degree) {
                out << row.node_count << ',' << row.degree << ',' << row.samples << ','
                    << format_double(row.mean_collisions) << ','
                    << format_double(row.ci95_half_width) << "\n";
            }
        }
        summary.files_written.push_back(density_path);

        const fs::path bycount_path =
            plan.out_dir / (std::string("bycount_") + model_name(model) + ".csv");
        {
            auto out = open_out(bycount_path);
            out << "node_count,samples,mean_collisions,ci95_half_width\n";
            for (const auto& row : ms.by_count) {
                out << row.node_count << ',' << row.samples << ','
                    << format_double(row.mean_collisions) << ','
                    << format_double(row.ci95_half_width) << "\n";
            }
        }
        summary.files_written.push_back(bycount_path);

        summary.models.push_back(std::move(ms));
    }
    return summary;
}

std::vector<NodeDumpRow> read_node_dump_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) ||
        line != "node_id,x,y,ring,degree,count_inner,count_same,count_outer,"
                "matched_offset,proj_distance,coordinate,collisions_seen,initialized") {
        throw CsvFormatError("node dump: bad header line");
    }
    std::vector<NodeDumpRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 13) {
            throw CsvFormatError("node dump: expected 13 fields per row");
        }
        NodeDumpRow row;
        row.node_id = static_cast<int>(parse_int(fields[0]));
        row.x = parse_double(fields[1]);
        row.y = parse_double(fields[2]);
        row.ring = static_cast<int>(parse_int(fields[3]));
        row.degree = static_cast<int>(parse_int(fields[4]));
        row.count_inner = static_cast<int>(parse_int(fields[5]));
        row.count_same = static_cast<int>(parse_int(fields[6]));
        row.count_outer = static_cast<int>(parse_int(fields[7]));
        row.matched_offset = parse_double(fields[8]);
        row.proj_distance = parse_double(fields[9]);
        row.coordinate = parse_double(fields[10]);
        row.collisions_seen = parse_int(fields[11]);
        row.initialized = parse_int(fields[12]) != 0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<fs::path> emit_plots(const fs::path& campaign_dir, const fs::path& out_dir) {
    const PropagationModel all_models[] = {PropagationModel::FreeSpace,
                                           PropagationModel::LogNormalShadowing};
    std::vector<std::pair<PropagationModel, CollisionReport>> series;
    std::vector<std::string> absent;
    for (const PropagationModel model : all_models) {
        const fs::path path =
            campaign_dir / (std::string("aggregate_") + model_name(model) + ".csv");
        if (!fs::exists(path)) {
            absent.push_back(path.string());
            continue;
        }
        std::ifstream in(path);
        if (!in) {
            throw std::runtime_error("cannot open for reading: " + path.string());
        }
        series.emplace_back(model, read_collision_report_csv(in));
    }
    if (series.empty()) {
        std::string msg = "no aggregate data found; looked for:";
        for (const auto& p : absent) msg += " " + p;
        throw MissingDataError(msg);
    }

    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    int max_degree = 10;
    for (const auto& [model, report] : series) {
        const fs::path dat =
            out_dir / (std::string("collisions_") + model_name(model) + ".dat");
        auto out = open_out(dat);
        out << "# degree mean_collisions ci95_half_width\n";
        for (const auto& bucket : report.buckets) {
            out << bucket.degree << ' ' << format_double(bucket.mean_collisions) << ' '
                << format_double(bucket.ci95_half_width) << "\n";
            max_degree = std::max(max_degree, bucket.degree);
        }
        written.push_back(dat);
    }

    const fs::path theory = out_dir / "theory_expected.dat";
    {
        auto out = open_out(theory);
        out << "# degree expected_collisions\n";
        for (int k = 2; k <= max_degree; ++k) {
            out << k << ' ' << format_double(expected_collisions(k)) << "\n";
        }
    }
    written.push_back(theory);

    const fs::path script = out_dir / "collisions.gp";
    {
        auto out = open_out(script);
        out << "set terminal pngcairo size 900,600\n"
            << "set output 'collisions.png'\n"
            << "set xlabel 'number of neighbors'\n"
            << "set ylabel 'mean coordinate collisions seen'\n"
            << "set key top left\n";
        out << "plot ";
        bool first = true;
        for (const auto& [model, report] : series) {
            if (!first) out << ", \\\n     ";
            first = false;
            out << "'collisions_" << model_name(model)
                << ".dat' using 1:2:3 with yerrorlines title '"
                << (model == PropagationModel::FreeSpace ? "free space"
                                                         : "log-normal shadowing")
                << "'";
        }
        out << ", \\\n     'theory_expected.dat' using 1:2 with lines "
               "title 'uniform-draw expectation'\n";
    }
    written.push_back(script);
    return written;
}

std::vector<fs::path> build_table_files(int n_min, int n_max, double range, double delta,
                                        const fs::path& out_dir) {
    if (n_min < 1 || n_max < n_min) {
        throw std::invalid_argument("need 1 <= n_min <= n_max");
    }
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    for (int ring = n_min; ring <= n_max; ++ring) {
        const OffsetTable table = build_offset_table({range, ring}, delta);
        const fs::path path =
            out_dir / ("offset_table_n" + std::to_string(ring) + ".csv");
        write_offset_table_file(table, path.string());
        written.push_back(path);
    }
    return written;
}

TableInspection inspect_table_file(const fs::path& path, bool recompute) {
    TableInspection result;
    result.table = read_offset_table_file(path.string());
    const OffsetTable& table = result.table;

    const auto add = [&](std::string name, bool pass, std::string detail) {
        result.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    const bool meta_ok = table.ring_index >= 1 && table.radio_range > 0.0 &&
                         table.delta_offset > 0.0 &&
                         table.delta_offset < table.radio_range;
    add("metadata", meta_ok,
        "n=" + std::to_string(table.ring_index) + " R=" + format_double(table.radio_range) +
            " delta=" + format_double(table.delta_offset));

    const auto expected_count =
        static_cast<std::size_t>(std::ceil(table.radio_range / table.delta_offset));
    add("entry-count", table.entries.size() == expected_count,
        "have " + std::to_string(table.entries.size()) + ", expected " +
            std::to_string(expected_count));

    bool grid_ok = !table.entries.empty() && table.entries.front().offset == 0.0;
    double max_step_err = 0.0;
    for (std::size_t i = 1; i < table.entries.size(); ++i) {
        const double step = table.entries[i].offset - table.entries[i - 1].offset;
        if (!(step > 0.0)) grid_ok = false;
        max_step_err = std::max(max_step_err, std::abs(step - table.delta_offset));
    }
    if (max_step_err > 1e-9 * table.delta_offset) grid_ok = false;
    add("offset-grid", grid_ok, "max step error " + format_double(max_step_err));

    double max_sum_err = 0.0;
    bool range_ok = true;
    for (const auto& e : table.entries) {
        const auto& f = e.fractions;
        if (f.frac_a < 0.0 || f.frac_b < 0.0 || f.frac_c < 0.0 || f.frac_a > 1.0 ||
            f.frac_b > 1.0 || f.frac_c > 1.0) {
            range_ok = false;
        }
        max_sum_err = std::max(max_sum_err, std::abs(f.frac_a + f.frac_b + f.frac_c - 1.0));
    }
    add("fraction-range", range_ok, "components within [0,1]");
    add("conservation", max_sum_err <= 1e-9,
        "max |frac_a+frac_b+frac_c - 1| = " + format_double(max_sum_err));

    bool mono_a = true, mono_c = true;
    for (std::size_t i = 1; i < table.entries.size(); ++i) {
        if (table.entries[i].fractions.frac_a >
            table.entries[i - 1].fractions.frac_a + 1e-9) {
            mono_a = false;
        }
        if (table.entries[i].fractions.frac_c <
            table.entries[i - 1].fractions.frac_c - 1e-9) {
            mono_c = false;
        }
    }
    add("monotone-frac-a", mono_a, "non-increasing");
    add("monotone-frac-c", mono_c, "non-decreasing");

    add("outer-boundary-zero",
        !table.entries.empty() && table.entries.front().fractions.frac_c <= 1e-9,
        "frac_c(0) = " +
            (table.entries.empty() ? std::string("n/a")
                                   : format_double(table.entries.front().fractions.frac_c)));

    bool band_positive = true;
    for (const auto& e : table.entries) {
        if (!(e.fractions.frac_b > 0.0)) band_positive = false;
    }
    add("band-positive", band_positive, "frac_b > 0 for every entry");

    if (recompute && meta_ok) {
        const RingModelParams params{table.radio_range, table.ring_index};
        double max_diff = 0.0;
        for (const auto& e : table.entries) {
            const AreaFractions fresh = area_fractions(params, e.offset);
            max_diff = std::max(max_diff, std::abs(fresh.frac_a - e.fractions.frac_a));
            max_diff = std::max(max_diff, std::abs(fresh.frac_b - e.fractions.frac_b));
            max_diff = std::max(max_diff, std::abs(fresh.frac_c - e.fractions.frac_c));
        }
        add("recompute-match", max_diff <= 1e-9,
            "max |stored - recomputed| = " + format_double(max_diff));
        result.cross_check = closed_form_cross_check(params, table.delta_offset);
    }

    result.all_pass = std::all_of(result.checks.begin(), result.checks.end(),
                                  [](const TableCheck& c) { return c.pass; });
    return result;
}

}  // namespace ringcoord
