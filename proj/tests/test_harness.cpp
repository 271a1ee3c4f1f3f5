#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ringcoord/errors.hpp"
#include "ringcoord/harness.hpp"

using namespace ringcoord;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ringcoord_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

ExperimentPlan small_plan(const fs::path& out) {
    ExperimentPlan plan;
    plan.node_counts = {50};
    plan.replicates = 2;
    plan.models = {PropagationModel::FreeSpace};
    plan.base_seed = 1;
    plan.out_dir = out;
    return plan;
}

}  // namespace

TEST_CASE("campaign writes node dumps and one aggregate per model") {
    const fs::path dir = fresh_dir("files");
    const CampaignSummary summary = run_campaign(small_plan(dir));
    CHECK(summary.run_errors.empty());
    CHECK(fs::exists(dir / "nodes_freespace_n50_r0.csv"));
    CHECK(fs::exists(dir / "nodes_freespace_n50_r1.csv"));
    CHECK(fs::exists(dir / "aggregate_freespace.csv"));
    int dumps = 0;
    int aggregates = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("nodes_", 0) == 0) ++dumps;
        if (name.rfind("aggregate_", 0) == 0) ++aggregates;
    }
    CHECK(dumps == 2);
    CHECK(aggregates == 1);
}

TEST_CASE("replayed campaign is byte identical") {
    const fs::path dir1 = fresh_dir("replay1");
    const fs::path dir2 = fresh_dir("replay2");
    ExperimentPlan plan = small_plan(dir1);
    plan.node_counts = {40, 80};
    plan.models = {PropagationModel::FreeSpace, PropagationModel::LogNormalShadowing};
    run_campaign(plan);
    plan.out_dir = dir2;
    run_campaign(plan);
    for (const auto& entry : fs::directory_iterator(dir1)) {
        const fs::path twin = dir2 / entry.path().filename();
        REQUIRE(fs::exists(twin));
        CHECK(slurp(entry.path()) == slurp(twin));
    }
}

TEST_CASE("different base seeds give different dumps") {
    const fs::path dir1 = fresh_dir("seed1");
    const fs::path dir2 = fresh_dir("seed2");
    ExperimentPlan plan = small_plan(dir1);
    run_campaign(plan);
    plan.base_seed = 2;
    plan.out_dir = dir2;
    run_campaign(plan);
    CHECK(slurp(dir1 / "nodes_freespace_n50_r0.csv") !=
          slurp(dir2 / "nodes_freespace_n50_r0.csv"));
}

TEST_CASE("aggregate equals re-aggregation of the node dumps") {
    const fs::path dir = fresh_dir("reagg");
    ExperimentPlan plan = small_plan(dir);
    plan.node_counts = {60, 120};
    plan.replicates = 3;
    const CampaignSummary summary = run_campaign(plan);

    std::map<int, std::pair<long long, double>> recomputed;  // degree -> (n, sum)
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("nodes_", 0) != 0) continue;
        for (const NodeDumpRow& row : read_node_dump_csv(entry.path())) {
            if (!row.initialized) continue;
            auto& acc = recomputed[row.degree];
            acc.first += 1;
            acc.second += static_cast<double>(row.collisions_seen);
        }
    }
    const CollisionReport& aggregate = summary.models[0].aggregate;
    REQUIRE(aggregate.buckets.size() == recomputed.size());
    for (const auto& bucket : aggregate.buckets) {
        const auto& acc = recomputed.at(bucket.degree);
        CHECK(bucket.samples == acc.first);
        CHECK(bucket.mean_collisions ==
              doctest::Approx(acc.second / acc.first).epsilon(1e-12));
    }
}

TEST_CASE("node dumps flag uninitialized nodes") {
    const fs::path dir = fresh_dir("uninit");
    ExperimentPlan plan = small_plan(dir);
    plan.node_counts = {8};  // sparse: disconnected stragglers are likely
    plan.replicates = 5;
    run_campaign(plan);
    bool saw_uninitialized = false;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("nodes_", 0) != 0) continue;
        for (const NodeDumpRow& row : read_node_dump_csv(entry.path())) {
            if (!row.initialized) {
                saw_uninitialized = true;
                CHECK(row.ring == 0);
                CHECK(std::isnan(row.coordinate));
            } else {
                CHECK(row.ring >= 1);
                CHECK(row.coordinate >= 0.0);
            }
        }
    }
    CHECK(saw_uninitialized);
}

TEST_CASE("plot emission produces series and theory files") {
    const fs::path dir = fresh_dir("plots");
    ExperimentPlan plan = small_plan(dir);
    plan.models = {PropagationModel::FreeSpace, PropagationModel::LogNormalShadowing};
    run_campaign(plan);
    const auto written = emit_plots(dir, dir);
    CHECK(fs::exists(dir / "collisions_freespace.dat"));
    CHECK(fs::exists(dir / "collisions_shadowing.dat"));
    CHECK(fs::exists(dir / "theory_expected.dat"));
    CHECK(fs::exists(dir / "collisions.gp"));
    CHECK(written.size() == 4);

    // theory series pins E[X]: k=3 -> 0.5
    std::ifstream theory(dir / "theory_expected.dat");
    std::string line;
    bool found = false;
    while (std::getline(theory, line)) {
        if (line == "3 0.5") found = true;
    }
    CHECK(found);
}

TEST_CASE("plot emission on an empty directory reports missing files") {
    const fs::path dir = fresh_dir("noplots");
    try {
        emit_plots(dir, dir);
        FAIL("expected MissingDataError");
    } catch (const MissingDataError& ex) {
        const std::string what = ex.what();
        CHECK(what.find("aggregate_freespace.csv") != std::string::npos);
        CHECK(what.find("aggregate_shadowing.csv") != std::string::npos);
    }
}

TEST_CASE("table build writes one valid file per ring") {
    const fs::path dir = fresh_dir("tables");
    const auto written = build_table_files(1, 5, 10.0, 0.1, dir);
    CHECK(written.size() == 5);
    for (const auto& path : written) {
        const TableInspection inspection = inspect_table_file(path, false);
        CHECK(inspection.all_pass);
    }
    CHECK_THROWS_AS(build_table_files(1, 3, 10.0, 0.0, dir), std::invalid_argument);
    CHECK_THROWS_AS(build_table_files(3, 1, 10.0, 0.1, dir), std::invalid_argument);
}

TEST_CASE("inspection catches a corrupted table") {
    const fs::path dir = fresh_dir("corrupt");
    build_table_files(2, 2, 10.0, 1.0, dir);
    const fs::path path = dir / "offset_table_n2.csv";

    // break conservation in one row
    OffsetTable table = read_offset_table_file(path.string());
    table.entries[3].fractions.frac_b += 0.25;
    write_offset_table_file(table, path.string());

    const TableInspection inspection = inspect_table_file(path, false);
    CHECK_FALSE(inspection.all_pass);
    bool conservation_failed = false;
    for (const auto& check : inspection.checks) {
        if (check.name == "conservation" && !check.pass) conservation_failed = true;
    }
    CHECK(conservation_failed);
}

TEST_CASE("inspection with recompute cross-checks the closed form") {
    const fs::path dir = fresh_dir("recompute");
    build_table_files(2, 2, 10.0, 1.0, dir);
    const TableInspection inspection =
        inspect_table_file(dir / "offset_table_n2.csv", true);
    CHECK(inspection.all_pass);
    REQUIRE_FALSE(inspection.cross_check.empty());
    bool disagreement_reported = false;
    for (const auto& row : inspection.cross_check) {
        if (!row.agrees) disagreement_reported = true;
    }
    // small offsets sit in the wedge regime, so the report must show them
    CHECK(disagreement_reported);
}

TEST_CASE("plan validation") {
    ExperimentPlan plan;
    plan.out_dir = fresh_dir("invalid");
    CHECK_THROWS_AS(run_campaign(plan), std::invalid_argument);  // no counts
    plan.node_counts = {10};
    plan.replicates = 0;
    CHECK_THROWS_AS(run_campaign(plan), std::invalid_argument);
    plan.replicates = 1;
    plan.models.clear();
    CHECK_THROWS_AS(run_campaign(plan), std::invalid_argument);
}

TEST_CASE("seed policy composes base, count and replicate") {
    ExperimentPlan plan;
    plan.base_seed = 7;
    CHECK(plan.run_seed(350, 12) == 7'350'012ULL);
}
