#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "eusn/cli.hpp"
#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/linalg.hpp"
#include "eusn/rng.hpp"
#include "eusn/tasks.hpp"

namespace {

using namespace eusn;
using namespace eusn::cli;
namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::path(EUSN_TEST_TMP) / "cli" / name;
    fs::remove_all(dir);
    return dir;
}

std::vector<std::vector<double>> read_csv(const fs::path& path, std::string* header = nullptr) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell).value_or(std::nan("")));
        rows.push_back(row);
    }
    return rows;
}

int run_tool(const std::string& args) {
    const std::string cmd = std::string(EUSN_TOOL) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Two classes with constant +/-1 sequences plus small noise.
Dataset separable_fixture(std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.n_features = 2;
    d.n_classes = 2;
    for (std::size_t i = 0; i < 30; ++i) {
        const std::size_t label = i % 2;
        Matrix s(8, 2);
        for (std::size_t t = 0; t < 8; ++t) {
            s(t, 0) = (label ? 1.0 : -1.0) + rng.uniform(-0.05, 0.05);
            s(t, 1) = rng.uniform(-0.05, 0.05);
        }
        d.sequences.push_back(s);
        d.labels.push_back(label);
    }
    return d;
}

TEST(Parsers, GridListMatrix) {
    const auto g = parse_grid("1e-10:1e-1:10");
    ASSERT_EQ(g.size(), 10u);
    EXPECT_EQ(g.front(), 1e-10);
    EXPECT_EQ(g.back(), 1e-1);
    EXPECT_EQ(parse_grid("1:3:3:lin"), (std::vector<double>{1.0, 2.0, 3.0}));
    EXPECT_EQ(parse_grid("0.5:0.5:1"), (std::vector<double>{0.5}));
    EXPECT_THROW(parse_grid("1:2"), ConfigError);
    EXPECT_THROW(parse_grid("1:2:0"), ConfigError);
    EXPECT_THROW(parse_grid("1:2:2.5"), ConfigError);
    EXPECT_THROW(parse_grid("0:1:3"), ConfigError);
    EXPECT_THROW(parse_grid("1:2:3:cubic"), ConfigError);

    EXPECT_EQ(parse_list("1e-3,0.01,1"), (std::vector<double>{1e-3, 0.01, 1.0}));
    EXPECT_THROW(parse_list("1,,2"), ConfigError);

    EXPECT_EQ(parse_matrix("0,1.5;-1.5,0"), Matrix(2, 2, {0, 1.5, -1.5, 0}));
    EXPECT_THROW(parse_matrix("1,2;3"), ShapeError);
}

TEST(Trajectory, PresetTwoDimensionalSystems) {
    TrajectoryOptions o;
    o.fig1 = true;
    o.out = fresh_dir("fig1");
    const auto m = run_trajectory(o);
    EXPECT_EQ(m.outputs.size(), 13u);  // 12 trajectories + manifest
    std::size_t csvs = 0;
    for (const auto& e : fs::directory_iterator(o.out)) csvs += e.path().extension() == ".csv";
    EXPECT_EQ(csvs, 12u);

    for (const char* start : {"u0", "v0", "z0"}) {
        std::string header;
        const auto esp = read_csv(o.out / (std::string("trajectory_esn_esp_") + start + ".csv"), &header);
        EXPECT_EQ(header, "step,h0,h1");
        ASSERT_EQ(esp.size(), 1001u);
        EXPECT_LT(std::hypot(esp.back()[1], esp.back()[2]), 1e-6);
    }
    const auto u = read_csv(o.out / "trajectory_eusn_u0.csv");
    const auto v = read_csv(o.out / "trajectory_eusn_v0.csv");
    const auto z = read_csv(o.out / "trajectory_eusn_z0.csv");
    for (std::size_t t = 0; t < u.size(); ++t) {
        const double nu = std::hypot(u[t][1], u[t][2]), nv = std::hypot(v[t][1], v[t][2]), nz = std::hypot(z[t][1], z[t][2]);
        EXPECT_LT(nu, nv) << "step " << t;
        EXPECT_LT(nv, nz) << "step " << t;
    }
}

TEST(Trajectory, CustomAndMismatch) {
    TrajectoryOptions o;
    o.out = fresh_dir("traj_custom");
    o.matrix = parse_matrix("0,1;-1,0");
    o.initial = {{0.2, 0.0}};
    o.steps = 5;
    run_trajectory(o);
    EXPECT_EQ(read_csv(o.out / "trajectory_eusn_h0.csv").size(), 6u);

    o.initial = {{0.2, 0.0, 1.0}};
    o.out = fresh_dir("traj_bad");
    EXPECT_THROW(run_trajectory(o), ShapeError);
    EXPECT_FALSE(fs::exists(o.out));
}

TEST(Heatmap, SmokeGrid) {
    HeatmapOptions o;
    o.n_units = 10;
    o.epsilon_grid = {1e-3, 1e-2};
    o.gamma_grid = {1e-3, 1e-2};
    o.omega_r_values = {0.5};
    o.repetitions = 2;
    o.out = fresh_dir("heatmap");
    HeatmapReport rep;
    run_heatmap(o, &rep);
    EXPECT_EQ(rep.cells.size(), 4u);
    std::string header;
    const auto rows = read_csv(o.out / "heatmap_rho_omega_r_0p5.csv", &header);
    EXPECT_EQ(header, "omega_r,epsilon,gamma,mean,std,n");
    EXPECT_EQ(rows.size(), 4u);
    EXPECT_TRUE(fs::exists(o.out / "heatmap_rho.json"));
}

TEST(Ltm, TinyRunDeterministicAndReplayable) {
    LtmOptions o;
    o.tau_p = {100};
    o.budget = 1;
    o.n_series = 60;
    o.guesses = 2;
    o.out = fresh_dir("ltm_a");
    std::vector<LtmRow> rows;
    const auto manifest = run_ltm(o, &rows);
    EXPECT_EQ(rows.size(), 3u);
    EXPECT_EQ(read_csv(o.out / "ltm_accuracy.csv").size(), 3u);

    auto again = o;
    again.out = fresh_dir("ltm_b");
    run_ltm(again);
    EXPECT_EQ(read_file(o.out / "ltm_accuracy.csv"), read_file(again.out / "ltm_accuracy.csv"));

    const auto replay_dir = fresh_dir("ltm_replay");
    const auto replayed = replay(o.out / "manifest.json", replay_dir);
    EXPECT_EQ(replayed.outputs, manifest.outputs);
    for (const auto& name : manifest.outputs) {
        if (name == "manifest.json") continue;
        EXPECT_EQ(read_file(o.out / name), read_file(replay_dir / name)) << name;
    }
}

TEST(Replay, HeatmapAndTrajectoryByteIdentical) {
    HeatmapOptions h;
    h.quantity = HeatmapQuantity::MLLE;
    h.n_units = 6;
    h.epsilon_grid = {1e-2};
    h.gamma_grid = {1e-2, 1e-1};
    h.omega_r_values = {1.0};
    h.repetitions = 1;
    h.out = fresh_dir("replay_heat");
    const auto m = run_heatmap(h);
    const auto dir = fresh_dir("replay_heat_2");
    replay(h.out / "manifest.json", dir);
    for (const auto& name : m.outputs)
        if (name != "manifest.json") EXPECT_EQ(read_file(h.out / name), read_file(dir / name)) << name;

    TrajectoryOptions t;
    t.fig1 = true;
    t.steps = 50;
    t.out = fresh_dir("replay_traj");
    const auto mt = run_trajectory(t);
    const auto dir2 = fresh_dir("replay_traj_2");
    replay(t.out / "manifest.json", dir2);
    for (const auto& name : mt.outputs)
        if (name != "manifest.json") EXPECT_EQ(read_file(t.out / name), read_file(dir2 / name)) << name;
}

TEST(Classify, SeparableFixture) {
    const auto dir = fresh_dir("classify");
    const auto d = separable_fixture(1);
    save_dataset(d, dir / "train.tsc");
    const auto before = read_file(dir / "train.tsc");
    ClassifyOptions o;
    o.train = dir / "train.tsc";
    o.test = dir / "train.tsc";
    o.budget = 10;
    o.guesses = 5;
    o.out = dir / "out";
    nlohmann::json report;
    run_classify(o, &report);
    EXPECT_EQ(report.at("mean").get<double>(), 1.0);
    EXPECT_GT(report.at("timing").at("selection_seconds").get<double>(), 0.0);
    EXPECT_GT(report.at("timing").at("evaluation_seconds").get<double>(), 0.0);
    EXPECT_GT(report.at("timing").at("total_seconds").get<double>(), 0.0);
    for (const char* f : {"report.json", "model.json", "search.json", "manifest.json"}) EXPECT_TRUE(fs::exists(o.out / f)) << f;
    EXPECT_EQ(read_file(dir / "train.tsc"), before);

    const auto replay_dir = dir / "replay";
    replay(o.out / "manifest.json", replay_dir);
    EXPECT_EQ(read_file(o.out / "model.json"), read_file(replay_dir / "model.json"));
    EXPECT_EQ(read_file(o.out / "search.json"), read_file(replay_dir / "search.json"));
    auto strip = [](nlohmann::json j) {
        j.erase("timing");
        for (auto& g : j.at("guesses")) g.erase("seconds");
        return j;
    };
    EXPECT_EQ(strip(nlohmann::json::parse(read_file(o.out / "report.json"))),
              strip(nlohmann::json::parse(read_file(replay_dir / "report.json"))));
}

TEST(Classify, InputErrors) {
    const auto dir = fresh_dir("classify_err");
    auto d = separable_fixture(2);
    save_dataset(d, dir / "a.tsc");
    d.n_classes = 3;
    save_dataset(d, dir / "b.tsc");
    ClassifyOptions o;
    o.train = dir / "a.tsc";
    o.test = dir / "b.tsc";
    o.budget = 1;
    o.out = dir / "out";
    EXPECT_THROW(run_classify(o), InputError);
    o.test = dir / "missing.tsc";
    EXPECT_THROW(run_classify(o), InputError);
    EXPECT_FALSE(fs::exists(o.out));

    write_file_atomic(dir / "broken.tsc", "tsc-v1 1 2 2\n1 0\n0.5\n");
    o.test = dir / "broken.tsc";
    try {
        run_classify(o);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Options, JsonRoundTrip) {
    LtmOptions l;
    l.tau_p = {3, 1};
    l.variants = {Variant::RingESN};
    EXPECT_EQ(to_json(ltm_options_from_json(to_json(l))), to_json(l));
    HeatmapOptions h;
    h.quantity = HeatmapQuantity::MLLE;
    EXPECT_EQ(to_json(heatmap_options_from_json(to_json(h))), to_json(h));
    TrajectoryOptions t;
    t.matrix = Matrix(2, 2, {0, 1, -1, 0});
    EXPECT_EQ(to_json(trajectory_options_from_json(to_json(t))), to_json(t));
    ClassifyOptions c;
    c.train = "/x/a.tsc";
    c.test = "/x/b.tsc";
    EXPECT_EQ(to_json(classify_options_from_json(to_json(c))), to_json(c));
}

TEST(Tool, ExitCodes) {
    const auto dir = fresh_dir("tool");
    EXPECT_EQ(run_tool("trajectory --fig1 --steps 10 --out " + (dir / "t").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "t" / "manifest.json"));
    EXPECT_NE(run_tool("classify --train " + (dir / "nope.tsc").string() + " --test " + (dir / "nope.tsc").string() +
                       " --out " + (dir / "c").string()),
              0);
    EXPECT_FALSE(fs::exists(dir / "c"));
    EXPECT_NE(run_tool("heatmap --quantity bogus"), 0);
    EXPECT_NE(run_tool("heatmap --eps-grid 1:2 --out " + (dir / "h").string()), 0);
    EXPECT_EQ(run_tool("heatmap --eps-grid 1e-3:1e-2:2 --gamma-grid 1e-3:1e-3:1 --omega-r 0.1 --reps 1 --units 5 --out " +
                       (dir / "h").string()),
              0);
    EXPECT_NE(run_tool("ltm --tau-p 0 --out " + (dir / "l").string()), 0);
}

}  // namespace
