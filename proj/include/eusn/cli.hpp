#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "eusn/analysis.hpp"
#include "eusn/linalg.hpp"
#include "eusn/reservoir.hpp"

namespace eusn::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Record of one command invocation, written as manifest.json in the output
/// directory. `parameters` is enough to replay the command.
struct RunManifest {
    std::string command;
    nlohmann::json parameters;
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::vector<std::string> outputs;  ///< paths relative to the output directory
    double seconds = 0.0;
};

nlohmann::json to_json(const RunManifest& m);

struct LtmOptions {
    std::vector<std::size_t> tau_p{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    std::size_t budget = 20;
    std::uint64_t seed = 0;
    std::filesystem::path out = "ltm_out";
    std::vector<Variant> variants{Variant::EuSN, Variant::ESN, Variant::RingESN};
    std::size_t n_series = 1000;
    std::size_t guesses = 10;
    std::size_t threads = 0;
};

struct LtmRow {
    Variant variant;
    std::size_t tau_p;
    double mean;
    double std;
};

struct HeatmapOptions {
    HeatmapQuantity quantity = HeatmapQuantity::EffectiveSpectralRadius;
    std::size_t n_units = 100;
    std::vector<double> epsilon_grid = log_grid(1e-10, 1e-1, 10);
    std::vector<double> gamma_grid = log_grid(1e-10, 1e-1, 10);
    std::vector<double> omega_r_values{1e-3, 1e-2, 1e-1, 1.0};
    std::size_t repetitions = 3;
    std::uint64_t seed = 0;
    std::filesystem::path out = "heatmap_out";
    std::size_t threads = 0;
};

struct TrajectoryOptions {
    bool fig1 = false;
    Variant variant = Variant::EuSN;
    std::optional<Matrix> matrix;  ///< explicit W_h; otherwise drawn from `seed`
    std::size_t n_units = 2;
    std::uint64_t seed = 0;
    std::vector<Vector> initial{{0.1, 0.1}, {-0.3, 0.1}, {0.0, -0.5}};
    std::size_t steps = 1000;
    double epsilon = 1e-3;
    double gamma = 1e-3;
    double leak = 1.0;
    double rho = 0.9;
    double omega_r = 1.0;
    std::filesystem::path out = "trajectory_out";
};

struct ClassifyOptions {
    std::filesystem::path train;
    std::filesystem::path test;
    Variant variant = Variant::EuSN;
    std::size_t budget = 50;
    std::uint64_t seed = 0;
    std::filesystem::path out = "classify_out";
    std::size_t guesses = 10;
    std::size_t threads = 0;
};

/// One named 2-D system of the autonomous-dynamics preset.
struct PresetSystem {
    std::string name;
    Reservoir reservoir;
};

/// ESN with and without the echo state property, the ring ESN and the EuSN
/// used for the autonomous-trajectory comparison.
std::vector<PresetSystem> fig1_systems();

/// Names and values of the three preset initial conditions.
std::vector<std::pair<std::string, Vector>> fig1_initial_conditions();

RunManifest run_ltm(const LtmOptions& opts, std::vector<LtmRow>* rows = nullptr);
RunManifest run_heatmap(const HeatmapOptions& opts, HeatmapReport* report = nullptr);
RunManifest run_trajectory(const TrajectoryOptions& opts);
RunManifest run_classify(const ClassifyOptions& opts, nlohmann::json* report = nullptr);

/// Re-run the command recorded in `manifest`, writing into `out`.
RunManifest replay(const std::filesystem::path& manifest, const std::filesystem::path& out);

/// "lo:hi:n" (log spacing), optionally suffixed ":log" or ":lin".
std::vector<double> parse_grid(std::string_view spec);
/// "a,b,c"
std::vector<double> parse_list(std::string_view spec);
/// Rows separated by ';', entries by ','.
Matrix parse_matrix(std::string_view spec);

nlohmann::json to_json(const LtmOptions& o);
nlohmann::json to_json(const HeatmapOptions& o);
nlohmann::json to_json(const TrajectoryOptions& o);
nlohmann::json to_json(const ClassifyOptions& o);
LtmOptions ltm_options_from_json(const nlohmann::json& j);
HeatmapOptions heatmap_options_from_json(const nlohmann::json& j);
TrajectoryOptions trajectory_options_from_json(const nlohmann::json& j);
ClassifyOptions classify_options_from_json(const nlohmann::json& j);

}  // namespace eusn::cli
