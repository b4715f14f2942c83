#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "eusn/readout.hpp"
#include "eusn/reservoir.hpp"
#include "eusn/rng.hpp"
#include "eusn/tasks.hpp"

namespace eusn {

enum class Sampling { Linear, Log };

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
    Sampling law = Sampling::Linear;

    /// One draw: uniform(lo, hi) or exp(uniform(ln lo, ln hi)). Returns lo
    /// exactly when lo == hi. Always consumes one generator value.
    double sample(Rng& rng) const;
    void validate(std::string_view name) const;
};

struct UnitRange {
    std::size_t lo = 100;
    std::size_t hi = 100;
};

/// Hyperparameter ranges for one reservoir variant.
struct SearchSpace {
    Variant variant = Variant::EuSN;
    std::size_t n_inputs = 1;
    UnitRange n_units{100, 100};
    ParamRange omega_r{0.01, 1.5, Sampling::Linear};
    ParamRange omega_x{0.01, 1.5, Sampling::Linear};
    ParamRange omega_b{0.01, 1.5, Sampling::Linear};
    ParamRange epsilon{1e-5, 1e-1, Sampling::Log};
    ParamRange gamma{1e-5, 1e-1, Sampling::Log};
    ParamRange rho{0.01, 1.5, Sampling::Linear};
    ParamRange leak{0.01, 1.0, Sampling::Linear};
    ParamRange learning_rate{1e-5, 1e-1, Sampling::Log};
    TrainConfig train;  ///< fixed training settings; learning_rate and seed are sampled
    SpectralScaling scaling = SpectralScaling::ExactEigen;

    /// Long-term memorization settings: N fixed at 100.
    static SearchSpace ltm(Variant v);
    /// General classification settings: N searched over [5, 200].
    static SearchSpace classification(Variant v, std::size_t n_inputs);

    void validate() const;
};

struct TrialConfig {
    ReservoirConfig reservoir;
    TrainConfig train;

    bool operator==(const TrialConfig&) const = default;
};

/// Deterministic in (space, trial_seed).
TrialConfig sample_config(const SearchSpace& space, std::uint64_t trial_seed);

struct DataSplits {
    Dataset train;
    Dataset validation;
    Dataset test;  ///< may be empty during selection
};

struct TrialResult {
    std::size_t index = 0;
    TrialConfig config;
    bool ok = false;
    std::string error;
    double val_accuracy = 0.0;
    double val_loss = 0.0;
    std::size_t stopped_epoch = 0;
    std::size_t best_epoch = 0;
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

/// Build the reservoir, collect final states, train the readout with early
/// stopping, and report the best-epoch validation accuracy. Failures are
/// recorded in the result instead of thrown.
TrialResult run_trial(const TrialConfig& cfg, const DataSplits& splits,
                      SpectralScaling scaling = SpectralScaling::ExactEigen, std::size_t threads = 1);

struct SelectionResult {
    std::size_t best_index = 0;
    TrialConfig best;
    std::vector<TrialResult> trials;  ///< by trial index
};

/// Highest validation accuracy, then lower validation loss, then lower index.
/// Throws SearchError if every trial failed.
SelectionResult select_best(std::span<const TrialConfig> candidates, const DataSplits& splits,
                            SpectralScaling scaling = SpectralScaling::ExactEigen, std::size_t threads = 0);

/// Budgeted random search: `budget` configurations sampled with
/// Rng::derive(seed, i), then select_best.
SelectionResult model_select(const SearchSpace& space, std::size_t budget, const DataSplits& splits,
                             std::uint64_t seed, std::size_t threads = 0);

struct GuessResult {
    std::uint64_t reservoir_seed = 0;
    std::uint64_t train_seed = 0;
    bool ok = false;
    std::string error;
    double test_accuracy = 0.0;
    std::size_t stopped_epoch = 0;
    double seconds = 0.0;
};

struct EvaluationResult {
    double mean = 0.0;
    double std = 0.0;  ///< sample std over successful guesses; 0 when fewer than two
    std::size_t n_ok = 0;
    std::vector<GuessResult> guesses;
    std::vector<std::string> warnings;  ///< single guess, failed guesses
    std::optional<Reservoir> reservoir;  ///< first successful guess
    std::optional<ReadoutModel> readout;
};

/// Re-instantiate `cfg` with fresh seeds n_guesses times (the same seed for
/// all when force_same_seed), train on splits.train with early stopping on
/// splits.validation, and score on splits.test.
EvaluationResult final_evaluation(const TrialConfig& cfg, const DataSplits& splits, std::size_t n_guesses,
                                  std::uint64_t seed, bool force_same_seed = false,
                                  SpectralScaling scaling = SpectralScaling::ExactEigen,
                                  std::size_t threads = 0);

nlohmann::json to_json(const SearchSpace& space);
nlohmann::json to_json(const TrialConfig& cfg);
nlohmann::json to_json(const TrialResult& r);
nlohmann::json to_json(const EvaluationResult& r);

/// Space, per-trial records, selection and provenance (seed, budget).
nlohmann::json search_report(const SearchSpace& space, const SelectionResult& result, std::uint64_t seed,
                             std::size_t budget);

}  // namespace eusn
