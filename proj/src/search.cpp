#include "eusn/search.hpp"

#include <chrono>
#include <cmath>

#include "eusn/errors.hpp"
#include "eusn/model_io.hpp"
#include "eusn/parallel.hpp"

namespace eusn {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string_view to_string(Sampling s) { return s == Sampling::Log ? "log" : "linear"; }

nlohmann::json to_json(const ParamRange& r) {
    return {{"lo", r.lo}, {"hi", r.hi}, {"sampling", to_string(r.law)}};
}

struct Features {
    Matrix train, validation, test;
};

Features compute_features(const Reservoir& r, const DataSplits& splits, bool with_test, std::size_t threads) {
    Features f;
    f.train = final_states(r, splits.train.sequences, threads);
    f.validation = final_states(r, splits.validation.sequences, threads);
    if (with_test) f.test = final_states(r, splits.test.sequences, threads);
    return f;
}

void check_splits(const DataSplits& s, bool need_test) {
    if (s.train.size() == 0) throw InputError("training split is empty");
    if (s.validation.size() == 0) throw InputError("validation split is empty");
    if (need_test && s.test.size() == 0) throw InputError("test split is empty");
    if (s.validation.n_features != s.train.n_features || s.validation.n_classes != s.train.n_classes) {
        throw InputError("validation split disagrees with training split on features or classes");
    }
    if (need_test && (s.test.n_features != s.train.n_features || s.test.n_classes != s.train.n_classes)) {
        throw InputError("test split disagrees with training split on features or classes");
    }
}

}  // namespace

double ParamRange::sample(Rng& rng) const {
    if (lo == hi) {
        rng.next_u64();
        return lo;
    }
    if (law == Sampling::Log) return std::exp(rng.uniform(std::log(lo), std::log(hi)));
    return rng.uniform(lo, hi);
}

void ParamRange::validate(std::string_view name) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw ConfigError("malformed range for " + std::string(name));
    }
    if (law == Sampling::Log && !(lo > 0.0)) {
        throw ConfigError("logarithmic range for " + std::string(name) + " needs lo > 0");
    }
}

SearchSpace SearchSpace::ltm(Variant v) {
    SearchSpace s;
    s.variant = v;
    s.n_inputs = 1;
    s.n_units = {100, 100};
    return s;
}

SearchSpace SearchSpace::classification(Variant v, std::size_t n_inputs) {
    SearchSpace s;
    s.variant = v;
    s.n_inputs = n_inputs;
    s.n_units = {5, 200};
    return s;
}

void SearchSpace::validate() const {
    if (n_inputs < 1) throw ConfigError("n_inputs must be >= 1");
    if (n_units.lo < 1 || n_units.lo > n_units.hi) throw ConfigError("malformed n_units range");
    omega_r.validate("omega_r");
    omega_x.validate("omega_x");
    omega_b.validate("omega_b");
    epsilon.validate("epsilon");
    gamma.validate("gamma");
    rho.validate("rho");
    leak.validate("leak");
    learning_rate.validate("learning_rate");
    train.validate();
}

TrialConfig sample_config(const SearchSpace& space, std::uint64_t trial_seed) {
    space.validate();
    Rng rng(trial_seed);
    TrialConfig t;
    ReservoirConfig& r = t.reservoir;
    r.variant = space.variant;
    r.n_inputs = space.n_inputs;
    // Every parameter is drawn for every variant so the stream layout does
    // not depend on the variant.
    const auto span = static_cast<std::uint64_t>(space.n_units.hi - space.n_units.lo + 1);
    r.n_units = space.n_units.lo + static_cast<std::size_t>(rng.next_u64() % span);
    r.omega_r = space.omega_r.sample(rng);
    r.omega_x = space.omega_x.sample(rng);
    r.omega_b = space.omega_b.sample(rng);
    r.epsilon = space.epsilon.sample(rng);
    r.gamma = space.gamma.sample(rng);
    r.rho_target = space.rho.sample(rng);
    r.leak = space.leak.sample(rng);
    t.train = space.train;
    t.train.learning_rate = space.learning_rate.sample(rng);
    r.seed = rng.next_u64();
    t.train.seed = rng.next_u64();
    return t;
}

TrialResult run_trial(const TrialConfig& cfg, const DataSplits& splits, SpectralScaling scaling,
                      std::size_t threads) {
    TrialResult res;
    res.config = cfg;
    res.seed = cfg.reservoir.seed;
    const auto start = Clock::now();
    try {
        check_splits(splits, false);
        if (cfg.reservoir.n_inputs != splits.train.n_features) {
            throw InputError("reservoir input size does not match dataset features");
        }
        const Reservoir r = make_reservoir(cfg.reservoir, scaling);
        const Features f = compute_features(r, splits, false, threads);
        const TrainResult tr = train_readout(f.train, splits.train.labels, f.validation, splits.validation.labels,
                                             splits.train.n_classes, cfg.train);
        res.val_accuracy = evaluate_accuracy(tr.model, f.validation, splits.validation.labels);
        res.val_loss = mean_loss(tr.model, f.validation, splits.validation.labels);
        res.stopped_epoch = tr.history.stopped_epoch;
        res.best_epoch = tr.history.best_epoch;
        res.ok = std::isfinite(res.val_loss);
        if (!res.ok) res.error = "non-finite validation loss";
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    res.seconds = seconds_since(start);
    return res;
}

SelectionResult select_best(std::span<const TrialConfig> candidates, const DataSplits& splits,
                            SpectralScaling scaling, std::size_t threads) {
    if (candidates.empty()) throw SearchError("no candidate configurations");
    SelectionResult out;
    out.trials.resize(candidates.size());
    parallel_for(
        candidates.size(),
        [&](std::size_t i) {
            out.trials[i] = run_trial(candidates[i], splits, scaling, 1);
            out.trials[i].index = i;
        },
        threads);

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < out.trials.size(); ++i) {
        const auto& t = out.trials[i];
        if (!t.ok) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = out.trials[*best];
        if (t.val_accuracy > b.val_accuracy || (t.val_accuracy == b.val_accuracy && t.val_loss < b.val_loss)) {
            best = i;
        }
    }
    if (!best) {
        throw SearchError("all " + std::to_string(candidates.size()) +
                          " trials failed; first error: " + out.trials.front().error);
    }
    out.best_index = *best;
    out.best = out.trials[*best].config;
    return out;
}

SelectionResult model_select(const SearchSpace& space, std::size_t budget, const DataSplits& splits,
                             std::uint64_t seed, std::size_t threads) {
    if (budget < 1) throw ConfigError("budget must be >= 1");
    space.validate();
    std::vector<TrialConfig> candidates;
    candidates.reserve(budget);
    for (std::size_t i = 0; i < budget; ++i) candidates.push_back(sample_config(space, Rng::derive(seed, i)));
    return select_best(candidates, splits, space.scaling, threads);
}

EvaluationResult final_evaluation(const TrialConfig& cfg, const DataSplits& splits, std::size_t n_guesses,
                                  std::uint64_t seed, bool force_same_seed, SpectralScaling scaling,
                                  std::size_t threads) {
    if (n_guesses < 1) throw ConfigError("n_guesses must be >= 1");
    check_splits(splits, true);
    EvaluationResult out;
    out.guesses.resize(n_guesses);
    std::vector<std::optional<std::pair<Reservoir, ReadoutModel>>> models(n_guesses);

    parallel_for(
        n_guesses,
        [&](std::size_t g) {
            const std::size_t stream = force_same_seed ? 0 : g;
            GuessResult& res = out.guesses[g];
            res.reservoir_seed = Rng::derive(seed, 2 * stream);
            res.train_seed = Rng::derive(seed, 2 * stream + 1);
            const auto start = Clock::now();
            try {
                ReservoirConfig rc = cfg.reservoir;
                rc.seed = res.reservoir_seed;
                TrainConfig tc = cfg.train;
                tc.seed = res.train_seed;
                const Reservoir r = make_reservoir(rc, scaling);
                const Features f = compute_features(r, splits, true, 1);
                TrainResult tr = train_readout(f.train, splits.train.labels, f.validation,
                                               splits.validation.labels, splits.train.n_classes, tc);
                res.test_accuracy = evaluate_accuracy(tr.model, f.test, splits.test.labels);
                res.stopped_epoch = tr.history.stopped_epoch;
                res.ok = true;
                models[g].emplace(r, std::move(tr.model));
            } catch (const std::exception& e) {
                res.ok = false;
                res.error = e.what();
            }
            res.seconds = seconds_since(start);
        },
        threads);

    std::vector<double> accs;
    for (std::size_t g = 0; g < n_guesses; ++g) {
        const auto& res = out.guesses[g];
        if (res.ok) {
            accs.push_back(res.test_accuracy);
            if (!out.reservoir && models[g]) {
                out.reservoir = models[g]->first;
                out.readout = models[g]->second;
            }
        } else {
            out.warnings.push_back("guess " + std::to_string(g) + " failed: " + res.error);
        }
    }
    const Summary s = summarize(accs);
    out.mean = s.mean;
    out.std = s.std;
    out.n_ok = s.n;
    if (out.n_ok == 0) {
        out.mean = std::nan("");
        out.warnings.push_back("no guess succeeded");
    } else if (out.n_ok == 1) {
        out.warnings.push_back("single successful guess: std reported as 0");
    }
    return out;
}

nlohmann::json to_json(const SearchSpace& s) {
    return {
        {"variant", std::string(to_string(s.variant))},
        {"n_inputs", s.n_inputs},
        {"n_units", {{"lo", s.n_units.lo}, {"hi", s.n_units.hi}}},
        {"omega_r", to_json(s.omega_r)},
        {"omega_x", to_json(s.omega_x)},
        {"omega_b", to_json(s.omega_b)},
        {"epsilon", to_json(s.epsilon)},
        {"gamma", to_json(s.gamma)},
        {"rho", to_json(s.rho)},
        {"leak", to_json(s.leak)},
        {"learning_rate", to_json(s.learning_rate)},
        {"train", to_json(s.train)},
        {"scaling", s.scaling == SpectralScaling::ExactEigen ? "exact" : "circular"},
    };
}

nlohmann::json to_json(const TrialConfig& cfg) {
    return {{"reservoir", to_json(cfg.reservoir)}, {"train", to_json(cfg.train)}};
}

nlohmann::json to_json(const TrialResult& r) {
    nlohmann::json j{{"index", r.index},       {"ok", r.ok},
                     {"config", to_json(r.config)}, {"val_accuracy", r.val_accuracy},
                     {"stopped_epoch", r.stopped_epoch}, {"best_epoch", r.best_epoch},
                     {"seconds", r.seconds},   {"seed", r.seed}};
    j["val_loss"] = std::isfinite(r.val_loss) ? nlohmann::json(r.val_loss) : nlohmann::json(nullptr);
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

nlohmann::json to_json(const EvaluationResult& r) {
    nlohmann::json guesses = nlohmann::json::array();
    for (const auto& g : r.guesses) {
        nlohmann::json j{{"reservoir_seed", g.reservoir_seed}, {"train_seed", g.train_seed}, {"ok", g.ok},
                         {"test_accuracy", g.test_accuracy},   {"stopped_epoch", g.stopped_epoch},
                         {"seconds", g.seconds}};
        if (!g.error.empty()) j["error"] = g.error;
        guesses.push_back(std::move(j));
    }
    nlohmann::json j{{"std", r.std}, {"n_ok", r.n_ok}, {"guesses", std::move(guesses)}, {"warnings", r.warnings}};
    j["mean"] = std::isfinite(r.mean) ? nlohmann::json(r.mean) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json search_report(const SearchSpace& space, const SelectionResult& result, std::uint64_t seed,
                             std::size_t budget) {
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : result.trials) trials.push_back(to_json(t));
    return {
        {"space", to_json(space)},
        {"trials", std::move(trials)},
        {"selected", {{"index", result.best_index}, {"config", to_json(result.best)}}},
        {"provenance", {{"master_seed", seed}, {"budget", budget}, {"method", "random-search"}}},
    };
}

}  // namespace eusn
