#include "eusn/cli.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "eusn/errors.hpp"
#include "eusn/io.hpp"
#include "eusn/model_io.hpp"
#include "eusn/rng.hpp"
#include "eusn/search.hpp"
#include "eusn/tasks.hpp"

namespace eusn::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects outputs and writes each one atomically under the output directory.
class OutputSet {
public:
    explicit OutputSet(fs::path root) : root_(std::move(root)) {}

    void write(const std::string& name, std::string_view content) {
        write_file_atomic(root_ / name, content);
        names_.push_back(name);
    }

    RunManifest finish(std::string command, json parameters, std::uint64_t seed, Clock::time_point start) {
        RunManifest m;
        m.command = std::move(command);
        m.parameters = std::move(parameters);
        m.seed = seed;
        m.outputs = names_;
        m.outputs.push_back("manifest.json");
        m.seconds = seconds_since(start);
        write_file_atomic(root_ / "manifest.json", to_json(m).dump(2) + "\n");
        return m;
    }

private:
    fs::path root_;
    std::vector<std::string> names_;
};

std::string slug(double v) {
    std::string s = format_double(v);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

std::vector<std::string> variant_names(const std::vector<Variant>& vs) {
    std::vector<std::string> out;
    for (Variant v : vs) out.emplace_back(to_string(v));
    return out;
}

std::vector<Variant> variants_from(const json& j) {
    std::vector<Variant> out;
    for (const auto& s : j) out.push_back(parse_variant(s.get<std::string>()));
    return out;
}

// Wall-clock fields, removed from data files so reruns compare byte-for-byte.
json without_timing(json j) {
    if (j.is_object()) {
        j.erase("seconds");
        for (auto& [key, value] : j.items()) value = without_timing(std::move(value));
    } else if (j.is_array()) {
        for (auto& value : j) value = without_timing(std::move(value));
    }
    return j;
}

Reservoir preset(Variant variant, Matrix w_h, double epsilon, double gamma) {
    ReservoirConfig cfg;
    cfg.variant = variant;
    cfg.n_units = w_h.rows();
    cfg.n_inputs = 1;
    cfg.omega_r = 0.0;
    cfg.omega_x = 0.0;
    cfg.omega_b = 0.0;
    cfg.epsilon = epsilon;
    cfg.gamma = gamma;
    cfg.leak = 1.0;
    cfg.rho_target = variant == Variant::EuSN ? 1.0 : spectral_radius(w_h);
    const std::size_t n = w_h.rows();
    return Reservoir(cfg, std::move(w_h), Matrix(n, 1), Vector(n, 0.0));
}

}  // namespace

json to_json(const RunManifest& m) {
    return {{"command", m.command}, {"parameters", m.parameters}, {"seed", m.seed},
            {"version", m.version}, {"outputs", m.outputs},       {"seconds", m.seconds}};
}

std::vector<PresetSystem> fig1_systems() {
    std::vector<PresetSystem> out;
    out.push_back({"esn_esp", preset(Variant::ESN, Matrix(2, 2, {0.7, 0.1, -0.1, 0.7}), 1e-3, 1e-3)});
    out.push_back({"esn_no_esp", preset(Variant::ESN, Matrix(2, 2, {1.7, 0.1, -0.1, 1.7}), 1e-3, 1e-3)});
    out.push_back({"ring_esn", preset(Variant::RingESN, Matrix(2, 2, {0.0, 1.0, 1.0, 0.0}), 1e-3, 1e-3)});
    out.push_back({"eusn", preset(Variant::EuSN, Matrix(2, 2, {0.0, 1.5, -1.5, 0.0}), 1e-3, 1e-3)});
    return out;
}

std::vector<std::pair<std::string, Vector>> fig1_initial_conditions() {
    return {{"u0", {0.1, 0.1}}, {"v0", {-0.3, 0.1}}, {"z0", {0.0, -0.5}}};
}

std::vector<double> parse_list(std::string_view spec) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t comma = spec.find(',', start);
        const auto tok = spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start);
        const auto v = parse_double(tok);
        if (!v) throw ConfigError("invalid number '" + std::string(tok) + "' in list '" + std::string(spec) + "'");
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon == std::string_view::npos ? spec.npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw ConfigError("grid must look like lo:hi:n[:log|lin], got '" + std::string(spec) + "'");
    }
    const auto lo = parse_double(parts[0]);
    const auto hi = parse_double(parts[1]);
    const auto n = parse_double(parts[2]);
    if (!lo || !hi || !n || *n < 1 || std::floor(*n) != *n) {
        throw ConfigError("malformed grid '" + std::string(spec) + "'");
    }
    const auto count = static_cast<std::size_t>(*n);
    const std::string_view law = parts.size() == 4 ? parts[3] : "log";
    if (law == "log") return log_grid(*lo, *hi, count);
    if (law != "lin") throw ConfigError("grid spacing must be 'log' or 'lin'");
    if (!(*lo > 0.0)) throw ConfigError("grid values must be positive");
    std::vector<double> g(count, *lo);
    for (std::size_t i = 1; i < count; ++i) {
        g[i] = *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return g;
}

Matrix parse_matrix(std::string_view spec) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    for (;;) {
        const std::size_t semi = spec.find(';', start);
        rows.push_back(parse_list(spec.substr(start, semi == std::string_view::npos ? spec.npos : semi - start)));
        if (semi == std::string_view::npos) break;
        start = semi + 1;
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    for (const auto& r : rows) {
        if (r.size() != cols) throw ShapeError("matrix rows have different lengths");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(data));
}

// ---------------------------------------------------------------------------
// Option (de)serialization for manifests.

json to_json(const LtmOptions& o) {
    return {{"tau_p", o.tau_p},   {"budget", o.budget},   {"seed", o.seed},
            {"variants", variant_names(o.variants)}, {"n_series", o.n_series}, {"guesses", o.guesses}};
}

LtmOptions ltm_options_from_json(const json& j) {
    LtmOptions o;
    o.tau_p = j.at("tau_p").get<std::vector<std::size_t>>();
    o.budget = j.at("budget").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.variants = variants_from(j.at("variants"));
    o.n_series = j.at("n_series").get<std::size_t>();
    o.guesses = j.at("guesses").get<std::size_t>();
    return o;
}

json to_json(const HeatmapOptions& o) {
    return {{"quantity", to_string(o.quantity)}, {"n_units", o.n_units},         {"epsilon_grid", o.epsilon_grid},
            {"gamma_grid", o.gamma_grid},       {"omega_r", o.omega_r_values}, {"repetitions", o.repetitions},
            {"seed", o.seed}};
}

HeatmapOptions heatmap_options_from_json(const json& j) {
    HeatmapOptions o;
    o.quantity = j.at("quantity").get<std::string>() == "mlle" ? HeatmapQuantity::MLLE
                                                                : HeatmapQuantity::EffectiveSpectralRadius;
    o.n_units = j.at("n_units").get<std::size_t>();
    o.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
    o.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    o.omega_r_values = j.at("omega_r").get<std::vector<double>>();
    o.repetitions = j.at("repetitions").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
}

json to_json(const TrajectoryOptions& o) {
    json j{{"fig1", o.fig1},       {"variant", std::string(to_string(o.variant))},
           {"n_units", o.n_units}, {"seed", o.seed},
           {"initial", o.initial}, {"steps", o.steps},
           {"epsilon", o.epsilon}, {"gamma", o.gamma},
           {"leak", o.leak},       {"rho", o.rho},
           {"omega_r", o.omega_r}};
    if (o.matrix) j["matrix"] = eusn::to_json(*o.matrix);
    return j;
}

TrajectoryOptions trajectory_options_from_json(const json& j) {
    TrajectoryOptions o;
    o.fig1 = j.at("fig1").get<bool>();
    o.variant = parse_variant(j.at("variant").get<std::string>());
    o.n_units = j.at("n_units").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.initial = j.at("initial").get<std::vector<Vector>>();
    o.steps = j.at("steps").get<std::size_t>();
    o.epsilon = j.at("epsilon").get<double>();
    o.gamma = j.at("gamma").get<double>();
    o.leak = j.at("leak").get<double>();
    o.rho = j.at("rho").get<double>();
    o.omega_r = j.at("omega_r").get<double>();
    if (j.contains("matrix")) o.matrix = matrix_from_json(j.at("matrix"));
    return o;
}

json to_json(const ClassifyOptions& o) {
    return {{"train", fs::absolute(o.train).string()}, {"test", fs::absolute(o.test).string()},
            {"variant", std::string(to_string(o.variant))}, {"budget", o.budget},
            {"seed", o.seed}, {"guesses", o.guesses}};
}

ClassifyOptions classify_options_from_json(const json& j) {
    ClassifyOptions o;
    o.train = j.at("train").get<std::string>();
    o.test = j.at("test").get<std::string>();
    o.variant = parse_variant(j.at("variant").get<std::string>());
    o.budget = j.at("budget").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.guesses = j.at("guesses").get<std::size_t>();
    return o;
}

// ---------------------------------------------------------------------------
// Commands.

RunManifest run_ltm(const LtmOptions& opts, std::vector<LtmRow>* rows_out) {
    const auto start = Clock::now();
    if (opts.tau_p.empty()) throw ConfigError("at least one tau_p value is required");
    for (auto t : opts.tau_p)
        if (t < 1) throw ConfigError("tau_p values must be >= 1");
    if (opts.variants.empty()) throw ConfigError("at least one variant is required");

    OutputSet outputs(opts.out);
    std::map<Variant, std::vector<CurvePoint>> curves;
    const double halves[] = {0.5, 0.5};

    for (std::size_t ti = 0; ti < opts.tau_p.size(); ++ti) {
        const std::size_t tau = opts.tau_p[ti];
        const std::uint64_t tau_seed = Rng::derive(opts.seed, tau);
        const Dataset data = generate_ltm_dataset(tau, opts.n_series, Rng::derive(tau_seed, 0));
        const SplitSpec outer = split_stratified(data, halves, Rng::derive(tau_seed, 1));
        const Dataset pool = subset(data, outer.parts[0]);
        const SplitSpec inner = split_stratified(pool, halves, Rng::derive(tau_seed, 2));
        DataSplits splits{subset(pool, inner.parts[0]), subset(pool, inner.parts[1]), subset(data, outer.parts[1])};

        for (Variant v : opts.variants) {
            const std::uint64_t vseed = Rng::derive(tau_seed, 10 + static_cast<std::uint64_t>(v));
            const SearchSpace space = SearchSpace::ltm(v);
            const SelectionResult sel = model_select(space, opts.budget, splits, Rng::derive(vseed, 0), opts.threads);
            const EvaluationResult eval = final_evaluation(sel.best, splits, opts.guesses, Rng::derive(vseed, 1),
                                                           false, space.scaling, opts.threads);
            std::vector<double> accs;
            for (const auto& g : eval.guesses)
                if (g.ok) accs.push_back(g.test_accuracy);
            curves[v].push_back(aggregate_guesses(tau, accs));

            json report = search_report(space, sel, Rng::derive(vseed, 0), opts.budget);
            report["evaluation"] = to_json(eval);
            report["tau_p"] = tau;
            outputs.write("search_" + std::string(to_string(v)) + "_tau" + std::to_string(tau) + ".json",
                          without_timing(std::move(report)).dump(2) + "\n");
        }
    }

    std::ostringstream csv;
    csv << "model,tau_p,mean,std\n";
    for (Variant v : opts.variants) {
        for (const auto& p : accuracy_curve(curves[v])) {
            csv << to_string(v) << ',' << p.tau_p << ',' << format_double(p.mean) << ',' << format_double(p.std)
                << '\n';
            if (rows_out) rows_out->push_back({v, p.tau_p, p.mean, p.std});
        }
    }
    outputs.write("ltm_accuracy.csv", csv.str());
    return outputs.finish("ltm", to_json(opts), opts.seed, start);
}

RunManifest run_heatmap(const HeatmapOptions& opts, HeatmapReport* report_out) {
    const auto start = Clock::now();
    HeatmapSpec spec;
    spec.quantity = opts.quantity;
    spec.n_units = opts.n_units;
    spec.epsilon_grid = opts.epsilon_grid;
    spec.gamma_grid = opts.gamma_grid;
    spec.omega_r_values = opts.omega_r_values;
    spec.repetitions = opts.repetitions;
    spec.seed = opts.seed;
    spec.threads = opts.threads;
    const HeatmapReport report = heatmap_sweep(spec);

    OutputSet outputs(opts.out);
    const std::string q = to_string(opts.quantity);
    for (std::size_t oi = 0; oi < report.omega_r_values.size(); ++oi) {
        std::ostringstream csv;
        write_heatmap_csv(report, csv, static_cast<long>(oi));
        outputs.write("heatmap_" + q + "_omega_r_" + slug(report.omega_r_values[oi]) + ".csv", csv.str());
    }
    outputs.write("heatmap_" + q + ".json", heatmap_to_json(report).dump(2) + "\n");
    if (report_out) *report_out = report;
    return outputs.finish("heatmap", to_json(opts), opts.seed, start);
}

RunManifest run_trajectory(const TrajectoryOptions& opts) {
    const auto start = Clock::now();
    if (opts.steps < 1) throw ConfigError("steps must be >= 1");

    std::vector<PresetSystem> systems;
    std::vector<std::pair<std::string, Vector>> starts;
    if (opts.fig1) {
        systems = fig1_systems();
        starts = fig1_initial_conditions();
    } else {
        ReservoirConfig cfg;
        cfg.variant = opts.variant;
        cfg.n_inputs = 1;
        cfg.omega_r = opts.omega_r;
        cfg.epsilon = opts.epsilon;
        cfg.gamma = opts.gamma;
        cfg.leak = opts.leak;
        cfg.rho_target = opts.rho;
        cfg.seed = opts.seed;
        if (opts.matrix) {
            if (opts.matrix->rows() != opts.matrix->cols()) throw ShapeError("recurrent matrix must be square");
            cfg.n_units = opts.matrix->rows();
            systems.push_back({std::string(to_string(opts.variant)),
                               Reservoir(cfg, *opts.matrix, Matrix(cfg.n_units, 1), Vector(cfg.n_units, 0.0))});
        } else {
            cfg.n_units = opts.n_units;
            systems.push_back({std::string(to_string(opts.variant)), make_reservoir(cfg)});
        }
        for (std::size_t i = 0; i < opts.initial.size(); ++i) starts.emplace_back("h" + std::to_string(i), opts.initial[i]);
    }
    if (starts.empty()) throw ConfigError("at least one initial condition is required");
    for (const auto& sys : systems)
        for (const auto& [name, h0] : starts)
            if (h0.size() != sys.reservoir.n_units()) {
                throw ShapeError("initial condition " + name + " has length " + std::to_string(h0.size()) +
                                 ", reservoir has " + std::to_string(sys.reservoir.n_units()) + " units");
            }

    OutputSet outputs(opts.out);
    for (const auto& sys : systems) {
        for (const auto& [name, h0] : starts) {
            std::ostringstream csv;
            write_trajectory_csv(autonomous_trajectory(sys.reservoir, h0, opts.steps), csv);
            outputs.write("trajectory_" + sys.name + "_" + name + ".csv", csv.str());
        }
    }
    return outputs.finish("trajectory", to_json(opts), opts.seed, start);
}

RunManifest run_classify(const ClassifyOptions& opts, json* report_out) {
    const auto start = Clock::now();
    // Everything is loaded and checked before the output directory is touched.
    const Dataset train_file = load_dataset(opts.train);
    const Dataset test_file = load_dataset(opts.test);
    if (train_file.n_features != test_file.n_features) {
        throw InputError("train and test files have different feature counts");
    }
    if (train_file.n_classes != test_file.n_classes) {
        throw InputError("train and test files have different class counts");
    }

    const double fractions[] = {2.0 / 3.0, 1.0 / 3.0};
    const SplitSpec split = split_stratified(train_file, fractions, Rng::derive(opts.seed, 0));
    DataSplits splits{subset(train_file, split.parts[0]), subset(train_file, split.parts[1]), test_file};

    const SearchSpace space = SearchSpace::classification(opts.variant, train_file.n_features);
    const auto t_select = Clock::now();
    const SelectionResult sel = model_select(space, opts.budget, splits, Rng::derive(opts.seed, 1), opts.threads);
    const double select_seconds = seconds_since(t_select);
    const auto t_eval = Clock::now();
    const EvaluationResult eval =
        final_evaluation(sel.best, splits, opts.guesses, Rng::derive(opts.seed, 2), false, space.scaling, opts.threads);
    const double eval_seconds = seconds_since(t_eval);
    if (eval.n_ok == 0) throw SearchError("final evaluation failed for every guess");

    json report = to_json(eval);
    report["variant"] = std::string(to_string(opts.variant));
    report["selected"] = to_json(sel.best);
    report["timing"] = {{"selection_seconds", select_seconds},
                        {"evaluation_seconds", eval_seconds},
                        {"total_seconds", seconds_since(start)}};

    OutputSet outputs(opts.out);
    outputs.write("search.json",
                  without_timing(search_report(space, sel, Rng::derive(opts.seed, 1), opts.budget)).dump(2) + "\n");
    outputs.write("report.json", report.dump(2) + "\n");
    outputs.write("model.json", model_to_json(*eval.reservoir, &*eval.readout).dump(1) + "\n");
    if (report_out) *report_out = report;
    return outputs.finish("classify", to_json(opts), opts.seed, start);
}

RunManifest replay(const fs::path& manifest, const fs::path& out) {
    json m;
    try {
        m = json::parse(read_file(manifest));
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.what());
    }
    const auto command = m.at("command").get<std::string>();
    const auto& params = m.at("parameters");
    if (command == "ltm") {
        auto o = ltm_options_from_json(params);
        o.out = out;
        return run_ltm(o);
    }
    if (command == "heatmap") {
        auto o = heatmap_options_from_json(params);
        o.out = out;
        return run_heatmap(o);
    }
    if (command == "trajectory") {
        auto o = trajectory_options_from_json(params);
        o.out = out;
        return run_trajectory(o);
    }
    if (command == "classify") {
        auto o = classify_options_from_json(params);
        o.out = out;
        return run_classify(o);
    }
    throw InputError("unknown command in manifest: " + command);
}

}  // namespace eusn::cli
