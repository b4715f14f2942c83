#include "eusn/model_io.hpp"

#include "eusn/errors.hpp"
#include "eusn/io.hpp"

namespace eusn {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(1, std::string("missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(1, std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = get<std::size_t>(j, "rows");
    const auto cols = get<std::size_t>(j, "cols");
    auto data = get<std::vector<double>>(j, "data");
    if (data.size() != rows * cols) throw ParseError(1, "matrix data length does not match its shape");
    return Matrix(rows, cols, std::move(data));
}

json to_json(const ReservoirConfig& c) {
    return {
        {"variant", std::string(to_string(c.variant))},
        {"n_units", c.n_units},
        {"n_inputs", c.n_inputs},
        {"omega_r", c.omega_r},
        {"omega_x", c.omega_x},
        {"omega_b", c.omega_b},
        {"epsilon", c.epsilon},
        {"gamma", c.gamma},
        {"leak", c.leak},
        {"rho_target", c.rho_target},
        {"seed", c.seed},
    };
}

ReservoirConfig reservoir_config_from_json(const json& j) {
    ReservoirConfig c;
    c.variant = parse_variant(get<std::string>(j, "variant"));
    c.n_units = get<std::size_t>(j, "n_units");
    c.n_inputs = get<std::size_t>(j, "n_inputs");
    c.omega_r = get<double>(j, "omega_r");
    c.omega_x = get<double>(j, "omega_x");
    c.omega_b = get<double>(j, "omega_b");
    c.epsilon = get<double>(j, "epsilon");
    c.gamma = get<double>(j, "gamma");
    c.leak = get<double>(j, "leak");
    c.rho_target = get<double>(j, "rho_target");
    c.seed = get<std::uint64_t>(j, "seed");
    return c;
}

json to_json(const TrainConfig& c) {
    return {
        {"learning_rate", c.learning_rate},
        {"max_epochs", c.max_epochs},
        {"patience", c.patience},
        {"batch_size", c.batch_size},
        {"rmsprop_decay", c.rmsprop_decay},
        {"rmsprop_epsilon", c.rmsprop_epsilon},
        {"seed", c.seed},
    };
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    c.learning_rate = get<double>(j, "learning_rate");
    c.max_epochs = get<std::size_t>(j, "max_epochs");
    c.patience = get<std::size_t>(j, "patience");
    c.batch_size = get<std::size_t>(j, "batch_size");
    c.rmsprop_decay = get<double>(j, "rmsprop_decay");
    c.rmsprop_epsilon = get<double>(j, "rmsprop_epsilon");
    c.seed = get<std::uint64_t>(j, "seed");
    return c;
}

json to_json(const Reservoir& r) {
    return {
        {"variant", std::string(to_string(r.variant()))},
        {"config", to_json(r.config())},
        {"w_h", to_json(r.w_h())},
        {"w_x", to_json(r.w_x())},
        {"bias", r.bias()},
    };
}

Reservoir reservoir_from_json(const json& j) {
    ReservoirConfig cfg = reservoir_config_from_json(field(j, "config"));
    if (parse_variant(get<std::string>(j, "variant")) != cfg.variant) {
        throw ParseError(1, "reservoir variant disagrees with its config");
    }
    try {
        return Reservoir(cfg, matrix_from_json(field(j, "w_h")), matrix_from_json(field(j, "w_x")),
                         get<std::vector<double>>(j, "bias"));
    } catch (const ShapeError& e) {
        throw ParseError(1, e.what());
    }
}

json to_json(const ReadoutModel& m) {
    return {
        {"activation", m.activation == Activation::Sigmoid ? "sigmoid" : "softmax"},
        {"weights", to_json(m.weights)},
        {"bias", m.bias},
    };
}

ReadoutModel readout_from_json(const json& j) {
    ReadoutModel m;
    const auto act = get<std::string>(j, "activation");
    if (act == "sigmoid") {
        m.activation = Activation::Sigmoid;
    } else if (act == "softmax") {
        m.activation = Activation::Softmax;
    } else {
        throw ParseError(1, "unknown activation '" + act + "'");
    }
    m.weights = matrix_from_json(field(j, "weights"));
    m.bias = get<std::vector<double>>(j, "bias");
    try {
        m.validate();
    } catch (const ConfigError& e) {
        throw ParseError(1, e.what());
    }
    return m;
}

json model_to_json(const Reservoir& r, const ReadoutModel* readout) {
    json j{{"format", kModelFormat}, {"version", kModelFormatVersion}, {"reservoir", to_json(r)}};
    if (readout) j["readout"] = to_json(*readout);
    return j;
}

ModelBundle model_from_json(const json& j) {
    if (get<std::string>(j, "format") != kModelFormat) throw ParseError(1, "not an eusn model file");
    const int version = get<int>(j, "version");
    if (version != kModelFormatVersion) {
        throw ParseError(1, "unsupported model format version " + std::to_string(version));
    }
    ModelBundle b{reservoir_from_json(field(j, "reservoir")), std::nullopt};
    if (j.contains("readout")) b.readout = readout_from_json(j.at("readout"));
    return b;
}

void save_model(const std::filesystem::path& path, const Reservoir& r, const ReadoutModel* readout) {
    write_file_atomic(path, model_to_json(r, readout).dump(1) + "\n");
}

ModelBundle load_model(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(1, e.what());
    }
    return model_from_json(j);
}

}  // namespace eusn
