#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"

#include "eusn/readout.hpp"
#include "eusn/reservoir.hpp"

namespace eusn {

/// Container tag and version written into every model file.
inline constexpr const char* kModelFormat = "eusn-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReservoirConfig& c);
ReservoirConfig reservoir_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Reservoir& r);
Reservoir reservoir_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReadoutModel& m);
ReadoutModel readout_from_json(const nlohmann::json& j);

struct ModelBundle {
    Reservoir reservoir;
    std::optional<ReadoutModel> readout;
};

/// JSON container {format, version, reservoir, readout?}. Doubles are
/// written in shortest round-trip form, so load(save(x)) is bit-exact.
nlohmann::json model_to_json(const Reservoir& r, const ReadoutModel* readout = nullptr);
ModelBundle model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const Reservoir& r, const ReadoutModel* readout = nullptr);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace eusn
