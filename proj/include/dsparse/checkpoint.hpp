#pragma once

// Checkpoints are JSON documents. Every float is stored as a hexadecimal
// literal such as "0x1.999999999999ap-4" so that loading reproduces it
// bitwise, signed zeros included.

#include "dsparse/model.hpp"
#include "dsparse/schedule.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace dsparse {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    nlohmann::json config; // echo of the run configuration
    std::string method;
    long epoch = 0;
    std::string rng_state;
    LambdaSchedule schedule;
    double lambda = 0.0; // lambda of the last completed epoch
    Mlp model;
};

std::string encode_hex(double value);
/// Throws std::invalid_argument on anything but a finite hex literal.
double decode_hex(std::string_view text);

nlohmann::json to_json(const Checkpoint& checkpoint);
/// Throws VersionError when format_version differs, std::runtime_error on a
/// malformed document.
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace dsparse
