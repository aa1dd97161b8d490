#pragma once

// Run configuration: a flat JSON object. Unknown keys are rejected so a typo
// cannot silently change an experiment.
//
// Required: method, layer_sizes, sparsify_kind, regularizer, lambda_i,
// lambda_f, t0, n, epochs, batch_size, learning_rate, seed, dataset,
// coarse_gradient.
// Optional: p, regularize_raw, activation, loss, prox_frequency, standardize.
//
// `sparsify_kind` is one kind for every layer or an array with one per layer.
// `dataset` is one of
//   {"generator": "sparse-teacher", "rows", "in_dim", "relevant_dim", "noise_sigma", ["seed"]}
//   {"generator": "linear-classes", "rows", "in_dim", ["margin"], ["seed"]}
//   {"csv": path, "target": column, ["task"]}

#include "dsparse/data.hpp"
#include "dsparse/model.hpp"
#include "dsparse/train.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace dsparse {

struct DatasetSpec {
    enum class Source { sparse_teacher, linear_classes, csv };

    Source source = Source::sparse_teacher;
    std::uint64_t seed = 0;
    std::size_t rows = 0;
    std::size_t in_dim = 0;
    std::size_t relevant_dim = 0;
    double noise_sigma = 0.0;
    double margin = 0.1;
    std::filesystem::path csv_path;
    std::string target;
    Task task = Task::regression;
};

struct RunConfig {
    ModelSpec model;
    TrainConfig train;
    DatasetSpec dataset;
    bool standardize = false;
    nlohmann::json source; // the document as read, echoed into checkpoints
};

RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; relative csv paths resolve against the
/// file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Builds the dataset, splits it 80/20 with the run seed and optionally
/// standardizes with train-split statistics.
Split prepare_data(const RunConfig& config);

/// The same run with another method; non-embedded methods use raw layers.
RunConfig with_method(const RunConfig& config, Method method);

} // namespace dsparse
