#pragma once

#include "dsparse/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsparse {

enum class Task { regression, classification };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

/// Inputs are rows x features; targets are rows x outputs. Classification
/// targets hold one integer class index per row.
struct Dataset {
    Tensor inputs;
    Tensor targets;
    Task task = Task::regression;
    std::vector<std::string> feature_names;
    std::vector<std::string> target_names;

    std::size_t rows() const { return inputs.rows(); }
    std::size_t features() const { return inputs.cols(); }
    std::size_t outputs() const { return targets.cols(); }

    void validate() const;
    std::vector<std::size_t> labels() const;
    std::size_t num_classes() const;
    Dataset subset(std::span<const std::size_t> rows) const;
};

/// Regression target x[:, :relevant_dim] . v + noise, with |v_j| in [0.5, 2]
/// and random signs; the remaining columns are nuisance inputs.
Dataset gen_sparse_teacher(std::uint64_t seed, std::size_t rows, std::size_t in_dim, std::size_t relevant_dim,
                           double noise_sigma);

/// Two classes split by a random hyperplane through the origin, with points
/// closer than `margin` to the plane rejected.
Dataset gen_linear_classes(std::uint64_t seed, std::size_t rows, std::size_t in_dim, double margin = 0.1);

/// Header row required; every other column becomes a feature in header order.
Dataset load_csv(const std::filesystem::path& path, Task task, std::string_view target_column);
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

struct Split {
    Dataset train;
    Dataset validation;
};

/// Seeded shuffle; the first `validation_fraction` of the permutation becomes
/// the validation set (at least one row each side).
Split split_train_validation(const Dataset& data, std::uint64_t seed, double validation_fraction = 0.2);

/// z-score using statistics of `reference`; constant columns are only centred.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Dataset& reference);
    Dataset apply(const Dataset& data) const;
};

} // namespace dsparse
