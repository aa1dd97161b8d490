#pragma once

// Command implementations behind the dsparse executable. Each returns the
// process exit code: 0 success, 1 runtime failure, 2 invalid config,
// 3 checkpoint version mismatch.
//
// Progress is logged to `err` according to DSPARSE_LOG (error, warn, info,
// debug; default warn).

#include "dsparse/checkpoint.hpp"
#include "dsparse/config.hpp"
#include "dsparse/gradcheck.hpp"
#include "dsparse/train.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace dsparse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVersion = 3;

inline constexpr const char* kMetricsHeader = "epoch,train_loss,val_loss,lambda,zero_fraction,zero_group_fraction";

enum class LogLevel { error, warn, info, debug };
LogLevel log_level_from_env();

struct RunOutput {
    RunConfig config;
    TrainResult result;
};

/// Trains one configured run.
RunOutput run_config(const RunConfig& config, LogLevel level, std::ostream& log);

Checkpoint make_checkpoint(const RunOutput& run);
std::string metrics_row(const EpochMetrics& m);
void write_metrics_csv(const std::vector<EpochMetrics>& history, const std::filesystem::path& path);
/// Per-layer sparsity table and threshold statistics.
void print_report(const Mlp& model, std::ostream& out);

int cmd_train(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err);
int cmd_report(const std::filesystem::path& checkpoint_path, std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
                std::ostream& err);
int cmd_gradcheck(std::uint64_t seed, double step, std::ostream& out, std::ostream& err,
                  std::span<const GradCheckCase> extra = {});

} // namespace dsparse
