#include "dsparse/cli.hpp"

#include "dsparse/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

namespace dsparse {

namespace fs = std::filesystem;

LogLevel log_level_from_env() {
    const char* v = std::getenv("DSPARSE_LOG");
    if (!v) return LogLevel::warn;
    const std::string s(v);
    if (s == "error") return LogLevel::error;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const VersionError& e) {
        err << "version error: " << e.what() << "\n";
        return kExitVersion;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream ss;
    ss << std::setprecision(precision) << v;
    return ss.str();
}

} // namespace

RunOutput run_config(const RunConfig& config, LogLevel level, std::ostream& log) {
    const Split split = prepare_data(config);
    Trainer trainer(config.model, split, config.train);
    RunOutput run{config, {}};
    run.result.initial = trainer.measure(lambda_at(config.train.schedule, 0));
    const std::string tag(to_string(config.train.method));
    for (std::size_t e = 0; e < config.train.epochs; ++e) {
        const EpochMetrics m = trainer.run_epoch();
        if (level >= LogLevel::info) {
            log << "[" << tag << "] epoch " << m.epoch << " train " << fmt(m.train_loss) << " val " << fmt(m.val_loss)
                << " lambda " << fmt(m.lambda) << " zero " << fmt(m.sparsity.zero_fraction) << "\n";
        }
        run.result.history.push_back(m);
    }
    run.result.model = trainer.model();
    run.result.rng_state = trainer.rng().state();
    run.result.epoch = trainer.epoch();
    return run;
}

Checkpoint make_checkpoint(const RunOutput& run) {
    Checkpoint c;
    c.config = run.config.source;
    c.method = std::string(to_string(run.config.train.method));
    c.epoch = run.result.epoch;
    c.rng_state = run.result.rng_state;
    c.schedule = run.config.train.schedule;
    c.lambda = run.result.history.empty() ? lambda_at(c.schedule, 0) : run.result.history.back().lambda;
    c.model = run.result.model;
    return c;
}

std::string metrics_row(const EpochMetrics& m) {
    return std::to_string(m.epoch) + "," + format_double(m.train_loss) + "," + format_double(m.val_loss) + "," +
           format_double(m.lambda) + "," + format_double(m.sparsity.zero_fraction) + "," +
           format_double(m.sparsity.zero_group_fraction);
}

void write_metrics_csv(const std::vector<EpochMetrics>& history, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << kMetricsHeader << "\n";
    for (const auto& m : history) out << metrics_row(m) << "\n";
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void print_report(const Mlp& model, std::ostream& out) {
    const auto effective = model.effective_layers();
    const auto& layers = model.layers();
    out << std::left << std::setw(10) << "layer" << std::setw(19) << "kind" << std::right << std::setw(8) << "groups"
        << std::setw(12) << "zero_groups" << std::setw(14) << "zero_weights" << std::setw(10) << "weights"
        << std::setw(15) << "zero_fraction" << "\n";
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const SparsityReport r = Mlp::sparsity_of({layers[l]}, {effective[l]});
        const auto zero_groups = std::count_if(r.groups.begin(), r.groups.end(), [](const auto& g) { return g.all_zero; });
        out << std::left << std::setw(10) << layers[l].name << std::setw(19) << layer_kind_name(layers[l].kind)
            << std::right << std::setw(8) << r.groups.size() << std::setw(12) << zero_groups << std::setw(14)
            << r.zero_weights << std::setw(10) << r.total_weights << std::setw(15) << fmt(r.zero_fraction) << "\n";
    }
    const SparsityReport total = model.sparsity();
    out << "total zero_fraction " << fmt(total.zero_fraction) << ", zero_group_fraction "
        << fmt(total.zero_group_fraction) << "\n\n";

    out << "thresholds (exp(beta) for structured-exp, sigmoid(beta) otherwise)\n";
    out << std::left << std::setw(10) << "layer" << std::right << std::setw(14) << "min" << std::setw(14) << "median"
        << std::setw(14) << "max" << "\n";
    auto row = [&](const std::string& name, std::vector<double> t) {
        std::sort(t.begin(), t.end());
        const std::size_t n = t.size();
        const double median = n % 2 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
        out << std::left << std::setw(10) << name << std::right << std::setw(14) << fmt(t.front()) << std::setw(14)
            << fmt(median) << std::setw(14) << fmt(t.back()) << "\n";
    };
    for (const auto& layer : layers) {
        if (layer.kind && !layer.beta.empty()) {
            std::vector<double> t;
            for (double b : layer.beta) t.push_back(threshold_scale(*layer.kind, b));
            row(layer.name, t);
        } else if (layer.gate) {
            row(layer.name + ".gate", {threshold_scale(ReparamKind::unstructured, layer.gate->beta)});
        } else {
            out << std::left << std::setw(10) << layer.name << std::right << std::setw(14) << "-" << std::setw(14)
                << "-" << std::setw(14) << "-" << "\n";
        }
    }
}

namespace {

void write_summary(const RunOutput& run, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    const auto& tc = run.config.train;
    const auto& r = run.result;
    out << "dsparse training summary\n";
    out << "written " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << "\n\n";
    out << "method        " << to_string(tc.method) << "\n";
    out << "regularizer   " << to_string(tc.regularizer.kind);
    if (tc.regularizer.p) out << " (p = " << *tc.regularizer.p << ")";
    out << "\n";
    out << "epochs        " << r.epoch << "\n";
    out << "seed          " << tc.seed << "\n";
    out << "lambda        " << fmt(tc.schedule.lambda_i) << " -> " << fmt(tc.schedule.lambda_f) << " over epochs "
        << tc.schedule.t0 << ".." << tc.schedule.t0 + tc.schedule.n << "\n\n";
    out << "                 initial        final\n";
    const EpochMetrics& last = r.history.empty() ? r.initial : r.history.back();
    out << "train loss  " << std::setw(12) << fmt(r.initial.train_loss) << " " << std::setw(12) << fmt(last.train_loss)
        << "\n";
    out << "val loss    " << std::setw(12) << fmt(r.initial.val_loss) << " " << std::setw(12) << fmt(last.val_loss)
        << "\n";
    if (last.val_accuracy) {
        out << "val acc     " << std::setw(12) << fmt(*r.initial.val_accuracy) << " " << std::setw(12)
            << fmt(*last.val_accuracy) << "\n";
    }
    out << "\n";
    print_report(r.model, out);
}

} // namespace

int cmd_train(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig config = load_config(config_path);
        ensure_dir(out_dir);
        const RunOutput run = run_config(config, log_level_from_env(), err);
        save_checkpoint(make_checkpoint(run), out_dir / "checkpoint.json");
        write_metrics_csv(run.result.history, out_dir / "metrics.csv");
        write_summary(run, out_dir / "summary.txt");
        const EpochMetrics& last = run.result.history.back();
        out << "trained " << run.result.epoch << " epochs: val loss " << fmt(last.val_loss) << ", zero fraction "
            << fmt(last.sparsity.zero_fraction) << "\n";
        out << "wrote " << (out_dir / "checkpoint.json").string() << ", metrics.csv, summary.txt\n";
        return kExitOk;
    });
}

int cmd_report(const fs::path& checkpoint_path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Checkpoint c = load_checkpoint(checkpoint_path);
        out << "checkpoint " << checkpoint_path.string() << ": method " << c.method << ", epoch " << c.epoch
            << ", lambda " << fmt(c.lambda) << "\n\n";
        print_report(c.model, out);
        return kExitOk;
    });
}

int cmd_compare(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig base = load_config(config_path);
        ensure_dir(out_dir);
        const LogLevel level = log_level_from_env();
        const Method methods[] = {Method::embedded, Method::proximal, Method::arch_param};
        std::vector<std::ostringstream> logs(3);
        std::vector<std::future<RunOutput>> jobs;
        for (std::size_t i = 0; i < 3; ++i) {
            jobs.push_back(std::async(std::launch::async, [&, i] {
                return run_config(with_method(base, methods[i]), level, logs[i]);
            }));
        }
        std::vector<RunOutput> runs;
        for (auto& j : jobs) runs.push_back(j.get());
        for (const auto& l : logs) err << l.str();

        const fs::path csv = out_dir / "compare.csv";
        std::ofstream file(csv, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + csv.string());
        file << "method," << kMetricsHeader << "\n";
        for (const auto& run : runs) {
            for (const auto& m : run.result.history) file << to_string(run.config.train.method) << "," << metrics_row(m) << "\n";
        }
        if (!file) throw std::runtime_error("failed writing " + csv.string());

        out << std::left << std::setw(12) << "method" << std::right << std::setw(14) << "train_loss" << std::setw(14)
            << "val_loss" << std::setw(15) << "zero_fraction" << std::setw(21) << "zero_group_fraction" << "\n";
        for (const auto& run : runs) {
            const EpochMetrics& m = run.result.history.back();
            out << std::left << std::setw(12) << to_string(run.config.train.method) << std::right << std::setw(14)
                << fmt(m.train_loss) << std::setw(14) << fmt(m.val_loss) << std::setw(15)
                << fmt(m.sparsity.zero_fraction) << std::setw(21) << fmt(m.sparsity.zero_group_fraction) << "\n";
        }
        out << "wrote " << csv.string() << "\n";
        return kExitOk;
    });
}

int cmd_gradcheck(std::uint64_t seed, double step, std::ostream& out, std::ostream& err,
                  std::span<const GradCheckCase> extra) {
    if (!(step > 0.0)) {
        err << "config error: eps must be positive\n";
        return kExitConfig;
    }
    return guarded(err, [&] {
        const GradCheckReport report = run_gradcheck(seed, step, extra);
        std::vector<std::string> failing;
        for (const auto& line : report.lines) {
            out << std::left << std::setw(28) << line.name << std::right << " instances " << std::setw(4)
                << line.instances << "  max rel err " << std::setw(12) << fmt(line.max_rel_error, 4) << "  "
                << (line.passed ? "ok" : "FAIL");
            if (!line.error.empty()) out << " (" << line.error << ")";
            out << "\n";
            if (!line.passed) failing.push_back(line.name);
        }
        if (!failing.empty()) {
            err << "gradcheck failed:";
            for (const auto& f : failing) err << " " << f;
            err << "\n";
            return kExitRuntime;
        }
        return kExitOk;
    });
}

} // namespace dsparse
