#include "dsparse/config.hpp"

#include "dsparse/errors.hpp"

#include <fstream>
#include <set>

namespace dsparse {

using nlohmann::json;

namespace {

const std::set<std::string> kRequired = {"method",   "layer_sizes", "sparsify_kind", "regularizer", "lambda_i",
                                         "lambda_f", "t0",          "n",             "epochs",      "batch_size",
                                         "learning_rate", "seed",   "dataset",       "coarse_gradient"};
const std::set<std::string> kOptional = {"p", "regularize_raw", "activation", "loss", "prox_frequency", "standardize"};

const json& require(const json& doc, const std::string& key, const std::string& prefix = {}) {
    auto it = doc.find(key);
    if (it == doc.end()) throw ConfigError(prefix + key + ": missing required key", prefix + key);
    return *it;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number", key);
    return v.get<double>();
}

long integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer", key);
    return v.get<long>();
}

std::size_t count(const json& v, const std::string& key, long minimum) {
    const long n = integer(v, key);
    if (n < minimum) throw ConfigError(key + ": must be at least " + std::to_string(minimum), key);
    return static_cast<std::size_t>(n);
}

bool boolean(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError(key + ": expected true or false", key);
    return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key + ": expected a string", key);
    return v.get<std::string>();
}

template <class Parse>
auto parse_enum(const json& v, const std::string& key, Parse parse) {
    const std::string s = text(v, key);
    try {
        return parse(s);
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what(), key);
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(prefix + it.key() + ": unknown key", prefix + it.key());
    }
}

DatasetSpec parse_dataset(const json& d, std::uint64_t run_seed) {
    if (!d.is_object()) throw ConfigError("dataset: expected an object", "dataset");
    DatasetSpec spec;
    spec.seed = run_seed;
    const std::string p = "dataset.";
    if (d.contains("csv")) {
        reject_unknown(d, {"csv", "target", "task"}, p);
        spec.source = DatasetSpec::Source::csv;
        spec.csv_path = text(d["csv"], p + "csv");
        spec.target = text(require(d, "target", p), p + "target");
        if (d.contains("task")) spec.task = parse_enum(d["task"], p + "task", parse_task);
        return spec;
    }
    const std::string gen = text(require(d, "generator", p), p + "generator");
    if (d.contains("seed")) spec.seed = static_cast<std::uint64_t>(count(d["seed"], p + "seed", 0));
    spec.rows = count(require(d, "rows", p), p + "rows", 2);
    spec.in_dim = count(require(d, "in_dim", p), p + "in_dim", 1);
    if (gen == "sparse-teacher") {
        reject_unknown(d, {"generator", "seed", "rows", "in_dim", "relevant_dim", "noise_sigma"}, p);
        spec.source = DatasetSpec::Source::sparse_teacher;
        spec.relevant_dim = count(require(d, "relevant_dim", p), p + "relevant_dim", 1);
        if (spec.relevant_dim > spec.in_dim) {
            throw ConfigError(p + "relevant_dim: must not exceed in_dim", p + "relevant_dim");
        }
        spec.noise_sigma = number(require(d, "noise_sigma", p), p + "noise_sigma");
        if (!(spec.noise_sigma >= 0.0)) throw ConfigError(p + "noise_sigma: must be >= 0", p + "noise_sigma");
    } else if (gen == "linear-classes") {
        reject_unknown(d, {"generator", "seed", "rows", "in_dim", "margin"}, p);
        spec.source = DatasetSpec::Source::linear_classes;
        spec.task = Task::classification;
        if (d.contains("margin")) spec.margin = number(d["margin"], p + "margin");
    } else {
        throw ConfigError(p + "generator: unknown generator '" + gen + "'", p + "generator");
    }
    return spec;
}

} // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!kRequired.count(it.key()) && !kOptional.count(it.key())) {
            throw ConfigError(it.key() + ": unknown key", it.key());
        }
    }
    for (const auto& key : kRequired) require(doc, key);

    RunConfig rc;
    rc.source = doc;
    TrainConfig& tc = rc.train;
    tc.method = parse_enum(doc["method"], "method", parse_method);
    tc.epochs = count(doc["epochs"], "epochs", 1);
    tc.batch_size = count(doc["batch_size"], "batch_size", 1);
    tc.learning_rate = number(doc["learning_rate"], "learning_rate");
    if (!(tc.learning_rate > 0.0)) throw ConfigError("learning_rate: must be positive", "learning_rate");
    tc.seed = static_cast<std::uint64_t>(count(doc["seed"], "seed", 0));

    tc.regularizer.kind = parse_enum(doc["regularizer"], "regularizer", parse_regularizer_kind);
    if (doc.contains("p")) tc.regularizer.p = number(doc["p"], "p");
    try {
        tc.regularizer.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("p: ") + e.what(), "p");
    }

    tc.schedule.lambda_i = number(doc["lambda_i"], "lambda_i");
    tc.schedule.lambda_f = number(doc["lambda_f"], "lambda_f");
    tc.schedule.t0 = integer(doc["t0"], "t0");
    tc.schedule.n = integer(doc["n"], "n");
    try {
        tc.schedule.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(e.key() + ": " + e.what(), e.key());
    }

    if (doc.contains("regularize_raw")) tc.regularize_raw = boolean(doc["regularize_raw"], "regularize_raw");
    if (doc.contains("prox_frequency")) {
        tc.prox_frequency = parse_enum(doc["prox_frequency"], "prox_frequency", parse_prox_frequency);
    }
    if (doc.contains("standardize")) rc.standardize = boolean(doc["standardize"], "standardize");

    ModelSpec& ms = rc.model;
    const json& sizes = doc["layer_sizes"];
    if (!sizes.is_array() || sizes.size() < 2) {
        throw ConfigError("layer_sizes: expected an array with the input width and at least one layer", "layer_sizes");
    }
    for (const auto& s : sizes) ms.layer_sizes.push_back(count(s, "layer_sizes", 1));
    const json& kinds = doc["sparsify_kind"];
    if (kinds.is_string()) {
        ms.sparsify.assign(ms.num_layers(), parse_enum(kinds, "sparsify_kind", parse_layer_kind));
    } else if (kinds.is_array()) {
        for (const auto& k : kinds) ms.sparsify.push_back(parse_enum(k, "sparsify_kind", parse_layer_kind));
    } else {
        throw ConfigError("sparsify_kind: expected a string or an array of strings", "sparsify_kind");
    }
    if (doc.contains("activation")) ms.activation = parse_enum(doc["activation"], "activation", parse_activation);
    ms.coarse_gradient = boolean(doc["coarse_gradient"], "coarse_gradient");
    ms.validate();

    rc.dataset = parse_dataset(doc["dataset"], tc.seed);
    tc.loss = rc.dataset.task == Task::classification ? LossKind::cross_entropy : LossKind::mse;
    if (doc.contains("loss")) tc.loss = parse_enum(doc["loss"], "loss", parse_loss_kind);

    if (tc.method != Method::embedded && ms.any_sparsified()) {
        throw ConfigError("sparsify_kind: " + std::string(to_string(tc.method)) + " training requires 'none'",
                          "sparsify_kind");
    }
    tc.validate();
    return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    RunConfig rc = parse_config(doc);
    if (rc.dataset.source == DatasetSpec::Source::csv && rc.dataset.csv_path.is_relative()) {
        rc.dataset.csv_path = path.parent_path() / rc.dataset.csv_path;
    }
    return rc;
}

Split prepare_data(const RunConfig& config) {
    const DatasetSpec& d = config.dataset;
    Dataset data;
    switch (d.source) {
    case DatasetSpec::Source::sparse_teacher:
        data = gen_sparse_teacher(d.seed, d.rows, d.in_dim, d.relevant_dim, d.noise_sigma);
        break;
    case DatasetSpec::Source::linear_classes: data = gen_linear_classes(d.seed, d.rows, d.in_dim, d.margin); break;
    case DatasetSpec::Source::csv: data = load_csv(d.csv_path, d.task, d.target); break;
    }
    Split split = split_train_validation(data, config.train.seed);
    if (config.standardize) {
        const Standardizer s = Standardizer::fit(split.train);
        split.train = s.apply(split.train);
        split.validation = s.apply(split.validation);
    }
    return split;
}

RunConfig with_method(const RunConfig& config, Method method) {
    RunConfig out = config;
    out.train.method = method;
    if (method != Method::embedded) out.model.sparsify.assign(out.model.num_layers(), std::nullopt);
    return out;
}

} // namespace dsparse
