#include "dsparse/data.hpp"

#include "dsparse/errors.hpp"
#include "dsparse/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dsparse {

std::string_view to_string(Task task) { return task == Task::regression ? "regression" : "classification"; }

Task parse_task(std::string_view text) {
    if (text == "regression") return Task::regression;
    if (text == "classification") return Task::classification;
    throw ConfigError("unknown task '" + std::string(text) + "'", "task");
}

void Dataset::validate() const {
    if (inputs.rank() != 2 || targets.rank() != 2) throw ShapeError("dataset inputs and targets must be matrices");
    if (inputs.rows() != targets.rows()) {
        throw ShapeError("dataset row counts differ: inputs " + to_string(inputs.shape()) + ", targets " +
                         to_string(targets.shape()));
    }
    if (!feature_names.empty() && feature_names.size() != inputs.cols()) {
        throw ShapeError("dataset has " + std::to_string(feature_names.size()) + " feature names for " +
                         std::to_string(inputs.cols()) + " columns");
    }
    if (task == Task::classification) {
        if (targets.cols() != 1) throw ShapeError("classification targets must be a single column");
        for (double v : targets.data()) {
            if (v < 0.0 || v != std::floor(v)) {
                throw std::invalid_argument("classification target " + format_double(v) +
                                            " is not a class index");
            }
        }
    }
}

std::vector<std::size_t> Dataset::labels() const {
    if (task != Task::classification) throw std::logic_error("labels() requires a classification dataset");
    std::vector<std::size_t> out;
    out.reserve(rows());
    for (double v : targets.data()) out.push_back(static_cast<std::size_t>(v));
    return out;
}

std::size_t Dataset::num_classes() const {
    std::size_t n = 0;
    for (auto l : labels()) n = std::max(n, l + 1);
    return n;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    if (rows.empty()) throw std::invalid_argument("dataset subset must be non-empty");
    const std::size_t f = features(), o = outputs();
    std::vector<double> x, y;
    x.reserve(rows.size() * f);
    y.reserve(rows.size() * o);
    for (auto r : rows) {
        auto xi = inputs.data().subspan(r * f, f);
        auto yi = targets.data().subspan(r * o, o);
        x.insert(x.end(), xi.begin(), xi.end());
        y.insert(y.end(), yi.begin(), yi.end());
    }
    return {Tensor::matrix(rows.size(), f, std::move(x)), Tensor::matrix(rows.size(), o, std::move(y)), task,
            feature_names, target_names};
}

namespace {

std::vector<std::string> default_names(std::string_view prefix, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return names;
}

} // namespace

Dataset gen_sparse_teacher(std::uint64_t seed, std::size_t rows, std::size_t in_dim, std::size_t relevant_dim,
                           double noise_sigma) {
    if (rows == 0) throw std::invalid_argument("gen_sparse_teacher: rows must be positive");
    if (relevant_dim == 0 || relevant_dim > in_dim) {
        throw std::invalid_argument("gen_sparse_teacher: need 0 < relevant_dim <= in_dim");
    }
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("gen_sparse_teacher: noise_sigma must be >= 0");

    Rng rng(seed);
    std::vector<double> v(relevant_dim);
    for (auto& c : v) {
        const double magnitude = rng.uniform(0.5, 2.0);
        c = rng.uniform() < 0.5 ? -magnitude : magnitude;
    }
    std::vector<double> x(rows * in_dim);
    for (auto& e : x) e = rng.normal();
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < relevant_dim; ++j) s += x[r * in_dim + j] * v[j];
        y[r] = s + noise_sigma * rng.normal();
    }
    return {Tensor::matrix(rows, in_dim, std::move(x)), Tensor::matrix(rows, 1, std::move(y)), Task::regression,
            default_names("x", in_dim), {"y"}};
}

Dataset gen_linear_classes(std::uint64_t seed, std::size_t rows, std::size_t in_dim, double margin) {
    if (rows == 0 || in_dim == 0) throw std::invalid_argument("gen_linear_classes: rows and in_dim must be positive");
    Rng rng(seed);
    std::vector<double> w(in_dim);
    double norm = 0.0;
    for (auto& c : w) {
        c = rng.normal();
        norm += c * c;
    }
    norm = std::sqrt(norm);
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(rows * in_dim);
    while (y.size() < rows) {
        std::vector<double> xi(in_dim);
        double s = 0.0;
        for (std::size_t j = 0; j < in_dim; ++j) {
            xi[j] = rng.normal();
            s += xi[j] * w[j];
        }
        if (std::fabs(s) / norm < margin) continue;
        x.insert(x.end(), xi.begin(), xi.end());
        y.push_back(s > 0.0 ? 1.0 : 0.0);
    }
    return {Tensor::matrix(rows, in_dim, std::move(x)), Tensor::matrix(rows, 1, std::move(y)), Task::classification,
            default_names("x", in_dim), {"label"}};
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

} // namespace

Dataset load_csv(const std::filesystem::path& path, Task task, std::string_view target_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
    std::vector<std::string> header;
    for (auto& h : split_commas(line)) header.push_back(trim(h));

    std::size_t target = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == target_column) target = j;
    }
    if (target == header.size()) {
        throw std::runtime_error(path.string() + ": missing target column '" + std::string(target_column) + "'");
    }

    Dataset data;
    data.task = task;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != target) data.feature_names.push_back(header[j]);
    }
    data.target_names = {header[target]};

    std::vector<double> x, y;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        auto cells = split_commas(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path.string() + ": row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            if (!parse_double(trim(cells[j]), v)) {
                throw std::runtime_error(path.string() + ": cannot parse '" + trim(cells[j]) + "' at row " +
                                         std::to_string(row) + ", column " + header[j]);
            }
            (j == target ? y : x).push_back(v);
        }
    }
    if (row == 0) throw std::runtime_error(path.string() + ": no data rows");
    if (data.feature_names.empty()) throw std::runtime_error(path.string() + ": no feature columns");
    data.inputs = Tensor::matrix(row, data.feature_names.size(), std::move(x));
    data.targets = Tensor::matrix(row, 1, std::move(y));
    data.validate();
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    data.validate();
    auto features = data.feature_names.empty() ? default_names("x", data.features()) : data.feature_names;
    auto targets = data.target_names.size() == data.outputs() ? data.target_names : default_names("y", data.outputs());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    bool first = true;
    for (const auto& names : {features, targets}) {
        for (const auto& n : names) {
            out << (first ? "" : ",") << n;
            first = false;
        }
    }
    out << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t j = 0; j < data.features(); ++j) out << (j ? "," : "") << format_double(data.inputs.at(r, j));
        for (std::size_t k = 0; k < data.outputs(); ++k) out << ',' << format_double(data.targets.at(r, k));
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Split split_train_validation(const Dataset& data, std::uint64_t seed, double validation_fraction) {
    if (data.rows() < 2) throw std::invalid_argument("need at least two rows to split");
    std::vector<std::size_t> order(data.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(data.rows())));
    n_val = std::clamp<std::size_t>(n_val, 1, data.rows() - 1);
    std::span<const std::size_t> all(order);
    return {data.subset(all.subspan(n_val)), data.subset(all.first(n_val))};
}

Standardizer Standardizer::fit(const Dataset& reference) {
    const std::size_t n = reference.rows(), f = reference.features();
    Standardizer s{std::vector<double>(f, 0.0), std::vector<double>(f, 1.0)};
    for (std::size_t j = 0; j < f; ++j) {
        double m = 0.0;
        for (std::size_t r = 0; r < n; ++r) m += reference.inputs.at(r, j);
        m /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) var += (reference.inputs.at(r, j) - m) * (reference.inputs.at(r, j) - m);
        var /= static_cast<double>(n);
        s.mean[j] = m;
        s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Dataset Standardizer::apply(const Dataset& data) const {
    if (data.features() != mean.size()) throw ShapeError("standardizer fitted on a different feature count");
    std::vector<double> x(data.inputs.values());
    const std::size_t f = data.features();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - mean[i % f]) / scale[i % f];
    Dataset out = data;
    out.inputs = Tensor(data.inputs.shape(), std::move(x));
    return out;
}

} // namespace dsparse
