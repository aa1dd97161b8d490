#include "dsparse/checkpoint.hpp"

#include "dsparse/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsparse {

using nlohmann::json;

std::string encode_hex(double value) {
    if (!std::isfinite(value)) throw NonFiniteError("cannot encode a non-finite value");
    char buf[64];
    const bool negative = std::signbit(value);
    auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::hex);
    return std::string(negative ? "-0x" : "0x") + std::string(buf, res.ptr);
}

double decode_hex(std::string_view text) {
    const std::string original(text);
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    if (text.size() < 3 || text.substr(0, 2) != "0x") throw std::invalid_argument("not a hex float: '" + original + "'");
    text.remove_prefix(2);
    if (text.front() == '-' || text.front() == '+') throw std::invalid_argument("not a hex float: '" + original + "'");
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw std::invalid_argument("not a hex float: '" + original + "'");
    }
    return negative ? -value : value;
}

namespace {

json hex_array(std::span<const double> values) {
    json out = json::array();
    for (double v : values) out.push_back(encode_hex(v));
    return out;
}

std::vector<double> read_hex_array(const json& arr) {
    std::vector<double> out;
    for (const auto& v : arr) out.push_back(decode_hex(v.get<std::string>()));
    return out;
}

json spec_to_json(const ModelSpec& spec) {
    json kinds = json::array();
    for (const auto& k : spec.sparsify) kinds.push_back(std::string(layer_kind_name(k)));
    return {{"layer_sizes", spec.layer_sizes},
            {"activation", std::string(to_string(spec.activation))},
            {"sparsify_kind", kinds},
            {"coarse_gradient", spec.coarse_gradient}};
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec spec;
    spec.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    spec.activation = parse_activation(j.at("activation").get<std::string>());
    for (const auto& k : j.at("sparsify_kind")) spec.sparsify.push_back(parse_layer_kind(k.get<std::string>()));
    spec.coarse_gradient = j.at("coarse_gradient").get<bool>();
    return spec;
}

json layer_to_json(const LayerParams& layer) {
    json j = {{"name", layer.name},
              {"kind", std::string(layer_kind_name(layer.kind))},
              {"shape", layer.weight.shape()},
              {"weights", hex_array(layer.weight.data())},
              {"bias", hex_array(layer.bias.data())},
              {"beta", hex_array(layer.beta)},
              {"alpha", hex_array(layer.alpha)}};
    if (layer.gate) {
        j["gate"] = {{"alpha", hex_array(layer.gate->alpha.data())}, {"beta", encode_hex(layer.gate->beta)}};
    }
    return j;
}

LayerParams layer_from_json(const json& j) {
    LayerParams layer;
    layer.name = j.at("name").get<std::string>();
    layer.kind = parse_layer_kind(j.at("kind").get<std::string>());
    const Shape shape = j.at("shape").get<Shape>();
    layer.weight = Tensor(shape, read_hex_array(j.at("weights")));
    layer.bias = Tensor::vector(read_hex_array(j.at("bias")));
    layer.beta = read_hex_array(j.at("beta"));
    layer.alpha = read_hex_array(j.at("alpha"));
    if (j.contains("gate")) {
        const json& g = j["gate"];
        layer.gate = ArchParamSet{Tensor::vector(read_hex_array(g.at("alpha"))), decode_hex(g.at("beta").get<std::string>())};
    }
    return layer;
}

} // namespace

json to_json(const Checkpoint& c) {
    json layers = json::array();
    for (const auto& layer : c.model.layers()) layers.push_back(layer_to_json(layer));
    return {{"format_version", kCheckpointVersion},
            {"config", c.config},
            {"method", c.method},
            {"epoch", c.epoch},
            {"rng_state", c.rng_state},
            {"schedule",
             {{"lambda_i", encode_hex(c.schedule.lambda_i)},
              {"lambda_f", encode_hex(c.schedule.lambda_f)},
              {"t0", c.schedule.t0},
              {"n", c.schedule.n},
              {"lambda", encode_hex(c.lambda)}}},
            {"model", spec_to_json(c.model.spec())},
            {"layers", layers}};
}

Checkpoint checkpoint_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("format_version")) {
        throw std::runtime_error("checkpoint has no format_version");
    }
    const json& version = doc["format_version"];
    if (!version.is_number_integer() || version.get<int>() != kCheckpointVersion) {
        throw VersionError("unsupported checkpoint format_version " + version.dump() + " (expected " +
                           std::to_string(kCheckpointVersion) + ")");
    }
    try {
        Checkpoint c;
        c.config = doc.at("config");
        c.method = doc.at("method").get<std::string>();
        c.epoch = doc.at("epoch").get<long>();
        c.rng_state = doc.at("rng_state").get<std::string>();
        const json& s = doc.at("schedule");
        c.schedule.lambda_i = decode_hex(s.at("lambda_i").get<std::string>());
        c.schedule.lambda_f = decode_hex(s.at("lambda_f").get<std::string>());
        c.schedule.t0 = s.at("t0").get<long>();
        c.schedule.n = s.at("n").get<long>();
        c.lambda = decode_hex(s.at("lambda").get<std::string>());
        std::vector<LayerParams> layers;
        for (const auto& l : doc.at("layers")) layers.push_back(layer_from_json(l));
        c.model = Mlp(spec_from_json(doc.at("model")), std::move(layers));
        return c;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("malformed checkpoint: ") + e.what());
    }
}

std::string serialize_checkpoint(const Checkpoint& checkpoint) { return to_json(checkpoint).dump(1) + "\n"; }

Checkpoint parse_checkpoint(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("cannot parse checkpoint: ") + e.what());
    }
    return checkpoint_from_json(doc);
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize_checkpoint(checkpoint);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str());
}

} // namespace dsparse
