#include "dsparse/cli.hpp"
#include "dsparse/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace dsparse;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal_config() {
    return json::parse(R"({
        "method": "embedded",
        "layer_sizes": [6, 5, 1],
        "sparsify_kind": "structured-exp",
        "regularizer": "group-pnorm",
        "p": 0.5,
        "lambda_i": 0.0,
        "lambda_f": 0.01,
        "t0": 1,
        "n": 3,
        "epochs": 5,
        "batch_size": 16,
        "learning_rate": 0.01,
        "seed": 7,
        "coarse_gradient": false,
        "dataset": {"generator": "sparse-teacher", "rows": 120, "in_dim": 6, "relevant_dim": 3, "noise_sigma": 0.05}
    })");
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dsparse_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const json& c) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << c.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_key(const json& c) {
    try {
        parse_config(c);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

} // namespace

TEST(Config, ParsesMinimal) {
    const RunConfig rc = parse_config(minimal_config());
    EXPECT_EQ(rc.train.method, Method::embedded);
    EXPECT_EQ(rc.model.sparsify.size(), 2u);
    EXPECT_EQ(rc.train.regularizer.p, 0.5);
    EXPECT_EQ(rc.train.loss, LossKind::mse);
    EXPECT_FALSE(rc.train.regularize_raw);
    EXPECT_EQ(rc.dataset.seed, 7u);
}

TEST(Config, ErrorsNameTheKey) {
    json c = minimal_config();
    c["epochs"] = 0;
    EXPECT_EQ(config_error_key(c), "epochs");
    c = minimal_config();
    c["learning_rat"] = 0.1;
    EXPECT_EQ(config_error_key(c), "learning_rat");
    c = minimal_config();
    c.erase("seed");
    EXPECT_EQ(config_error_key(c), "seed");
    c = minimal_config();
    c["p"] = 2.0;
    EXPECT_EQ(config_error_key(c), "p");
    c = minimal_config();
    c["sparsify_kind"] = json::array({"none"});
    EXPECT_EQ(config_error_key(c), "sparsify_kind");
    c = minimal_config();
    c["method"] = "proximal";
    EXPECT_EQ(config_error_key(c), "sparsify_kind");
    c = minimal_config();
    c["dataset"]["rowz"] = 3;
    EXPECT_EQ(config_error_key(c), "dataset.rowz");
    c = minimal_config();
    c["lambda_f"] = -1.0;
    EXPECT_EQ(config_error_key(c), "lambda_f");
    c = minimal_config();
    c["coarse_gradient"] = "yes";
    EXPECT_EQ(config_error_key(c), "coarse_gradient");
}

TEST(Config, PerLayerKindsAndCsvDataset) {
    json c = minimal_config();
    c["sparsify_kind"] = json::array({"unstructured", "none"});
    c["dataset"] = {{"csv", "data.csv"}, {"target", "y"}};
    const fs::path dir = scratch("csvcfg");
    std::ofstream(dir / "data.csv") << "a,b,c,d,e,f,y\n1,2,3,4,5,6,7\n2,3,4,5,6,7,8\n3,4,5,6,7,8,9\n4,5,6,7,8,9,1\n";
    const RunConfig rc = load_config(write_config(dir, c));
    EXPECT_EQ(rc.model.sparsify[0], ReparamKind::unstructured);
    EXPECT_FALSE(rc.model.sparsify[1].has_value());
    const Split s = prepare_data(rc);
    EXPECT_EQ(s.train.rows() + s.validation.rows(), 4u);
}

TEST(HexFloat, RoundTripsBitwise) {
    for (double v : {0.0, -0.0, 1.0, -1.5, 0.1, 1e-310, std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::denorm_min(), -3.14159e-200}) {
        const double back = decode_hex(encode_hex(v));
        EXPECT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(v)) << encode_hex(v);
    }
    EXPECT_EQ(encode_hex(-0.0), "-0x0p+0");
    EXPECT_THROW(decode_hex("1.5"), std::invalid_argument);
    EXPECT_THROW(decode_hex("0x1.8p+0junk"), std::invalid_argument);
    EXPECT_THROW(decode_hex("0x--1p0"), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsBitwise) {
    RunConfig rc = parse_config(minimal_config());
    rc.model.sparsify = {ReparamKind::structured_scaled, ReparamKind::unstructured};
    const RunOutput run = run_config(rc, LogLevel::error, std::cerr);
    const Checkpoint c = make_checkpoint(run);
    const std::string text = serialize_checkpoint(c);
    const Checkpoint back = parse_checkpoint(text);
    EXPECT_EQ(serialize_checkpoint(back), text);
    for (std::size_t l = 0; l < 2; ++l) {
        const auto& a = c.model.layers()[l];
        const auto& b = back.model.layers()[l];
        EXPECT_TRUE(bitwise_equal(a.weight, b.weight));
        EXPECT_TRUE(bitwise_equal(a.bias, b.bias));
        EXPECT_EQ(a.beta, b.beta);
        EXPECT_EQ(a.alpha, b.alpha);
        EXPECT_EQ(a.kind, b.kind);
    }
    EXPECT_EQ(back.rng_state, c.rng_state);
    EXPECT_EQ(back.epoch, 5);
    EXPECT_EQ(back.config, minimal_config());

    // a restored generator continues the same stream
    Rng r1(0), r2(0);
    r1.set_state(c.rng_state);
    r2.set_state(back.rng_state);
    EXPECT_EQ(r1.uniform(), r2.uniform());
}

TEST(Checkpoint, VersionAndMalformed) {
    const RunOutput run = run_config(parse_config(minimal_config()), LogLevel::error, std::cerr);
    json doc = to_json(make_checkpoint(run));
    doc["format_version"] = 99;
    EXPECT_THROW(checkpoint_from_json(doc), VersionError);
    const std::string text = serialize_checkpoint(make_checkpoint(run));
    EXPECT_THROW(parse_checkpoint(text.substr(0, text.size() / 2)), std::runtime_error);
    doc["format_version"] = kCheckpointVersion;
    doc["layers"][0]["weights"][0] = "nope";
    EXPECT_THROW(checkpoint_from_json(doc), std::runtime_error);
}

TEST(CmdTrain, HappyPathWritesThreeFiles) {
    const fs::path dir = scratch("train");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_train(write_config(dir, minimal_config()), dir / "out", out, err), kExitOk) << err.str();
    for (const char* f : {"checkpoint.json", "metrics.csv", "summary.txt"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    std::istringstream metrics(slurp(dir / "out" / "metrics.csv"));
    std::string line;
    std::getline(metrics, line);
    EXPECT_EQ(line, kMetricsHeader);
    int rows = 0;
    while (std::getline(metrics, line)) ++rows;
    EXPECT_EQ(rows, 5);
}

TEST(CmdTrain, RerunIsByteIdentical) {
    const fs::path dir = scratch("rerun");
    const fs::path cfg = write_config(dir, minimal_config());
    std::ostringstream out, err;
    ASSERT_EQ(cmd_train(cfg, dir / "a", out, err), kExitOk);
    ASSERT_EQ(cmd_train(cfg, dir / "b", out, err), kExitOk);
    EXPECT_EQ(slurp(dir / "a" / "checkpoint.json"), slurp(dir / "b" / "checkpoint.json"));
    EXPECT_EQ(slurp(dir / "a" / "metrics.csv"), slurp(dir / "b" / "metrics.csv"));
}

TEST(CmdTrain, ConfigErrorsExitTwo) {
    const fs::path dir = scratch("badcfg");
    json c = minimal_config();
    c["epochs"] = 0;
    std::ostringstream out, err;
    EXPECT_EQ(cmd_train(write_config(dir, c), dir / "out", out, err), kExitConfig);
    EXPECT_NE(err.str().find("epochs"), std::string::npos) << err.str();

    std::ofstream(dir / "broken.json") << "{\"method\": ";
    EXPECT_EQ(cmd_train(dir / "broken.json", dir / "out", out, err), kExitConfig);

    c = minimal_config();
    c["layer_sizes"] = json::array({7, 5, 1});
    std::ostringstream err2;
    EXPECT_EQ(cmd_train(write_config(dir, c), dir / "out", out, err2), kExitConfig);
    EXPECT_NE(err2.str().find("layer_sizes"), std::string::npos) << err2.str();
}

TEST(CmdTrain, RuntimeFailureExitsOne) {
    const fs::path dir = scratch("runtime");
    json c = minimal_config();
    c["dataset"] = {{"csv", "missing.csv"}, {"target", "y"}};
    std::ostringstream out, err;
    EXPECT_EQ(cmd_train(write_config(dir, c), dir / "out", out, err), kExitRuntime);
}

TEST(CmdReport, TableAndErrors) {
    const fs::path dir = scratch("report");
    json c = minimal_config();
    c["epochs"] = 1;
    c["lambda_f"] = 0.0;
    std::ostringstream out, err;
    ASSERT_EQ(cmd_train(write_config(dir, c), dir / "out", out, err), kExitOk);
    std::ostringstream rep;
    ASSERT_EQ(cmd_report(dir / "out" / "checkpoint.json", rep, err), kExitOk);
    EXPECT_NE(rep.str().find("layer0"), std::string::npos);
    EXPECT_NE(rep.str().find("total zero_fraction 0,"), std::string::npos) << rep.str();
    EXPECT_NE(rep.str().find("median"), std::string::npos);

    // fully clamped layer
    Checkpoint ck = load_checkpoint(dir / "out" / "checkpoint.json");
    for (auto& b : ck.model.layers()[0].beta) b = 10.0;
    save_checkpoint(ck, dir / "clamped.json");
    std::ostringstream rep2;
    ASSERT_EQ(cmd_report(dir / "clamped.json", rep2, err), kExitOk);
    std::istringstream lines(rep2.str());
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        if (line.rfind("layer0", 0) == 0 && line.find("structured-exp") != std::string::npos) {
            found = true;
            std::istringstream cols(line);
            std::string name, kind, groups, zero_groups, zero_weights, weights, zero_fraction;
            cols >> name >> kind >> groups >> zero_groups >> zero_weights >> weights >> zero_fraction;
            EXPECT_EQ(groups, "5");
            EXPECT_EQ(zero_groups, "5");
            EXPECT_EQ(zero_weights, "35");
            EXPECT_EQ(weights, "35");
            EXPECT_EQ(zero_fraction, "1");
        }
    }
    EXPECT_TRUE(found) << rep2.str();

    const std::string text = slurp(dir / "out" / "checkpoint.json");
    std::ofstream(dir / "truncated.json") << text.substr(0, text.size() / 3);
    std::ostringstream err3;
    EXPECT_EQ(cmd_report(dir / "truncated.json", rep, err3), kExitRuntime);
    EXPECT_NE(err3.str().find("parse"), std::string::npos) << err3.str();

    json doc = json::parse(text);
    doc["format_version"] = 2;
    std::ofstream(dir / "future.json") << doc.dump();
    EXPECT_EQ(cmd_report(dir / "future.json", rep, err), kExitVersion);
}

TEST(CmdCompare, ThreeMethodsPerEpoch) {
    const fs::path dir = scratch("compare");
    std::ostringstream out, err;
    ASSERT_EQ(cmd_compare(write_config(dir, minimal_config()), dir / "out", out, err), kExitOk) << err.str();
    std::istringstream csv(slurp(dir / "out" / "compare.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, std::string("method,") + kMetricsHeader);
    std::map<std::string, int> rows;
    std::map<std::string, double> final_zero;
    while (std::getline(csv, line)) {
        const std::string method = line.substr(0, line.find(','));
        ++rows[method];
        const std::string zf = line.substr(0, line.rfind(','));
        final_zero[method] = std::stod(zf.substr(zf.rfind(',') + 1));
    }
    EXPECT_EQ(rows.size(), 3u);
    for (const auto& [m, n] : rows) EXPECT_EQ(n, 5) << m;
    for (const auto& [m, z] : final_zero) {
        EXPECT_GE(z, 0.0) << m;
        EXPECT_LE(z, 1.0) << m;
    }
}

TEST(CmdCompare, LambdaZeroEmbeddedMatchesProximal) {
    json c = minimal_config();
    c["sparsify_kind"] = "none";
    c["regularizer"] = "group-l21";
    c.erase("p");
    c["lambda_f"] = 0.0;
    const RunConfig base = parse_config(c);
    const RunOutput e = run_config(with_method(base, Method::embedded), LogLevel::error, std::cerr);
    const RunOutput p = run_config(with_method(base, Method::proximal), LogLevel::error, std::cerr);
    EXPECT_NEAR(e.result.history.back().train_loss, p.result.history.back().train_loss, 1e-9);
}

TEST(CmdGradcheck, HealthyBuildPasses) {
    std::ostringstream out, err;
    EXPECT_EQ(cmd_gradcheck(0, kGradCheckStep, out, err), kExitOk) << out.str() << err.str();
    int lines = 0;
    std::istringstream in(out.str());
    for (std::string l; std::getline(in, l);) lines += l.find("max rel err") != std::string::npos;
    EXPECT_GE(lines, 8);
    EXPECT_EQ(cmd_gradcheck(0, -1.0, out, err), kExitConfig);
}

TEST(CmdGradcheck, CorruptedBackwardFails) {
    GradCheckCase bad;
    bad.name = "corrupted-square";
    bad.sample = [](Rng& rng) {
        return GradCheckInstance{{Tensor::vector({rng.uniform(0.5, 2.0), rng.uniform(-2.0, -0.5)})}, {}};
    };
    bad.evaluate = [](std::span<const ad::Var> v, std::span<const double>) {
        ad::Tape& t = *v[0].tape;
        const Tensor& x = v[0].value();
        std::vector<double> y(x.numel());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] * x[i];
        ad::Var sq = t.record("corrupted_square", {v[0].id}, Tensor(x.shape(), y),
                              [id = v[0].id](const ad::Tape& tape, const Tensor& up) {
                                  const Tensor& in = tape.node(id).value;
                                  std::vector<double> g(in.numel());
                                  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 3.0 * in[i] * up[i];
                                  return std::vector<Tensor>{Tensor(in.shape(), g)};
                              });
        return ad::sum(sq);
    };
    std::ostringstream out, err;
    const GradCheckCase extra[] = {bad};
    EXPECT_EQ(cmd_gradcheck(0, kGradCheckStep, out, err, extra), kExitRuntime);
    EXPECT_NE(err.str().find("corrupted-square"), std::string::npos) << err.str();
}
