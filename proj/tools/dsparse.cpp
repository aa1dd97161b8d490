#include "dsparse/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Training with exact-zero sparsification"};
    app.require_subcommand(1);

    std::string config, out_dir = "out", checkpoint;
    std::uint64_t seed = 0;
    double eps = dsparse::kGradCheckStep;

    auto* train = app.add_subcommand("train", "train one configured run");
    train->add_option("--config,config", config, "JSON config file")->required();
    train->add_option("--out", out_dir, "output directory");

    auto* report = app.add_subcommand("report", "print the sparsity report of a checkpoint");
    report->add_option("checkpoint", checkpoint, "checkpoint.json")->required();

    auto* compare = app.add_subcommand("compare", "run embedded, proximal and arch-param on one config");
    compare->add_option("--config,config", config, "JSON config file")->required();
    compare->add_option("--out", out_dir, "output directory");

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of all differentiable operations");
    gradcheck->add_option("--seed", seed, "sampling seed");
    gradcheck->add_option("--eps", eps, "finite-difference step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dsparse::kExitConfig;
    }

    if (*train) return dsparse::cmd_train(config, out_dir, std::cout, std::cerr);
    if (*report) return dsparse::cmd_report(checkpoint, std::cout, std::cerr);
    if (*compare) return dsparse::cmd_compare(config, out_dir, std::cout, std::cerr);
    return dsparse::cmd_gradcheck(seed, eps, std::cout, std::cerr);
}
