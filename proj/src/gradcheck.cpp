#include "dsparse/gradcheck.hpp"

#include "dsparse/arch_params.hpp"
#include "dsparse/regularize.hpp"
#include "dsparse/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsparse {

bool GradCheckReport::passed() const {
    return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.passed; });
}

double relative_error(double analytic, double numeric) {
    return std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), kRelErrorFloor});
}

bool near_kink(const ad::Tape& tape, double distance) {
    for (std::size_t i = 0; i < tape.size(); ++i) {
        const ad::Node& n = tape.node(i);
        if (n.op == "norm2") {
            if (n.value.item() <= distance) return true;
            continue;
        }
        const bool kinked = n.op == "relu" || n.op == "abs" || n.op == "sign" || n.op.starts_with("custom_grad");
        if (!kinked) continue;
        for (double v : tape.node(n.inputs.at(0)).value.data()) {
            if (std::fabs(v) <= distance) return true;
        }
    }
    return false;
}

namespace {

struct Evaluation {
    double value;
    bool kinked;
};

Evaluation evaluate_at(const GradCheckCase& c, const std::vector<Tensor>& leaves, std::span<const double> constants) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const auto& t : leaves) vars.push_back(tape.leaf(t));
    const ad::Var root = c.evaluate(vars, constants);
    return {root.value().item(), near_kink(tape)};
}

} // namespace

GradCheckLine check_case(const GradCheckCase& c, Rng& rng, std::size_t instances, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    GradCheckLine line;
    line.name = c.name;
    try {
        while (line.instances < instances) {
            GradCheckInstance inst = c.sample(rng);
            ad::Tape tape;
            std::vector<ad::Var> vars;
            for (const auto& t : inst.leaves) vars.push_back(tape.leaf(t));
            const ad::Var root = c.evaluate(vars, inst.constants);
            if (near_kink(tape)) {
                if (++line.resampled > 100 * instances) throw std::runtime_error("too many instances near a kink");
                continue;
            }
            const ad::Gradients grads = tape.backward(root);
            bool kinked = false;
            double worst = 0.0;
            for (std::size_t k = 0; k < inst.leaves.size() && !kinked; ++k) {
                const Tensor& g = grads[vars[k]];
                for (std::size_t j = 0; j < inst.leaves[k].numel(); ++j) {
                    auto shifted = [&](double delta) {
                        std::vector<Tensor> moved = inst.leaves;
                        std::vector<double> data = moved[k].values();
                        data[j] += delta;
                        moved[k] = Tensor(moved[k].shape(), std::move(data));
                        return evaluate_at(c, moved, inst.constants);
                    };
                    const Evaluation plus = shifted(step);
                    const Evaluation minus = shifted(-step);
                    if (plus.kinked || minus.kinked) {
                        kinked = true;
                        break;
                    }
                    const double numeric = (plus.value - minus.value) / (2.0 * step);
                    worst = std::max(worst, relative_error(g[j], numeric));
                }
            }
            if (kinked) {
                if (++line.resampled > 100 * instances) throw std::runtime_error("too many instances near a kink");
                continue;
            }
            line.max_rel_error = std::max(line.max_rel_error, worst);
            ++line.instances;
        }
        line.passed = line.max_rel_error < kGradCheckTolerance;
    } catch (const std::exception& e) {
        line.error = e.what();
        line.passed = false;
    }
    return line;
}

namespace {

std::size_t dim(Rng& rng) { return 1 + rng.index(8); }

Tensor uniform_vector(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return Tensor::vector(std::move(v));
}

double norm2_of(const Tensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += v * v;
    return std::sqrt(s);
}

double norm1_of(const Tensor& t) {
    double s = 0.0;
    for (double v : t.data()) s += std::fabs(v);
    return s;
}

double max_abs(const Tensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::fabs(v));
    return m;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

/// Smooth scalar readout sum_i c_i y_i + 0.5 |y|^2 with fixed mixed-sign c.
ad::Var readout(ad::Var y) {
    const std::size_t n = y.value().numel();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (i % 2 == 0 ? 1.0 : -1.0) * (0.5 + 0.1 * static_cast<double>(i));
    const ad::Var cv = y.tape->constant(Tensor(y.value().shape(), std::move(c)));
    return ad::sum(ad::mul(cv, y)) + 0.5 * ad::sum_squares(y);
}

GradCheckInstance sample_groups(Rng& rng) {
    GradCheckInstance inst;
    const std::size_t groups = 1 + rng.index(4);
    for (std::size_t g = 0; g < groups; ++g) inst.leaves.push_back(uniform_vector(rng, dim(rng), -2.0, 2.0));
    return inst;
}

} // namespace

std::vector<GradCheckCase> default_gradcheck_cases() {
    std::vector<GradCheckCase> cases;

    cases.push_back({"structured-exp",
                     [](Rng& rng) {
                         Tensor w = uniform_vector(rng, dim(rng), -2.0, 2.0);
                         const double beta = std::log(rng.uniform(0.1, 1.5) * std::max(norm2_of(w), 1e-3));
                         return GradCheckInstance{{w, Tensor::scalar(beta)}, {}};
                     },
                     [](std::span<const ad::Var> v, std::span<const double>) {
                         return readout(structured_reparam(v[0], v[1], false));
                     }});

    cases.push_back({"structured-scaled",
                     [](Rng& rng) {
                         Tensor w = uniform_vector(rng, dim(rng), -2.0, 2.0);
                         return GradCheckInstance{
                             {w, Tensor::scalar(rng.uniform(-2.0, 2.0)), Tensor::scalar(rng.uniform(-2.0, 2.0))}, {}};
                     },
                     [](std::span<const ad::Var> v, std::span<const double>) {
                         return readout(structured_scaled_reparam(v[0], v[1], v[2], false));
                     }});

    auto unstructured_sample = [](Rng& rng) {
        Tensor w = uniform_vector(rng, dim(rng), -2.0, 2.0);
        const double t = rng.uniform(0.05, 0.9) * max_abs(w) / std::max(norm1_of(w), 1e-3);
        return GradCheckInstance{{w, Tensor::scalar(logit(std::clamp(t, 1e-6, 1.0 - 1e-6)))}, {}};
    };
    cases.push_back({"unstructured", unstructured_sample, [](std::span<const ad::Var> v, std::span<const double>) {
                         return readout(unstructured_reparam(v[0], v[1], false));
                     }});
    cases.push_back({"unstructured-sign-form", unstructured_sample,
                     [](std::span<const ad::Var> v, std::span<const double>) {
                         return readout(unstructured_reparam_sign_form(v[0], v[1], false));
                     }});

    cases.push_back({"group-l21", sample_groups, [](std::span<const ad::Var> v, std::span<const double>) {
                         return group_l21(v);
                     }});
    cases.push_back({"exclusive-l12", sample_groups, [](std::span<const ad::Var> v, std::span<const double>) {
                         return exclusive_l12(v);
                     }});
    cases.push_back({"group-pnorm",
                     [](Rng& rng) {
                         GradCheckInstance inst = sample_groups(rng);
                         inst.constants.push_back(rng.uniform(0.3, 1.0));
                         return inst;
                     },
                     [](std::span<const ad::Var> v, std::span<const double> c) { return group_pnorm(v, c[0]); }});
    cases.push_back({"l2", sample_groups, [](std::span<const ad::Var> v, std::span<const double>) {
                         return l2_penalty(v);
                     }});

    auto arch_sample = [](Rng& rng) {
        const std::size_t n = 1 + rng.index(8);
        return GradCheckInstance{{uniform_vector(rng, n, -1.0, 1.0), Tensor::scalar(rng.uniform(-6.0, 0.0))},
                                 {rng.uniform(0.3, 1.0)}};
    };
    cases.push_back({"arch-weights", arch_sample, [](std::span<const ad::Var> v, std::span<const double>) {
                         return readout(arch_weights(v[0], v[1], false));
                     }});
    cases.push_back({"arch-pnorm", arch_sample, [](std::span<const ad::Var> v, std::span<const double> c) {
                         return arch_pnorm_reg(arch_weights(v[0], v[1], false), c[0]);
                     }});

    cases.push_back({"structured-exp+group-pnorm",
                     [](Rng& rng) {
                         GradCheckInstance inst;
                         const std::size_t groups = 1 + rng.index(3);
                         for (std::size_t g = 0; g < groups; ++g) {
                             Tensor w = uniform_vector(rng, dim(rng), -2.0, 2.0);
                             const double beta = std::log(rng.uniform(0.1, 0.9) * std::max(norm2_of(w), 1e-3));
                             inst.leaves.push_back(w);
                             inst.leaves.push_back(Tensor::scalar(beta));
                         }
                         inst.constants = {rng.uniform(0.3, 1.0), rng.uniform(0.01, 1.0)};
                         return inst;
                     },
                     [](std::span<const ad::Var> v, std::span<const double> c) {
                         std::vector<ad::Var> eff;
                         ad::Var loss = v[0].tape->constant(0.0);
                         for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
                             eff.push_back(structured_reparam(v[i], v[i + 1], false));
                             loss = loss + readout(eff.back());
                         }
                         return objective(loss, group_pnorm(eff, c[0]), c[1]);
                     }});
    return cases;
}

GradCheckReport run_gradcheck(std::uint64_t seed, double step, std::span<const GradCheckCase> extra,
                              std::size_t instances) {
    GradCheckReport report;
    Rng rng(seed);
    std::vector<GradCheckCase> cases = default_gradcheck_cases();
    cases.insert(cases.end(), extra.begin(), extra.end());
    for (const auto& c : cases) report.lines.push_back(check_case(c, rng, instances, step));
    return report;
}

} // namespace dsparse
