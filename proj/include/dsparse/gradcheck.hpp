#pragma once

// Central finite-difference checks of tape gradients.
//
// A case samples leaf values plus fixed constants and rebuilds its scalar
// function on a fresh tape for every evaluation. Instances where a kinked
// operation (relu, abs, sign, custom gradients, norm at the origin) sees an
// input within kKinkDistance of its kink are resampled.

#include "dsparse/autodiff.hpp"
#include "dsparse/rng.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dsparse {

inline constexpr double kGradCheckTolerance = 1e-4;
inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kKinkDistance = 1e-3;
/// Denominator floor of the relative error.
inline constexpr double kRelErrorFloor = 1e-3;
inline constexpr std::size_t kGradCheckInstances = 100;

struct GradCheckInstance {
    std::vector<Tensor> leaves;
    std::vector<double> constants;
};

struct GradCheckCase {
    std::string name;
    std::function<GradCheckInstance(Rng&)> sample;
    std::function<ad::Var(std::span<const ad::Var> leaves, std::span<const double> constants)> evaluate;
};

struct GradCheckLine {
    std::string name;
    std::size_t instances = 0;
    std::size_t resampled = 0;
    double max_rel_error = 0.0;
    bool passed = false;
    std::string error; // set when the case could not be evaluated
};

struct GradCheckReport {
    std::vector<GradCheckLine> lines;
    bool passed() const;
};

double relative_error(double analytic, double numeric);
bool near_kink(const ad::Tape& tape, double distance = kKinkDistance);

GradCheckLine check_case(const GradCheckCase& c, Rng& rng, std::size_t instances = kGradCheckInstances,
                         double step = kGradCheckStep);

/// The built-in suite: every re-parameterization, regularizer and the
/// architecture-weight functions.
std::vector<GradCheckCase> default_gradcheck_cases();

GradCheckReport run_gradcheck(std::uint64_t seed, double step = kGradCheckStep,
                              std::span<const GradCheckCase> extra = {},
                              std::size_t instances = kGradCheckInstances);

} // namespace dsparse
