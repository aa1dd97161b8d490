#include "dsparse/schedule.hpp"

#include "dsparse/errors.hpp"

namespace dsparse {

void LambdaSchedule::validate() const {
    if (n < 1) throw ConfigError("schedule span n must be at least 1", "n");
    if (!(lambda_i >= 0.0)) throw ConfigError("lambda_i must be non-negative", "lambda_i");
    if (!(lambda_f >= 0.0)) throw ConfigError("lambda_f must be non-negative", "lambda_f");
}

double lambda_at(const LambdaSchedule& s, long epoch) {
    if (epoch <= s.t0) return s.lambda_i;
    if (epoch >= s.t0 + s.n) return s.lambda_f;
    const double r = 1.0 - static_cast<double>(epoch - s.t0) / static_cast<double>(s.n);
    return s.lambda_f + (s.lambda_i - s.lambda_f) * (r * r * r);
}

} // namespace dsparse
