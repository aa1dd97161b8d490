#pragma once

namespace dsparse {

/// Cubic ramp of the regularization weight from lambda_i to lambda_f over n
/// epochs starting at epoch t0; constant outside the ramp.
struct LambdaSchedule {
    double lambda_i = 0.0;
    double lambda_f = 0.0;
    long t0 = 0;
    long n = 1;

    void validate() const;
};

double lambda_at(const LambdaSchedule& s, long epoch);

} // namespace dsparse
