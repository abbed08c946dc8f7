#pragma once

#include <functional>
#include <vector>

namespace cohbudget::opt {

struct GoldenResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Golden-section maximization of a unimodal f on [a, b]. Stops when the
/// bracket shrinks below x_tol or after max_iter interval reductions.
GoldenResult golden_section_maximize(const std::function<double(double)>& f, double a,
                                     double b, double x_tol, int max_iter = 200);

struct LeastSquaresOptions {
    int max_iterations = 200;
    double cost_tol = 1e-14;   // relative cost decrease considered converged
    double step_tol = 1e-12;   // relative parameter step considered converged
    double lambda_init = 1e-3;
};

struct LeastSquaresResult {
    std::vector<double> params;
    double cost = 0.0; // sum of squared residuals at the solution
    int iterations = 0;
    bool converged = false;
    std::vector<bool> at_lower;
    std::vector<bool> at_upper;
};

/// Box-constrained Levenberg-Marquardt on residuals(p). Numeric Jacobian
/// (central differences, clamped to the box). Deterministic: identical
/// inputs yield identical iterates. The accepted cost sequence is
/// non-increasing by construction.
LeastSquaresResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p0, const std::vector<double>& lower,
    const std::vector<double>& upper, const LeastSquaresOptions& options = {});

} // namespace cohbudget::opt
