#include "cohbudget/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cohbudget::opt {

GoldenResult golden_section_maximize(const std::function<double(double)>& f, double a,
                                     double b, double x_tol, int max_iter)
{
    if (!(a < b))
        throw std::invalid_argument("golden_section_maximize: need a < b");

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = f(c);
    double fd = f(d);

    int it = 0;
    while (it < max_iter && (b - a) > x_tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
        ++it;
    }
    GoldenResult r;
    r.x = fc > fd ? c : d;
    r.fx = std::max(fc, fd);
    r.iterations = it;
    return r;
}

namespace {

double sum_sq(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Gaussian elimination with partial pivoting; a is n x n row-major.
// Returns false on a (numerically) singular system.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& x)
{
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (int k = col; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double m = a[r * n + col] / a[col * n + col];
            for (int k = col; k < n; ++k) a[r * n + k] -= m * a[col * n + k];
            b[r] -= m * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return true;
}

} // namespace

LeastSquaresResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> p0, const std::vector<double>& lower,
    const std::vector<double>& upper, const LeastSquaresOptions& options)
{
    const int n = static_cast<int>(p0.size());
    if (lower.size() != p0.size() || upper.size() != p0.size())
        throw std::invalid_argument("levenberg_marquardt: bounds size mismatch");
    for (int j = 0; j < n; ++j) {
        if (!(lower[j] < upper[j]))
            throw std::invalid_argument("levenberg_marquardt: need lower < upper");
        p0[j] = std::clamp(p0[j], lower[j], upper[j]);
    }

    std::vector<double> r = residuals(p0);
    const int m = static_cast<int>(r.size());
    double cost = sum_sq(r);
    double lambda = options.lambda_init;

    LeastSquaresResult out;
    out.params = p0;
    out.cost = cost;

    std::vector<double> jac(static_cast<size_t>(m) * n);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        // Central-difference Jacobian with abscissae clamped to the box.
        for (int j = 0; j < n; ++j) {
            const double h = std::max(1e-7 * std::fabs(out.params[j]),
                                      1e-9 * (upper[j] - lower[j]));
            std::vector<double> pp = out.params, pm = out.params;
            pp[j] = std::min(out.params[j] + h, upper[j]);
            pm[j] = std::max(out.params[j] - h, lower[j]);
            const double denom = pp[j] - pm[j];
            const std::vector<double> rp = residuals(pp);
            const std::vector<double> rm = residuals(pm);
            for (int i = 0; i < m; ++i)
                jac[static_cast<size_t>(i) * n + j] = (rp[i] - rm[i]) / denom;
        }

        std::vector<double> jtj(static_cast<size_t>(n) * n, 0.0), jtr(n, 0.0);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                const double jij = jac[static_cast<size_t>(i) * n + j];
                jtr[j] += jij * r[i];
                for (int k = j; k < n; ++k)
                    jtj[static_cast<size_t>(j) * n + k] += jij * jac[static_cast<size_t>(i) * n + k];
            }
        }
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < j; ++k)
                jtj[static_cast<size_t>(j) * n + k] = jtj[static_cast<size_t>(k) * n + j];

        bool improved = false;
        for (int attempt = 0; attempt < 40 && !improved; ++attempt) {
            std::vector<double> damped = jtj;
            for (int j = 0; j < n; ++j) {
                double d = jtj[static_cast<size_t>(j) * n + j];
                if (d <= 0.0) d = 1.0;
                damped[static_cast<size_t>(j) * n + j] += lambda * d;
            }
            std::vector<double> neg_g(n), step;
            for (int j = 0; j < n; ++j) neg_g[j] = -jtr[j];
            if (!solve_dense(damped, neg_g, n, step)) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial(n);
            double step_rel = 0.0;
            for (int j = 0; j < n; ++j) {
                trial[j] = std::clamp(out.params[j] + step[j], lower[j], upper[j]);
                step_rel = std::max(step_rel, std::fabs(trial[j] - out.params[j]) /
                                                  (upper[j] - lower[j]));
            }
            const std::vector<double> rt = residuals(trial);
            const double trial_cost = sum_sq(rt);
            if (trial_cost < cost) {
                const double decrease = (cost - trial_cost) / std::max(cost, 1e-300);
                out.params = trial;
                r = rt;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (decrease < options.cost_tol || step_rel < options.step_tol) {
                    out.converged = true;
                }
            } else {
                lambda *= 4.0;
                if (lambda > 1e12) break;
            }
        }
        if (!improved) {
            // No damping level yields progress: local optimum (or cap reached).
            out.converged = true;
            break;
        }
        if (out.converged) break;
    }

    out.cost = cost;
    out.iterations = it + 1;
    out.at_lower.resize(n);
    out.at_upper.resize(n);
    for (int j = 0; j < n; ++j) {
        const double span = upper[j] - lower[j];
        out.at_lower[j] = out.params[j] - lower[j] <= 1e-9 * span;
        out.at_upper[j] = upper[j] - out.params[j] <= 1e-9 * span;
    }
    return out;
}

} // namespace cohbudget::opt
