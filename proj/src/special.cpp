#include "cohbudget/special.hpp"

#include <cmath>
#include <stdexcept>

namespace cohbudget {

double erfc(double x) { return std::erfc(x); }

namespace {

// Rational Chebyshev starting guess for erf_inv (Blair, Edwards & Johnson,
// Math. Comp. 30, 1976). Max relative error ~4.5e-8, then polished below.
double erf_inv_estimate(double z)
{
    const double az = std::fabs(z);
    double t, est;
    if (az <= 0.75) {
        static const double p[] = {-13.0959967422, 26.785225760, -9.289057635};
        static const double q[] = {-12.0749426297, 30.960614529, -17.149977991, 1.0};
        t = z * z - 0.75 * 0.75;
        est = z * (p[0] + t * (p[1] + t * p[2])) /
              (q[0] + t * (q[1] + t * (q[2] + t * q[3])));
    } else if (az <= 0.9375) {
        static const double p[] = {-0.12402565221, 1.0688059574, -1.9594556078, 0.4230581357};
        static const double q[] = {-0.08827697997, 0.8900743359, -2.1757031196, 1.0};
        t = z * z - 0.9375 * 0.9375;
        est = z * (p[0] + t * (p[1] + t * (p[2] + t * p[3]))) /
              (q[0] + t * (q[1] + t * (q[2] + t * q[3])));
    } else {
        static const double p[] = {0.1550470003116,  1.382719649631, 0.690969348887,
                                   -1.128081391617, 0.680544246825, -0.16444156791};
        static const double q[] = {0.155024849822, 1.385228141995, 1.0};
        t = 1.0 / std::sqrt(-std::log(1.0 - az));
        est = std::copysign(
            (p[0] / t + p[1] + t * (p[2] + t * (p[3] + t * (p[4] + t * p[5])))) /
                (q[0] + t * (q[1] + t * q[2])),
            z);
    }
    return est;
}

} // namespace

double erfc_inv(double y)
{
    if (!(y > 0.0) || !(y < 2.0))
        throw std::domain_error("erfc_inv: argument must lie in (0, 2)");
    if (y == 1.0)
        return 0.0;

    double x = erf_inv_estimate(1.0 - y);

    // Newton on erfc(x) - y; derivative is -2/sqrt(pi) * exp(-x^2).
    constexpr double two_over_sqrt_pi = 1.1283791670955126;
    for (int i = 0; i < 2; ++i) {
        const double d = two_over_sqrt_pi * std::exp(-x * x);
        if (d == 0.0)
            break;
        x += (std::erfc(x) - y) / d;
    }
    return x;
}

} // namespace cohbudget
