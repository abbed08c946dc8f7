#pragma once

namespace cohbudget {

// Complementary error function (thin wrapper so the whole model shares one
// evaluation path; libm erfc is good to a few ulp).
double erfc(double x);

// Inverse of erfc on (0, 2). erfc(erfc_inv(y)) == y to better than 1e-10
// relative. Throws std::domain_error outside the open interval.
double erfc_inv(double y);

} // namespace cohbudget
