#pragma once
#include <cmath>
#include <complex>

// Brute-force reference integrators for cross-checking the adaptive
// quadrature and the analytic modules. Deliberately independent of the
// library's numerics.
namespace oracle {

template <typename F>
double simpson(F f, double a, double b, long n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
    return s * h / 3.0;
}

template <typename F>
std::complex<double> simpson_complex(F f, double a, double b, long n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    std::complex<double> s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += f(a + i * h) * ((i & 1) ? 4.0 : 2.0);
    return s * (h / 3.0);
}

} // namespace oracle
