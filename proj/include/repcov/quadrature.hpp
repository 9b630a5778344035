#pragma once
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace repcov {

struct QuadratureDiagnostics {
    double achieved_abs_error = 0.0; // summed panel error estimates
    double worst_lo = 0.0;           // worst remaining subinterval
    double worst_hi = 0.0;
    double worst_error = 0.0;
    int panels = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, QuadratureDiagnostics d)
        : std::runtime_error(msg + " (achieved " + std::to_string(d.achieved_abs_error) +
                             ", worst subinterval [" + std::to_string(d.worst_lo) + ", " +
                             std::to_string(d.worst_hi) + "] err " + std::to_string(d.worst_error) +
                             ", " + std::to_string(d.panels) + " panels)"),
          diagnostics(d) {}
    QuadratureDiagnostics diagnostics;
};

/// Globally adaptive Gauss-Kronrod 15 on [lo, hi]. Accepts when the summed
/// error estimate drops below max(rel_tol * |I|, abs_floor). Throws
/// QuadratureError carrying the worst subinterval when the panel budget runs
/// out first.
double integrate(const std::function<double(double)>& fn, double lo, double hi,
                 double rel_tol, double abs_floor, QuadratureDiagnostics* diag = nullptr);

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& fn,
                                       double lo, double hi, double rel_tol, double abs_floor,
                                       QuadratureDiagnostics* diag = nullptr);

/// Gauss-Laguerre rule for the weight u^alpha e^{-u} on [0, inf), with the
/// weights normalized by Gamma(alpha + 1) so they sum to one. alpha is the
/// integer gamma shape minus one; alpha = 0 is the plain Laguerre rule.
struct LaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights; // sum to 1
};

const LaguerreRule& laguerre_rule(int n, int alpha);

/// One non-adaptive Gauss-Kronrod 15 panel over [lo, hi].
double gk15_fixed(const std::function<double(double)>& fn, double lo, double hi);

} // namespace repcov
