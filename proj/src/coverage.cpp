#include "repcov/coverage.hpp"
#include "repcov/parallel.hpp"
#include "repcov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace repcov {

namespace {

constexpr int kLaguerreNodes = 64;
constexpr int kMaxLaguerreShape = 60; // beyond this, switch to adaptive truncation

void check_query(double r_o, const CellConfig& cfg, const InterferenceCdf& cdf) {
    if (!(r_o > 0.0 && r_o <= cfg.R_c))
        throw std::invalid_argument("coverage: r_o must lie in (0, R_c]");
    if (cdf.spec().channel != cfg.channel)
        throw std::invalid_argument("coverage: interference CDF channel does not match cfg");
}

// signal power / theta at unit fading gain
double scaled_signal(double r_o, const CellConfig& cfg) {
    return cfg.P_t * std::pow(r_o, -cfg.alpha) / cfg.theta;
}

double cdf_at(const InterferenceCdf& cdf, double x) {
    if (std::isinf(x)) return x > 0.0 ? 1.0 : 0.0; // r_o -> 0 saturates F to 1
    return cdf.value(x);
}

// E[F(signal u - sigma2)] under the normalized weight u^{shape-1} e^{-u}
double laguerre_expectation(const InterferenceCdf& cdf, double signal, double sigma2, int shape) {
    const LaguerreRule& rule = laguerre_rule(kLaguerreNodes, shape - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * cdf_at(cdf, signal * rule.nodes[i] - sigma2);
    return std::clamp(acc, 0.0, 1.0);
}

} // namespace

double p_single(double r_o, const CellConfig& cfg, const InterferenceCdf& cdf) {
    check_query(r_o, cfg, cdf);
    const double signal = scaled_signal(r_o, cfg);
    if (cfg.channel == Channel::PathLossOnly)
        return cdf_at(cdf, signal - cfg.sigma2);
    return laguerre_expectation(cdf, signal, cfg.sigma2, 1);
}

double sc_success_from_single(double p1, int n) {
    if (n < 1) throw std::invalid_argument("sc_success_from_single: n must be >= 1");
    if (n == 1) return p1;
    return 1.0 - std::pow(1.0 - p1, n);
}

double p_sc(double r_o, int n, const CellConfig& cfg, const InterferenceCdf& cdf) {
    return sc_success_from_single(p_single(r_o, cfg, cdf), n);
}

double p_mrc(double r_o, int n, const CellConfig& cfg, const InterferenceCdf& cdf) {
    check_query(r_o, cfg, cdf);
    if (n < 1) throw std::invalid_argument("p_mrc: n must be >= 1");
    const double signal = scaled_signal(r_o, cfg);
    if (cfg.channel == Channel::PathLossOnly)
        return cdf_at(cdf, n * signal - cfg.sigma2);
    if (n <= kMaxLaguerreShape)
        return laguerre_expectation(cdf, signal, cfg.sigma2, n);
    // generalized-Laguerre weights degrade for large shapes; integrate the
    // gamma density directly on the interval carrying all but ~1e-30 mass
    const double hi = n + 12.0 * std::sqrt(static_cast<double>(n));
    const double p = integrate(
        [&](double u) { return cdf_at(cdf, signal * u - cfg.sigma2) * gamma_pdf(u, n); }, 0.0, hi,
        1e-8, 1e-12);
    return std::clamp(p, 0.0, 1.0);
}

double gamma_pdf(double u, int n) {
    if (n < 1) throw std::invalid_argument("gamma_pdf: n must be >= 1");
    if (u < 0.0) throw std::invalid_argument("gamma_pdf: u must be >= 0");
    if (u == 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp((n - 1) * std::log(u) - u - std::lgamma(static_cast<double>(n)));
}

double success_probability(double r_o, CombinerKind combiner, const RepetitionProfile& prof,
                           const CellConfig& cfg, const InterferenceCdf& cdf) {
    switch (combiner) {
        case CombinerKind::NoRepetition:
            if (!cdf.spec().prof.is_constant())
                throw std::invalid_argument(
                    "coverage: NoRepetition requires a CDF built with the constant D_o profile");
            return p_single(r_o, cfg, cdf);
        case CombinerKind::SelectionCombining:
            return p_sc(r_o, prof.repetitions(r_o), cfg, cdf);
        case CombinerKind::MaximalRatioCombining:
            return p_mrc(r_o, prof.repetitions(r_o), cfg, cdf);
    }
    throw std::logic_error("success_probability: unknown combiner");
}

std::vector<CoveragePoint> coverage_profile(CombinerKind combiner, const RepetitionProfile& prof,
                                            const CellConfig& cfg, const InterferenceCdf& cdf,
                                            const std::vector<double>& r_grid, int threads) {
    std::vector<CoveragePoint> out(r_grid.size());
    parallel_chunks(static_cast<long>(r_grid.size()), threads, [&](long lo, long hi, int) {
        for (long i = lo; i < hi; ++i) {
            const double r = r_grid[i];
            const int n = combiner == CombinerKind::NoRepetition ? 1 : prof.repetitions(r);
            out[i] = CoveragePoint{r, n, success_probability(r, combiner, prof, cfg, cdf)};
        }
    });
    return out;
}

double cell_average_coverage(CombinerKind combiner, const RepetitionProfile& prof,
                             const CellConfig& cfg, const InterferenceCdf& cdf) {
    const RepetitionProfile weight = combiner == CombinerKind::NoRepetition
                                         ? RepetitionProfile::constant(prof.base_duty())
                                         : prof;
    const double avg = average_over_cell(
        [&](double r) { return success_probability(r, combiner, prof, cfg, cdf); }, weight, cfg);
    return std::clamp(avg, 0.0, 1.0);
}

} // namespace repcov
