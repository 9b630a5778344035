#pragma once
#include "repcov/interference.hpp"
#include "repcov/model.hpp"

#include <vector>

namespace repcov {

/// Success probability of one transmission at radius r_o: F_I evaluated at
/// P_t r_o^{-alpha}/theta - sigma2, averaged over the serving-link fading
/// when the channel is Rayleigh.
double p_single(double r_o, const CellConfig& cfg, const InterferenceCdf& cdf);

/// Selection combining over n independent tries: 1 - (1 - p1)^n.
double sc_success_from_single(double p1, int n);

double p_sc(double r_o, int n, const CellConfig& cfg, const InterferenceCdf& cdf);

/// Maximal ratio combining of n repetitions against one shared interference
/// draw: the summed branch gain is n (path loss only) or gamma(n,1)
/// distributed (Rayleigh), de-conditioned by generalized Gauss-Laguerre
/// quadrature, escalating to truncated adaptive integration for n > 60.
double p_mrc(double r_o, int n, const CellConfig& cfg, const InterferenceCdf& cdf);

/// gamma(n, 1) density u^{n-1} e^{-u} / (n-1)!.
double gamma_pdf(double u, int n);

/// Dispatch on the combiner kind with n taken from the profile at r_o.
double success_probability(double r_o, CombinerKind combiner, const RepetitionProfile& prof,
                           const CellConfig& cfg, const InterferenceCdf& cdf);

struct CoveragePoint {
    double r;
    int n;
    double p;
};

/// Success probability along a radius grid; grid points evaluate in
/// parallel with deterministic output ordering.
std::vector<CoveragePoint> coverage_profile(CombinerKind combiner, const RepetitionProfile& prof,
                                            const CellConfig& cfg, const InterferenceCdf& cdf,
                                            const std::vector<double>& r_grid, int threads = 1);

/// Success probability averaged over the radial device distribution;
/// NoRepetition averages against the uniform-disk weight.
double cell_average_coverage(CombinerKind combiner, const RepetitionProfile& prof,
                             const CellConfig& cfg, const InterferenceCdf& cdf);

} // namespace repcov
