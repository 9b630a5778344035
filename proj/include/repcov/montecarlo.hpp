#pragma once
#include "repcov/energy.hpp"
#include "repcov/model.hpp"

#include <cstdint>
#include <vector>

namespace repcov {

/// Counter-seeded xoshiro256++ stream. One independent stream per trial
/// index, so estimates are bit-identical no matter how trials are split
/// across threads.
class TrialRng {
public:
    TrialRng(std::uint64_t seed, std::uint64_t trial);

    std::uint64_t next_u64();
    double uniform01();    // [0, 1), 53-bit
    double exponential();  // Exp(1)
    long poisson(double mean);

private:
    std::uint64_t s_[4];
};

enum class BranchModel { IndependentPerRepetition, SharedInterference };

/// Sampling scheme that mirrors each combiner's analytic assumption.
BranchModel default_branch_model(CombinerKind combiner);

struct McConfig {
    long trials = 100000;
    std::uint64_t seed = 1;
    BranchModel branch_model = BranchModel::IndependentPerRepetition;
    CellConfig cfg;
    RepetitionProfile prof = RepetitionProfile::constant(0.01);
    int threads = 0; // <= 0: hardware concurrency

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0; // 1.96 sqrt(var / trials)
    long trials = 0;
    std::uint64_t seed = 0;
};

/// One draw of the aggregate interference power: Poisson(lambda_o pi R_c^2)
/// candidates uniform on the disk, kept with probability D(r), summed as
/// P_t h r^{-alpha} with h = 1 (path loss only) or Exp(1) (Rayleigh).
/// retained, when given, receives the kept-interferer count.
double sample_interference(TrialRng& rng, const CellConfig& cfg, const RepetitionProfile& prof,
                           long* retained = nullptr);

/// Success-rate estimate at radius r_o for the given combiner. Selection
/// combining draws a fresh interferer field per repetition; maximal ratio
/// combining shares one field and sums the branch fading; no-repetition
/// uses the constant-D_o field.
McEstimate estimate_coverage(const McConfig& mc, double r_o, CombinerKind combiner);

/// Cell-wide wasted-energy estimate: device radius sampled from the radial
/// pdf by inverse-CDF, full burst energy charged on failure.
McEstimate estimate_wasted_energy(const McConfig& mc, CombinerKind combiner,
                                  const EnergyParams& ep);

/// n interference draws (trial indices 0..n-1), unsorted.
std::vector<double> sample_interference_batch(const McConfig& mc, long n);

} // namespace repcov
