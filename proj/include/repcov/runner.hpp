#pragma once
#include "repcov/config.hpp"
#include "repcov/interference.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace repcov {

/// Command-line overrides; file values apply where these are empty.
struct RunOverrides {
    std::optional<CombinerKind> combiner;
    std::optional<Channel> channel;
    std::optional<SweepSpec> sweep;
    std::optional<long> mc_trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    std::optional<OutputFormat> format;
    bool with_mc = false;
    int threads = 0;
    int euler_depth = kDefaultEulerDepth;
    int cache_grid = 256;
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& ov);

std::vector<double> sweep_grid(const SweepSpec& sweep);

/// Success-probability curve over an r sweep; optional Monte Carlo columns.
void run_coverage(const ExperimentConfig& cfg, const RunOverrides& ov, std::ostream& log);

/// Wasted-energy curve over an r sweep, or cell-average wasted energy over a
/// profile-midpoint (b) sweep with the no-repetition baseline column.
void run_energy(const ExperimentConfig& cfg, const RunOverrides& ov, std::ostream& log);

/// Analytic-vs-Monte-Carlo cross-validation report (JSON). Returns false
/// when any check fails.
bool run_validate(const ExperimentConfig& cfg, const RunOverrides& ov, std::ostream& log);

/// Empirical interference CDF against the numerical inversion.
void run_mc_cdf(const ExperimentConfig& cfg, const RunOverrides& ov, std::ostream& log);

} // namespace repcov
