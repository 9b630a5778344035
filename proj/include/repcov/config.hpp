#pragma once
#include "repcov/energy.hpp"
#include "repcov/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace repcov {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class OutputFormat { Csv, Json };

struct SweepSpec {
    std::string axis; // "r" or "b", meters
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
    bool log_scale = false;
};

/// One experiment: declarative file with explicit unit suffixes on every
/// dimensioned quantity (lengths "m"/"km", powers "W"/"mW"/"dBm", ratios
/// "dB"/"linear", densities "per_m2"/"per_km2", times "s"/"ms", frequencies
/// "Hz"/"kHz"/"MHz"). Omitting a unit is a hard error. sigma2 may instead be
/// derived from bandwidth + noise_figure.
struct ExperimentConfig {
    CellConfig cell;
    double prof_a = 0.0; // logistic steepness, m
    double prof_b = 0.0; // logistic midpoint, m
    double prof_d0 = 0.0;
    EnergyParams energy{1.0, 1.0, 1.0, 1.0}; // P_t mirrors cell.P_t
    long mc_trials = 0;
    std::uint64_t mc_seed = 0;
    SweepSpec sweep;
    std::string out_path;
    OutputFormat format = OutputFormat::Csv;

    RepetitionProfile profile() const {
        return RepetitionProfile::logistic(prof_a, prof_b, prof_d0);
    }
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical serialization: units normalized (W, m, linear, per_m2, s),
/// floats at full round-trip precision. parse(canonical(c)) == c, which is
/// what makes the emitted-header round trip exact.
std::string canonical_config_text(const ExperimentConfig& cfg);

/// Parses the "# "-prefixed canonical block that run outputs embed.
ExperimentConfig parse_embedded_config(const std::string& output_file_text);

std::string combiner_name(CombinerKind combiner);
CombinerKind combiner_from_name(const std::string& name);
std::string channel_name(Channel ch);
Channel channel_from_name(const std::string& name);

SweepSpec parse_sweep_flag(const std::string& flag); // AXIS:START:STOP:COUNT[:log]

} // namespace repcov
