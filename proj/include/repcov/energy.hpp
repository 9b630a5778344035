#pragma once
#include "repcov/coverage.hpp"
#include "repcov/interference.hpp"
#include "repcov/model.hpp"

namespace repcov {

/// Joule accounting inputs for one uplink frame.
struct EnergyParams {
    double eta_eps; // power-amplifier conversion factor, >= 1
    double P_t;     // RF transmit power, W
    double P_O;     // overhead power while transmitting, W
    double T_m;     // time on air per frame, s

    void validate() const;
};

/// Energy of a single transmission: (eta_eps P_t + P_O) T_m.
double energy_single(const EnergyParams& ep);

/// Energy of the full repetition burst at radius r: energy_single * N(r).
/// Overhead power is drawn for every repetition (the radio stays active).
double energy_n(double r, const EnergyParams& ep, const RepetitionProfile& prof);

/// Expected wasted energy at r_o: the whole burst is lost when no repetition
/// succeeds, with each combiner's own error probability.
double energy_wasted(double r_o, CombinerKind combiner, const EnergyParams& ep,
                     const RepetitionProfile& prof, const CellConfig& cfg,
                     const InterferenceCdf& cdf);

/// Wasted energy averaged over the radial device distribution.
double cell_avg_wasted(CombinerKind combiner, const EnergyParams& ep,
                       const RepetitionProfile& prof, const CellConfig& cfg,
                       const InterferenceCdf& cdf);

} // namespace repcov
