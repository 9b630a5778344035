#include "repcov/energy.hpp"

#include <stdexcept>

namespace repcov {

void EnergyParams::validate() const {
    if (!(eta_eps >= 1.0)) throw std::invalid_argument("EnergyParams: eta_eps must be >= 1");
    if (!(P_t > 0.0)) throw std::invalid_argument("EnergyParams: P_t must be > 0");
    if (!(P_O > 0.0)) throw std::invalid_argument("EnergyParams: P_O must be > 0");
    if (!(T_m > 0.0)) throw std::invalid_argument("EnergyParams: T_m must be > 0");
}

double energy_single(const EnergyParams& ep) { return (ep.eta_eps * ep.P_t + ep.P_O) * ep.T_m; }

double energy_n(double r, const EnergyParams& ep, const RepetitionProfile& prof) {
    return energy_single(ep) * prof.repetitions(r);
}

double energy_wasted(double r_o, CombinerKind combiner, const EnergyParams& ep,
                     const RepetitionProfile& prof, const CellConfig& cfg,
                     const InterferenceCdf& cdf) {
    const int n = combiner == CombinerKind::NoRepetition ? 1 : prof.repetitions(r_o);
    const double p = success_probability(r_o, combiner, prof, cfg, cdf);
    return energy_single(ep) * n * (1.0 - p);
}

double cell_avg_wasted(CombinerKind combiner, const EnergyParams& ep,
                       const RepetitionProfile& prof, const CellConfig& cfg,
                       const InterferenceCdf& cdf) {
    const RepetitionProfile weight = combiner == CombinerKind::NoRepetition
                                         ? RepetitionProfile::constant(prof.base_duty())
                                         : prof;
    return average_over_cell(
        [&](double r) { return energy_wasted(r, combiner, ep, prof, cfg, cdf); }, weight, cfg);
}

} // namespace repcov
