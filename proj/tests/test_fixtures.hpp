#pragma once
#include "repcov/interference.hpp"
#include "repcov/model.hpp"
#include "repcov/units.hpp"

// Shared reference-cell objects; cached CDFs are built once per test binary.
namespace fixtures {

inline repcov::CellConfig cell(repcov::Channel ch, double theta = 1.0) {
    repcov::CellConfig cfg;
    cfg.lambda_o = 2e-4;
    cfg.R_c = 1000.0;
    cfg.alpha = 3.5;
    cfg.P_t = 1.0;
    cfg.sigma2 = repcov::noise_power(180e3, 3.0);
    cfg.theta = theta;
    cfg.channel = ch;
    return cfg;
}

inline repcov::RepetitionProfile fig4_profile() {
    return repcov::RepetitionProfile::logistic(50.0, 1050.0, 0.01);
}

// cached CDF for the constant-duty (no repetition) interferer field
inline const repcov::InterferenceCdf& norep_cdf(repcov::Channel ch) {
    static auto pl = repcov::InterferenceCdf::with_cache(
        repcov::LaplaceSpec{repcov::Channel::PathLossOnly,
                            repcov::RepetitionProfile::constant(0.01),
                            cell(repcov::Channel::PathLossOnly)},
        192);
    static auto ray = repcov::InterferenceCdf::with_cache(
        repcov::LaplaceSpec{repcov::Channel::RayleighFading,
                            repcov::RepetitionProfile::constant(0.01),
                            cell(repcov::Channel::RayleighFading)},
        192);
    return ch == repcov::Channel::PathLossOnly ? pl : ray;
}

// cached CDF for the (a=50, b=1050) profile interferer field
inline const repcov::InterferenceCdf& fig4_cdf(repcov::Channel ch) {
    static auto pl = repcov::InterferenceCdf::with_cache(
        repcov::LaplaceSpec{repcov::Channel::PathLossOnly, fig4_profile(),
                            cell(repcov::Channel::PathLossOnly)},
        192);
    static auto ray = repcov::InterferenceCdf::with_cache(
        repcov::LaplaceSpec{repcov::Channel::RayleighFading, fig4_profile(),
                            cell(repcov::Channel::RayleighFading)},
        192);
    return ch == repcov::Channel::PathLossOnly ? pl : ray;
}

} // namespace fixtures
