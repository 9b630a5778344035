#include "repcov/model.hpp"
#include "repcov/quadrature.hpp"
#include "repcov/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace repcov {

namespace {

// ceil with an integer-tie fuzz: values within a few ulp of an integer k are
// taken as k itself, so round-off in the logistic never bumps N by one.
int ceil_snapped(double q) {
    const double k = std::nearbyint(q);
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(q));
    if (std::fabs(q - k) <= tol) return static_cast<int>(k);
    return static_cast<int>(std::ceil(q));
}

} // namespace

RepetitionProfile::RepetitionProfile(double a, double b, double d, bool constant)
    : steepness_(a), midpoint_(b), base_duty_(d), constant_(constant) {}

RepetitionProfile RepetitionProfile::logistic(double steepness_m, double midpoint_m, double base_duty) {
    if (!(steepness_m > 0.0)) throw std::invalid_argument("RepetitionProfile: steepness a must be > 0");
    if (!(midpoint_m >= 0.0)) throw std::invalid_argument("RepetitionProfile: midpoint b must be >= 0");
    if (!(base_duty > 0.0 && base_duty <= 1.0))
        throw std::invalid_argument("RepetitionProfile: base duty cycle D_o must be in (0,1]");
    return RepetitionProfile(steepness_m, midpoint_m, base_duty, false);
}

RepetitionProfile RepetitionProfile::constant(double base_duty) {
    if (!(base_duty > 0.0 && base_duty <= 1.0))
        throw std::invalid_argument("RepetitionProfile: base duty cycle D_o must be in (0,1]");
    return RepetitionProfile(0.0, 0.0, base_duty, true);
}

double RepetitionProfile::psi(double r) const {
    if (constant_) return 0.0;
    // 1/(1+exp(-(r-b)/a)); exp argument clamps itself: exp(large) -> inf -> psi -> 0.
    return 1.0 / (1.0 + std::exp(-(r - midpoint_) / steepness_));
}

double RepetitionProfile::duty_cycle(double r) const {
    return base_duty_ + (1.0 - base_duty_) * psi(r);
}

int RepetitionProfile::repetitions(double r) const {
    if (constant_) return 1;
    const double q = 1.0 + (1.0 - base_duty_) / base_duty_ * psi(r);
    const int n = ceil_snapped(q);
    return std::clamp(n, 1, max_repetitions());
}

int RepetitionProfile::max_repetitions() const {
    if (constant_) return 1;
    return ceil_snapped(1.0 / base_duty_);
}

std::vector<double> RepetitionProfile::repetition_step_radii(double r_max) const {
    std::vector<double> radii;
    if (constant_) return radii;
    const int n_max = max_repetitions();
    for (int k = 2; k < n_max; ++k) {
        // N steps k -> k+1 where 1 + (1-D_o)/D_o psi == k.
        const double y = (k - 1) * base_duty_ / (1.0 - base_duty_);
        if (y <= 0.0 || y >= 1.0) continue;
        const double r = midpoint_ + steepness_ * std::log(y / (1.0 - y));
        if (r > 0.0 && r < r_max) radii.push_back(r);
    }
    std::sort(radii.begin(), radii.end());
    return radii;
}

void CellConfig::validate() const {
    if (!(lambda_o > 0.0)) throw std::invalid_argument("CellConfig: lambda_o must be > 0");
    if (!(R_c > 0.0)) throw std::invalid_argument("CellConfig: R_c must be > 0");
    if (!(alpha > 2.0)) throw std::invalid_argument("CellConfig: alpha must be > 2");
    if (!(P_t > 0.0)) throw std::invalid_argument("CellConfig: P_t must be > 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("CellConfig: sigma2 must be >= 0");
    if (!(theta > 0.0)) throw std::invalid_argument("CellConfig: theta must be > 0");
}

double effective_density(double r, const RepetitionProfile& prof, const CellConfig& cfg) {
    return cfg.lambda_o * prof.duty_cycle(r);
}

double cell_constant(const RepetitionProfile& prof, const CellConfig& cfg) {
    if (prof.is_constant())
        return std::numbers::pi * cfg.R_c * cfg.R_c * prof.base_duty();
    const auto integrand = [&](double r) { return 2.0 * std::numbers::pi * r * prof.duty_cycle(r); };
    return integrate(integrand, 0.0, cfg.R_c, 1e-10, 1e-14);
}

double radial_pdf(double r, const RepetitionProfile& prof, const CellConfig& cfg) {
    if (r < 0.0 || r > cfg.R_c)
        throw std::domain_error("radial_pdf: r must lie in [0, R_c], got " + std::to_string(r));
    return 2.0 * std::numbers::pi * r * prof.duty_cycle(r) / cell_constant(prof, cfg);
}

double average_over_cell(const std::function<double(double)>& fn,
                         const RepetitionProfile& prof, const CellConfig& cfg) {
    std::vector<double> cuts = prof.repetition_step_radii(cfg.R_c);
    cuts.insert(cuts.begin(), 0.0);
    cuts.push_back(cfg.R_c);

    // Fixed composite panels: adaptive refinement buys nothing against the
    // interpolation-level roughness of cache-backed integrands, and sharing
    // panels between numerator and normalizer makes fn == const exact.
    const double target = cfg.R_c / 512.0;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double width = cuts[i + 1] - cuts[i];
        if (width <= 0.0) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil(width / target)));
        for (int k = 0; k < panels; ++k) {
            const double lo = cuts[i] + width * k / panels;
            const double hi = cuts[i] + width * (k + 1) / panels;
            num += gk15_fixed([&](double r) {
                return fn(r) * 2.0 * std::numbers::pi * r * prof.duty_cycle(r);
            }, lo, hi);
            den += gk15_fixed([&](double r) {
                return 2.0 * std::numbers::pi * r * prof.duty_cycle(r);
            }, lo, hi);
        }
    }
    return num / den;
}

double noise_power(double bandwidth_hz, double noise_figure_db) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be > 0");
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return dbm_to_watt(dbm);
}

} // namespace repcov
