#pragma once
#include <functional>
#include <vector>

namespace repcov {

enum class Channel { PathLossOnly, RayleighFading };

enum class CombinerKind { NoRepetition, SelectionCombining, MaximalRatioCombining };

/// Distance-dependent repetition profile. A device at radius r transmits
/// N(r) copies of each frame, raising its duty cycle from the base value
/// D_o up to 1 as the logistic profile psi(r) saturates.
class RepetitionProfile {
public:
    /// psi(r) = 1 / (1 + exp(-(r - midpoint)/steepness)).
    static RepetitionProfile logistic(double steepness_m, double midpoint_m, double base_duty);

    /// Degenerate profile with psi == 0 everywhere (D(r) == D_o, N == 1).
    /// Used for the no-repetition baseline; keeps an exact constant-duty
    /// code path so baselines do not pick up logistic round-off.
    static RepetitionProfile constant(double base_duty);

    double psi(double r) const;
    double duty_cycle(double r) const;   // D(r) = D_o + (1 - D_o) psi(r), in [D_o, 1]
    int repetitions(double r) const;     // N(r) = ceil(1 + (1-D_o)/D_o psi(r))
    int max_repetitions() const;         // ceil(1/D_o)

    /// Radii in (0, r_max) where N(r) steps from k to k+1, ascending.
    std::vector<double> repetition_step_radii(double r_max) const;

    double base_duty() const { return base_duty_; }
    double steepness() const { return steepness_; }
    double midpoint() const { return midpoint_; }
    bool is_constant() const { return constant_; }

private:
    RepetitionProfile(double a, double b, double d, bool constant);
    double steepness_;
    double midpoint_;
    double base_duty_;
    bool constant_;
};

/// Static cell geometry, channel and radio configuration. Powers are linear
/// watts and the SINR threshold is linear; convert at the parsing boundary.
struct CellConfig {
    double lambda_o; // device density, devices/m^2
    double R_c;      // cell radius, m
    double alpha;    // path-loss exponent, > 2
    double P_t;      // transmit power, W
    double sigma2;   // average noise power, W
    double theta;    // SINR threshold, linear
    Channel channel = Channel::RayleighFading;

    void validate() const; // throws std::invalid_argument naming the bad field
};

/// lambda(r) = lambda_o * D(r); density of devices transmitting at a snapshot.
double effective_density(double r, const RepetitionProfile& prof, const CellConfig& cfg);

/// Cell constant eta(R_c) = integral_0^{R_c} 2 pi r D(r) dr. Normalizes the
/// duty-cycle-weighted radial distance function into a pdf. Exact closed form
/// pi R_c^2 D_o on the constant-duty path.
double cell_constant(const RepetitionProfile& prof, const CellConfig& cfg);

/// Radial distance pdf f_r(r) = 2 pi r D(r) / eta(R_c) on [0, R_c].
double radial_pdf(double r, const RepetitionProfile& prof, const CellConfig& cfg);

/// Integral of fn against the radial pdf over [0, R_c]. Panels split at the
/// repetition step radii (so integrands that jump with N(r) stay smooth per
/// panel), and the pdf normalizer is accumulated on the same panels, which
/// cancels the discretization bias exactly for constant fn.
double average_over_cell(const std::function<double(double)>& fn,
                         const RepetitionProfile& prof, const CellConfig& cfg);

/// Receiver noise power in W: -174 dBm/Hz thermal floor + 10log10(B) + F.
double noise_power(double bandwidth_hz, double noise_figure_db);

} // namespace repcov
