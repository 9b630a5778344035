#include "repcov/montecarlo.hpp"
#include "repcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace repcov {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (trial + 0x632BE59BD9B4E019ULL));
    for (auto& s : s_) s = splitmix64(x);
    if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t TrialRng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double TrialRng::uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

double TrialRng::exponential() { return -std::log1p(-uniform01()); }

long TrialRng::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
        // product method; exp(-mean) >= 4.5e-5 here, no underflow
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }
    // Hoermann's PTRS transformed rejection
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    while (true) {
        const double u = uniform01() - 0.5;
        const double v = uniform01();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0))
            return static_cast<long>(k);
    }
}

BranchModel default_branch_model(CombinerKind combiner) {
    return combiner == CombinerKind::MaximalRatioCombining ? BranchModel::SharedInterference
                                                           : BranchModel::IndependentPerRepetition;
}

void McConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("McConfig: trials must be >= 1");
    cfg.validate();
}

double sample_interference(TrialRng& rng, const CellConfig& cfg, const RepetitionProfile& prof,
                           long* retained) {
    const long candidates =
        rng.poisson(cfg.lambda_o * std::numbers::pi * cfg.R_c * cfg.R_c);
    const bool fading = cfg.channel == Channel::RayleighFading;
    double total = 0.0;
    long kept = 0;
    for (long i = 0; i < candidates; ++i) {
        const double r = cfg.R_c * std::sqrt(rng.uniform01());
        if (rng.uniform01() >= prof.duty_cycle(r)) continue; // thinning keeps lambda_o D(r)
        ++kept;
        const double h = fading ? rng.exponential() : 1.0;
        total += cfg.P_t * h * std::pow(r, -cfg.alpha);
    }
    if (retained) *retained = kept;
    return total;
}

namespace {

void check_branch_model(const McConfig& mc, CombinerKind combiner) {
    if (combiner == CombinerKind::SelectionCombining &&
        mc.branch_model != BranchModel::IndependentPerRepetition)
        throw std::invalid_argument("McConfig: selection combining needs independent per-repetition draws");
    if (combiner == CombinerKind::MaximalRatioCombining &&
        mc.branch_model != BranchModel::SharedInterference)
        throw std::invalid_argument("McConfig: maximal ratio combining needs one shared interference draw");
}

// One link attempt; the serving device is drawn separately and never thinned
// out of the interferer field.
bool link_trial(TrialRng& rng, const McConfig& mc, const RepetitionProfile& field_prof,
                double r_o, CombinerKind combiner) {
    const CellConfig& cfg = mc.cfg;
    const bool fading = cfg.channel == Channel::RayleighFading;
    const double gain = cfg.P_t * std::pow(r_o, -cfg.alpha);
    switch (combiner) {
        case CombinerKind::NoRepetition: {
            const double interference = sample_interference(rng, cfg, field_prof);
            const double h = fading ? rng.exponential() : 1.0;
            return gain * h > cfg.theta * (interference + cfg.sigma2);
        }
        case CombinerKind::SelectionCombining: {
            const int n = mc.prof.repetitions(r_o);
            for (int branch = 0; branch < n; ++branch) {
                const double interference = sample_interference(rng, cfg, field_prof);
                const double h = fading ? rng.exponential() : 1.0;
                if (gain * h > cfg.theta * (interference + cfg.sigma2)) return true;
            }
            return false;
        }
        case CombinerKind::MaximalRatioCombining: {
            const int n = mc.prof.repetitions(r_o);
            const double interference = sample_interference(rng, cfg, field_prof);
            double g = static_cast<double>(n);
            if (fading) {
                g = 0.0;
                for (int branch = 0; branch < n; ++branch) g += rng.exponential();
            }
            return gain * g > cfg.theta * (interference + cfg.sigma2);
        }
    }
    throw std::logic_error("link_trial: unknown combiner");
}

RepetitionProfile field_profile(const McConfig& mc, CombinerKind combiner) {
    return combiner == CombinerKind::NoRepetition
               ? RepetitionProfile::constant(mc.prof.base_duty())
               : mc.prof;
}

McEstimate finish_estimate(double mean, double second_moment, const McConfig& mc) {
    McEstimate est;
    est.mean = mean;
    est.trials = mc.trials;
    est.seed = mc.seed;
    if (mc.trials > 1) {
        const double var =
            std::max(0.0, (second_moment - mean * mean) * mc.trials / (mc.trials - 1.0));
        est.half_width_95 = 1.96 * std::sqrt(var / mc.trials);
    }
    return est;
}

// Inverse-CDF sampler for the radial device distribution 2 pi r D(r) / eta.
// Tabulated cumulative mass on a dense uniform grid; the constant-duty case
// uses the exact closed form R sqrt(u).
class RadialSampler {
public:
    RadialSampler(const RepetitionProfile& prof, const CellConfig& cfg)
        : r_max_(cfg.R_c), exact_(prof.is_constant()) {
        if (exact_) return;
        const int cells = 8192;
        cum_.resize(cells + 1, 0.0);
        const double dr = r_max_ / cells;
        double running = 0.0;
        double prev = 0.0; // integrand 2 pi r D(r) at r = 0 is 0
        for (int i = 1; i <= cells; ++i) {
            const double r = i * dr;
            const double cur = 2.0 * std::numbers::pi * r * prof.duty_cycle(r);
            running += 0.5 * (prev + cur) * dr;
            cum_[i] = running;
            prev = cur;
        }
        for (auto& c : cum_) c /= running;
    }

    double sample(double u) const {
        if (exact_) return r_max_ * std::sqrt(u);
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        std::size_t hi = std::min<std::size_t>(cum_.size() - 1,
                                               static_cast<std::size_t>(it - cum_.begin()));
        if (hi == 0) hi = 1;
        const double span = cum_[hi] - cum_[hi - 1];
        const double frac = span > 0.0 ? (u - cum_[hi - 1]) / span : 0.0;
        const double dr = r_max_ / (cum_.size() - 1);
        return (hi - 1 + frac) * dr;
    }

private:
    double r_max_;
    bool exact_;
    std::vector<double> cum_;
};

} // namespace

McEstimate estimate_coverage(const McConfig& mc, double r_o, CombinerKind combiner) {
    mc.validate();
    check_branch_model(mc, combiner);
    if (!(r_o > 0.0 && r_o <= mc.cfg.R_c))
        throw std::invalid_argument("estimate_coverage: r_o must lie in (0, R_c]");

    const RepetitionProfile field = field_profile(mc, combiner);
    const int chunks = resolve_threads(mc.trials, mc.threads);
    std::vector<long> successes(chunks, 0);
    parallel_chunks(mc.trials, mc.threads, [&](long lo, long hi, int chunk) {
        long count = 0;
        for (long t = lo; t < hi; ++t) {
            TrialRng rng(mc.seed, static_cast<std::uint64_t>(t));
            if (link_trial(rng, mc, field, r_o, combiner)) ++count;
        }
        successes[chunk] = count;
    });
    long total = 0;
    for (long c : successes) total += c;
    const double p = static_cast<double>(total) / mc.trials;
    return finish_estimate(p, p, mc); // indicator: E[X^2] = E[X]
}

McEstimate estimate_wasted_energy(const McConfig& mc, CombinerKind combiner,
                                  const EnergyParams& ep) {
    mc.validate();
    check_branch_model(mc, combiner);
    const RepetitionProfile field = field_profile(mc, combiner);
    // device locations follow the duty-weighted pdf of the same field
    const RadialSampler sampler(field, mc.cfg);
    const double e1 = energy_single(ep);

    const int chunks = resolve_threads(mc.trials, mc.threads);
    std::vector<std::map<int, long>> fails(chunks);
    parallel_chunks(mc.trials, mc.threads, [&](long lo, long hi, int chunk) {
        std::map<int, long> local;
        for (long t = lo; t < hi; ++t) {
            TrialRng rng(mc.seed, static_cast<std::uint64_t>(t));
            const double r_o = std::max(1e-9, sampler.sample(rng.uniform01()));
            const int n = combiner == CombinerKind::NoRepetition ? 1 : mc.prof.repetitions(r_o);
            if (!link_trial(rng, mc, field, r_o, combiner)) local[n] += 1;
        }
        fails[chunk] = std::move(local);
    });

    // exact integer buckets keep the aggregation order-independent
    std::map<int, long> merged;
    for (const auto& m : fails)
        for (const auto& [n, c] : m) merged[n] += c;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [n, c] : merged) {
        const double wasted = e1 * n;
        sum += wasted * static_cast<double>(c);
        sum_sq += wasted * wasted * static_cast<double>(c);
    }
    return finish_estimate(sum / mc.trials, sum_sq / mc.trials, mc);
}

std::vector<double> sample_interference_batch(const McConfig& mc, long n) {
    mc.validate();
    if (n < 1) throw std::invalid_argument("sample_interference_batch: need n >= 1");
    std::vector<double> out(n);
    parallel_chunks(n, mc.threads, [&](long lo, long hi, int) {
        for (long t = lo; t < hi; ++t) {
            TrialRng rng(mc.seed, static_cast<std::uint64_t>(t));
            out[t] = sample_interference(rng, mc.cfg, mc.prof);
        }
    });
    return out;
}

} // namespace repcov
