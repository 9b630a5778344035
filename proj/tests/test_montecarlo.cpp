#include "doctest.h"
#include "repcov/coverage.hpp"
#include "repcov/energy.hpp"
#include "repcov/montecarlo.hpp"
#include "test_fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace repcov;

namespace {

McConfig table_mc(Channel ch, long trials = 100000, std::uint64_t seed = 20240901) {
    McConfig mc;
    mc.trials = trials;
    mc.seed = seed;
    mc.cfg = fixtures::cell(ch);
    mc.prof = fixtures::fig4_profile();
    mc.threads = 2;
    return mc;
}

} // namespace

TEST_CASE("trial rng distributions") {
    SUBCASE("uniform and exponential moments") {
        TrialRng rng(7, 0);
        double su = 0, se = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            su += rng.uniform01();
            se += rng.exponential();
        }
        CHECK(su / n == doctest::Approx(0.5).epsilon(2e-3));
        CHECK(se / n == doctest::Approx(1.0).epsilon(5e-3));
    }
    SUBCASE("poisson moments through both sampling paths") {
        for (double mean : {3.0, 628.318}) {
            TrialRng rng(11, 1);
            const int n = 200000;
            double s = 0, s2 = 0;
            for (int i = 0; i < n; ++i) {
                const double k = static_cast<double>(rng.poisson(mean));
                s += k;
                s2 += k * k;
            }
            const double m = s / n;
            const double var = s2 / n - m * m;
            // 5 sigma bands on the estimators
            CHECK(std::fabs(m - mean) < 5.0 * std::sqrt(mean / n));
            CHECK(var / mean == doctest::Approx(1.0).epsilon(0.05));
        }
    }
    SUBCASE("streams reproduce and differ by trial") {
        TrialRng a(123, 45), b(123, 45), c(123, 46);
        for (int i = 0; i < 8; ++i) CHECK(a.next_u64() == b.next_u64());
        bool any_diff = false;
        TrialRng a2(123, 45);
        for (int i = 0; i < 8; ++i) any_diff |= (a2.next_u64() != c.next_u64());
        CHECK(any_diff);
    }
}

TEST_CASE("interference sampling") {
    SUBCASE("vanishing density gives zero interference") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        cfg.lambda_o = 1e-300;
        auto prof = RepetitionProfile::constant(0.01);
        for (int t = 0; t < 100; ++t) {
            TrialRng rng(3, t);
            CHECK(sample_interference(rng, cfg, prof) == 0.0);
        }
    }
    SUBCASE("empirical void probability matches exp(-2 pi)") {
        auto mc = table_mc(Channel::RayleighFading, 1000000);
        mc.prof = RepetitionProfile::constant(0.01);
        auto draws = sample_interference_batch(mc, mc.trials);
        const long zeros = std::count(draws.begin(), draws.end(), 0.0);
        const double p_hat = static_cast<double>(zeros) / mc.trials;
        const double p = std::exp(-2.0 * std::numbers::pi);
        const double sigma = std::sqrt(p * (1.0 - p) / mc.trials);
        CHECK(std::fabs(p_hat - p) < 4.0 * sigma);
    }
    SUBCASE("mean retained interferers matches lambda_o * eta") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        auto prof = fixtures::fig4_profile();
        const double expect = cfg.lambda_o * cell_constant(prof, cfg);
        const long n = 100000;
        double sum = 0.0;
        for (long t = 0; t < n; ++t) {
            TrialRng rng(17, t);
            long kept = 0;
            sample_interference(rng, cfg, prof, &kept);
            sum += static_cast<double>(kept);
        }
        const double mean = sum / n;
        const double sigma = std::sqrt(expect / n); // Poisson variance = mean
        CHECK(std::fabs(mean - expect) < 3.0 * sigma);
    }
    SUBCASE("transmit power scales draws linearly") {
        auto mc1 = table_mc(Channel::RayleighFading, 500);
        auto mc2 = mc1;
        mc2.cfg.P_t = 2.0;
        auto d1 = sample_interference_batch(mc1, 500);
        auto d2 = sample_interference_batch(mc2, 500);
        for (int i = 0; i < 500; ++i) {
            if (d1[i] == 0.0)
                CHECK(d2[i] == 0.0);
            else
                CHECK(d2[i] / d1[i] == doctest::Approx(2.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("empirical CDF sits inside the DKW band around the inversion") {
    for (Channel ch : {Channel::PathLossOnly, Channel::RayleighFading}) {
        auto mc = table_mc(ch, 100000);
        mc.prof = RepetitionProfile::constant(0.01);
        auto draws = sample_interference_batch(mc, mc.trials);
        std::sort(draws.begin(), draws.end());
        const auto& cdf = fixtures::norep_cdf(ch);
        // delta = 1e-3 band
        const double eps = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * mc.trials));
        double worst = 0.0;
        for (long i = 0; i < mc.trials; i += 37) {
            const double f = cdf.value(draws[i]);
            const double lo = static_cast<double>(i) / mc.trials;
            const double hi = static_cast<double>(i + 1) / mc.trials;
            worst = std::max(worst, std::max(lo - f, f - hi));
        }
        CHECK(worst < eps);
    }
}

TEST_CASE("coverage estimates") {
    SUBCASE("vanishing threshold always succeeds") {
        auto mc = table_mc(Channel::RayleighFading, 10000);
        mc.cfg.theta = 1e-30;
        mc.branch_model = BranchModel::SharedInterference;
        const auto est = estimate_coverage(mc, 500.0, CombinerKind::MaximalRatioCombining);
        CHECK(est.mean == 1.0);
        CHECK(est.trials == 10000);
        CHECK(est.seed == mc.seed);
    }
    SUBCASE("bit-identical across runs and thread counts") {
        auto mc = table_mc(Channel::RayleighFading, 20000);
        const auto a = estimate_coverage(mc, 800.0, CombinerKind::SelectionCombining);
        const auto b = estimate_coverage(mc, 800.0, CombinerKind::SelectionCombining);
        mc.threads = 4;
        const auto c = estimate_coverage(mc, 800.0, CombinerKind::SelectionCombining);
        mc.threads = 1;
        const auto d = estimate_coverage(mc, 800.0, CombinerKind::SelectionCombining);
        CHECK(a.mean == b.mean);
        CHECK(a.mean == c.mean);
        CHECK(a.mean == d.mean);
        CHECK(a.half_width_95 == d.half_width_95);
    }
    SUBCASE("SC with one repetition is statistically identical to no-repetition") {
        auto mc = table_mc(Channel::RayleighFading, 100000, 5);
        mc.prof = RepetitionProfile::logistic(25.0, 2000.0, 0.01); // N == 1 in the cell
        const auto sc = estimate_coverage(mc, 600.0, CombinerKind::SelectionCombining);
        mc.seed = 6; // independent draw for an honest two-proportion comparison
        const auto norep = estimate_coverage(mc, 600.0, CombinerKind::NoRepetition);
        const double pool = 0.5 * (sc.mean + norep.mean);
        const double z = (sc.mean - norep.mean) /
                         std::sqrt(pool * (1.0 - pool) * 2.0 / mc.trials);
        CHECK(std::fabs(z) < 2.58); // two-sided p > 0.01
    }
    SUBCASE("branch model consistency is enforced") {
        auto mc = table_mc(Channel::RayleighFading, 10);
        mc.branch_model = BranchModel::SharedInterference;
        CHECK_THROWS_AS(estimate_coverage(mc, 500.0, CombinerKind::SelectionCombining),
                        std::invalid_argument);
        mc.branch_model = BranchModel::IndependentPerRepetition;
        CHECK_THROWS_AS(estimate_coverage(mc, 500.0, CombinerKind::MaximalRatioCombining),
                        std::invalid_argument);
        CHECK(default_branch_model(CombinerKind::MaximalRatioCombining) ==
              BranchModel::SharedInterference);
        CHECK(default_branch_model(CombinerKind::SelectionCombining) ==
              BranchModel::IndependentPerRepetition);
    }
    SUBCASE("agrees with the analytic no-repetition probability") {
        auto mc = table_mc(Channel::RayleighFading, 200000);
        const auto est = estimate_coverage(mc, 500.0, CombinerKind::NoRepetition);
        const double analytic =
            p_single(500.0, mc.cfg, fixtures::norep_cdf(Channel::RayleighFading));
        const double se = est.half_width_95 / 1.96;
        CHECK(std::fabs(est.mean - analytic) <= std::max(3.0 * se, 0.01));
    }
    SUBCASE("half-width shrinks like one over sqrt trials") {
        auto coarse = table_mc(Channel::RayleighFading, 1000);
        auto fine = table_mc(Channel::RayleighFading, 100000);
        const auto a = estimate_coverage(coarse, 400.0, CombinerKind::NoRepetition);
        const auto b = estimate_coverage(fine, 400.0, CombinerKind::NoRepetition);
        const double ratio = a.half_width_95 / b.half_width_95;
        CHECK(ratio > 7.0);
        CHECK(ratio < 13.0);
    }
}

TEST_CASE("wasted-energy estimates") {
    const EnergyParams ep{4.0, 0.1, 0.21, 1.0};
    SUBCASE("all-success regime wastes nothing") {
        auto mc = table_mc(Channel::RayleighFading, 5000);
        mc.cfg.theta = 1e-30;
        const auto est = estimate_wasted_energy(mc, CombinerKind::NoRepetition, ep);
        CHECK(est.mean == 0.0);
        CHECK(est.half_width_95 == 0.0);
    }
    SUBCASE("no-repetition estimate matches the analytic cell average") {
        auto mc = table_mc(Channel::RayleighFading, 100000);
        const auto est = estimate_wasted_energy(mc, CombinerKind::NoRepetition, ep);
        const double analytic =
            cell_avg_wasted(CombinerKind::NoRepetition, ep, mc.prof, mc.cfg,
                            fixtures::norep_cdf(Channel::RayleighFading));
        const double se = est.half_width_95 / 1.96;
        CHECK(std::fabs(est.mean - analytic) <= 3.0 * se);
    }
    SUBCASE("deterministic across thread counts") {
        auto mc = table_mc(Channel::RayleighFading, 20000);
        mc.branch_model = BranchModel::SharedInterference;
        const auto a = estimate_wasted_energy(mc, CombinerKind::MaximalRatioCombining, ep);
        mc.threads = 4;
        const auto b = estimate_wasted_energy(mc, CombinerKind::MaximalRatioCombining, ep);
        CHECK(a.mean == b.mean);
        CHECK(a.half_width_95 == b.half_width_95);
    }
}
