#include "doctest.h"
#include "oracles.hpp"
#include "repcov/coverage.hpp"
#include "repcov/quadrature.hpp"
#include "test_fixtures.hpp"

#include <cmath>

using namespace repcov;

TEST_CASE("p_single boundary behavior") {
    SUBCASE("nonpositive CDF argument gives zero success") {
        auto cfg = fixtures::cell(Channel::PathLossOnly, /*theta=*/1e30);
        LaplaceSpec spec{Channel::PathLossOnly, RepetitionProfile::constant(0.01), cfg};
        InterferenceCdf cdf(spec);
        CHECK(p_single(500.0, cfg, cdf) == 0.0);
    }
    SUBCASE("no interference and no noise gives certain success") {
        for (Channel ch : {Channel::PathLossOnly, Channel::RayleighFading}) {
            auto cfg = fixtures::cell(ch);
            cfg.lambda_o = 1e-30;
            cfg.sigma2 = 0.0;
            LaplaceSpec spec{ch, RepetitionProfile::constant(0.01), cfg};
            InterferenceCdf cdf(spec);
            CHECK(p_single(900.0, cfg, cdf) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("query validation") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        const auto& cdf = fixtures::norep_cdf(Channel::RayleighFading);
        CHECK_THROWS_AS(p_single(0.0, cfg, cdf), std::invalid_argument);
        CHECK_THROWS_AS(p_single(1000.5, cfg, cdf), std::invalid_argument);
        auto wrong = fixtures::cell(Channel::PathLossOnly);
        CHECK_THROWS_AS(p_single(500.0, wrong, cdf), std::invalid_argument);
    }
}

TEST_CASE("selection combining closed form") {
    CHECK(sc_success_from_single(0.5, 2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(sc_success_from_single(0.25, 1) == 0.25);
    CHECK(sc_success_from_single(0.0, 7) == 0.0);
    CHECK(sc_success_from_single(1.0, 7) == 1.0);
    CHECK_THROWS_AS(sc_success_from_single(0.5, 0), std::invalid_argument);

    const auto& cdf = fixtures::norep_cdf(Channel::RayleighFading);
    auto cfg = fixtures::cell(Channel::RayleighFading);
    const double p1 = p_single(700.0, cfg, cdf);
    CHECK(p_sc(700.0, 1, cfg, cdf) == p1); // N=1 reduces exactly
    CHECK(p_sc(700.0, 4, cfg, cdf) == doctest::Approx(1.0 - std::pow(1.0 - p1, 4)).epsilon(1e-15));
    CHECK(p_sc(700.0, 4, cfg, cdf) >= p1);
}

TEST_CASE("maximal ratio combining") {
    auto cfg_f = fixtures::cell(Channel::RayleighFading);
    const auto& cdf_f = fixtures::fig4_cdf(Channel::RayleighFading);

    SUBCASE("N=1 with fading is exactly p_single") {
        for (double r : {150.0, 500.0, 900.0})
            CHECK(p_mrc(r, 1, cfg_f, cdf_f) == p_single(r, cfg_f, cdf_f));
    }
    SUBCASE("pathloss scales the CDF argument by N") {
        auto cfg = fixtures::cell(Channel::PathLossOnly);
        const auto& cdf = fixtures::fig4_cdf(Channel::PathLossOnly);
        const double r = 600.0;
        const double x = cfg.P_t * std::pow(r, -cfg.alpha) / cfg.theta;
        CHECK(p_mrc(r, 5, cfg, cdf) ==
              doctest::Approx(cdf.value(5.0 * x - cfg.sigma2)).epsilon(1e-15));
        CHECK(p_mrc(r, 5, cfg, cdf) >= p_mrc(r, 1, cfg, cdf));
        // nonpositive argument
        auto hard = fixtures::cell(Channel::PathLossOnly, 1e30);
        CHECK(p_mrc(r, 5, hard, cdf) == 0.0);
    }
    SUBCASE("large-N escalation agrees with a brute-force gamma integral") {
        const double r = 950.0;
        for (int n : {61, 100}) {
            const double got = p_mrc(r, n, cfg_f, cdf_f);
            const double signal = cfg_f.P_t * std::pow(r, -cfg_f.alpha) / cfg_f.theta;
            const double brute = oracle::simpson(
                [&](double u) {
                    return cdf_f.value(signal * u - cfg_f.sigma2) * gamma_pdf(u, n);
                },
                0.0, n + 12.0 * std::sqrt(n), 400000);
            CHECK(got == doctest::Approx(brute).epsilon(1e-6));
        }
    }
    SUBCASE("laguerre and escalated paths agree near the switch") {
        const double r = 900.0;
        const double signal = cfg_f.P_t * std::pow(r, -cfg_f.alpha) / cfg_f.theta;
        for (int n : {59, 60}) {
            const double brute = oracle::simpson(
                [&](double u) {
                    return cdf_f.value(signal * u - cfg_f.sigma2) * gamma_pdf(u, n);
                },
                0.0, n + 12.0 * std::sqrt(n), 400000);
            CHECK(p_mrc(r, n, cfg_f, cdf_f) == doctest::Approx(brute).epsilon(1e-6));
        }
    }
}

TEST_CASE("gamma pdf") {
    CHECK(gamma_pdf(0.7, 1) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
    CHECK(gamma_pdf(1.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(gamma_pdf(0.0, 1) == 1.0);
    CHECK(gamma_pdf(0.0, 3) == 0.0);
    CHECK_THROWS_AS(gamma_pdf(-0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(gamma_pdf(1.0, 0), std::invalid_argument);
    for (int n : {1, 2, 5, 17, 60, 61, 100}) {
        const double mass = integrate([&](double u) { return gamma_pdf(u, n); }, 0.0,
                                      n + 12.0 * std::sqrt(n) + 30.0, 1e-12, 1e-14);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("threshold monotonicity") {
    const auto& cdf_prof = fixtures::fig4_cdf(Channel::RayleighFading);
    const auto& cdf_norep = fixtures::norep_cdf(Channel::RayleighFading);
    auto prof = fixtures::fig4_profile();
    for (CombinerKind comb : {CombinerKind::NoRepetition, CombinerKind::SelectionCombining,
                              CombinerKind::MaximalRatioCombining}) {
        const auto& cdf = comb == CombinerKind::NoRepetition ? cdf_norep : cdf_prof;
        double prev = 2.0;
        for (double theta_db = -20.0; theta_db <= 20.0; theta_db += 4.0) {
            auto cfg = fixtures::cell(Channel::RayleighFading, std::pow(10.0, theta_db / 10.0));
            const double p = success_probability(800.0, comb, prof, cfg, cdf);
            CHECK(p <= prev + 1e-9);
            prev = p;
        }
    }
}

TEST_CASE("coverage profile") {
    auto prof = fixtures::fig4_profile();
    std::vector<double> grid;
    for (int i = 1; i <= 100; ++i) grid.push_back(10.0 * i);

    SUBCASE("no-repetition pathloss curve is nonincreasing") {
        auto cfg = fixtures::cell(Channel::PathLossOnly);
        auto pts = coverage_profile(CombinerKind::NoRepetition, prof, cfg,
                                    fixtures::norep_cdf(Channel::PathLossOnly), grid, 2);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].p <= pts[i - 1].p + 1e-9);
            CHECK(pts[i].n == 1);
        }
    }

    SUBCASE("SC jumps upward exactly at the repetition steps") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        const auto& cdf = fixtures::fig4_cdf(Channel::RayleighFading);
        const auto steps = prof.repetition_step_radii(cfg.R_c);
        REQUIRE(!steps.empty());
        for (double rs : {steps.front(), steps[steps.size() / 2], steps.back()}) {
            const double before = success_probability(rs - 0.01, CombinerKind::SelectionCombining,
                                                      prof, cfg, cdf);
            const double after = success_probability(rs + 0.01, CombinerKind::SelectionCombining,
                                                     prof, cfg, cdf);
            CHECK(after > before);
        }
    }

    SUBCASE("deterministic across thread counts") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        const auto& cdf = fixtures::fig4_cdf(Channel::RayleighFading);
        auto one = coverage_profile(CombinerKind::MaximalRatioCombining, prof, cfg, cdf, grid, 1);
        auto four = coverage_profile(CombinerKind::MaximalRatioCombining, prof, cfg, cdf, grid, 4);
        REQUIRE(one.size() == four.size());
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK(one[i].p == four[i].p);
            CHECK(one[i].n == four[i].n);
        }
    }
}

TEST_CASE("cell average coverage") {
    SUBCASE("certain success averages to one") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        cfg.lambda_o = 1e-30;
        cfg.sigma2 = 0.0;
        LaplaceSpec spec{Channel::RayleighFading, RepetitionProfile::constant(0.01), cfg};
        InterferenceCdf cdf(spec);
        CHECK(cell_average_coverage(CombinerKind::NoRepetition, fixtures::fig4_profile(), cfg,
                                    cdf) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("profile average matches a brute-force weighted integral") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        auto prof = fixtures::fig4_profile();
        const auto& cdf = fixtures::fig4_cdf(Channel::RayleighFading);
        const double got = cell_average_coverage(CombinerKind::SelectionCombining, prof, cfg, cdf);
        const double brute = oracle::simpson(
            [&](double r) {
                if (r <= 0.0) return 0.0;
                return success_probability(r, CombinerKind::SelectionCombining, prof, cfg, cdf) *
                       radial_pdf(r, prof, cfg);
            },
            0.0, cfg.R_c, 200000);
        CHECK(got == doctest::Approx(brute).epsilon(1e-6));
    }
    SUBCASE("NoRepetition requires the constant-duty CDF") {
        auto cfg = fixtures::cell(Channel::RayleighFading);
        CHECK_THROWS_AS(success_probability(500.0, CombinerKind::NoRepetition,
                                            fixtures::fig4_profile(), cfg,
                                            fixtures::fig4_cdf(Channel::RayleighFading)),
                        std::invalid_argument);
    }
}
