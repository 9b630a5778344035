#include "repcov/runner.hpp"
#include "repcov/coverage.hpp"
#include "repcov/energy.hpp"
#include "repcov/montecarlo.hpp"
#include "repcov/quadrature.hpp"
#include "repcov/units.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace repcov {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_once(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

std::string comment_block(const ExperimentConfig& cfg) {
    std::istringstream in(canonical_config_text(cfg));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
    return out.str();
}

McConfig make_mc(const ExperimentConfig& cfg, const RunOverrides& ov, CombinerKind combiner,
                 const RepetitionProfile& prof) {
    McConfig mc;
    mc.trials = cfg.mc_trials;
    mc.seed = cfg.mc_seed;
    mc.branch_model = default_branch_model(combiner);
    mc.cfg = cfg.cell;
    mc.prof = prof;
    mc.threads = ov.threads;
    return mc;
}

InterferenceCdf build_cdf(const ExperimentConfig& cfg, const RunOverrides& ov,
                          const RepetitionProfile& field_prof) {
    LaplaceSpec spec{cfg.cell.channel, field_prof, cfg.cell};
    return InterferenceCdf::with_cache(spec, ov.cache_grid, ov.euler_depth);
}

nlohmann::json estimate_json(const McEstimate& est) {
    return {{"mean", est.mean},
            {"half_width_95", est.half_width_95},
            {"trials", est.trials},
            {"seed", est.seed}};
}

} // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& ov) {
    if (ov.channel) cfg.cell.channel = *ov.channel;
    if (ov.sweep) cfg.sweep = *ov.sweep;
    if (ov.mc_trials) cfg.mc_trials = *ov.mc_trials;
    if (ov.seed) cfg.mc_seed = *ov.seed;
    if (ov.out_path) cfg.out_path = *ov.out_path;
    if (ov.format) cfg.format = *ov.format;
    if (cfg.mc_trials < 1) throw ConfigError("mc trials must be >= 1");
    return cfg;
}

std::vector<double> sweep_grid(const SweepSpec& sweep) {
    std::vector<double> grid;
    grid.reserve(sweep.count);
    if (sweep.count == 1) {
        grid.push_back(sweep.start);
        return grid;
    }
    for (int i = 0; i < sweep.count; ++i) {
        const double t = static_cast<double>(i) / (sweep.count - 1);
        if (sweep.log_scale)
            grid.push_back(std::exp(std::log(sweep.start) +
                                    t * (std::log(sweep.stop) - std::log(sweep.start))));
        else
            grid.push_back(sweep.start + t * (sweep.stop - sweep.start));
    }
    return grid;
}

void run_coverage(const ExperimentConfig& raw, const RunOverrides& ov, std::ostream& log) {
    if (!ov.combiner) throw ConfigError("coverage: --combiner is required (norep, sc, mrc)");
    const CombinerKind combiner = *ov.combiner;
    const ExperimentConfig cfg = apply_overrides(raw, ov);
    if (cfg.sweep.axis != "r")
        throw ConfigError("coverage: sweep axis must be r");
    if (cfg.sweep.stop > cfg.cell.R_c)
        throw ConfigError("coverage: sweep must stay within (0, R_c]");

    const bool norep = combiner == CombinerKind::NoRepetition;
    if (norep)
        log << "notice: --combiner norep ignores [profile] a and b; duty cycle stays at D_o\n";
    const RepetitionProfile prof = cfg.profile();
    const RepetitionProfile field =
        norep ? RepetitionProfile::constant(cfg.prof_d0) : prof;
    const InterferenceCdf cdf = build_cdf(cfg, ov, field);

    const std::vector<double> grid = sweep_grid(cfg.sweep);
    const auto points = coverage_profile(combiner, prof, cfg.cell, cdf, grid, ov.threads);

    std::vector<McEstimate> mc_points;
    if (ov.with_mc) {
        const McConfig mc = make_mc(cfg, ov, combiner, prof);
        mc_points.reserve(grid.size());
        for (double r : grid) mc_points.push_back(estimate_coverage(mc, r, combiner));
    }

    const std::string comb = combiner_name(combiner);
    const std::string chan = channel_name(cfg.cell.channel);
    if (cfg.format == OutputFormat::Csv) {
        std::ostringstream out;
        out << comment_block(cfg);
        out << "r_m,N,p_analytic";
        if (ov.with_mc) out << ",p_mc_mean,p_mc_hw95";
        out << ",combiner,channel\n";
        for (std::size_t i = 0; i < points.size(); ++i) {
            out << fmt(points[i].r) << "," << points[i].n << "," << fmt(points[i].p);
            if (ov.with_mc)
                out << "," << fmt(mc_points[i].mean) << "," << fmt(mc_points[i].half_width_95);
            out << "," << comb << "," << chan << "\n";
        }
        write_file_once(cfg.out_path, out.str());
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < points.size(); ++i) {
            nlohmann::json row{{"r_m", points[i].r},
                               {"N", points[i].n},
                               {"p_analytic", points[i].p},
                               {"combiner", comb},
                               {"channel", chan}};
            if (ov.with_mc) {
                row["p_mc_mean"] = mc_points[i].mean;
                row["p_mc_hw95"] = mc_points[i].half_width_95;
            }
            rows.push_back(row);
        }
        nlohmann::json doc{{"config", canonical_config_text(cfg)}, {"rows", rows}};
        write_file_once(cfg.out_path, doc.dump(2) + "\n");
    }
    log << "coverage: wrote " << points.size() << " rows to " << cfg.out_path << "\n";
}

void run_energy(const ExperimentConfig& raw, const RunOverrides& ov, std::ostream& log) {
    if (!ov.combiner) throw ConfigError("energy: --combiner is required (norep, sc, mrc)");
    const CombinerKind combiner = *ov.combiner;
    const ExperimentConfig cfg = apply_overrides(raw, ov);
    const bool norep = combiner == CombinerKind::NoRepetition;
    if (norep)
        log << "notice: --combiner norep ignores [profile] a and b; duty cycle stays at D_o\n";

    const std::string comb = combiner_name(combiner);
    const std::vector<double> grid = sweep_grid(cfg.sweep);
    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();

    if (cfg.sweep.axis == "r") {
        if (cfg.sweep.stop > cfg.cell.R_c)
            throw ConfigError("energy: r sweep must stay within (0, R_c]");
        const RepetitionProfile prof = cfg.profile();
        const RepetitionProfile field =
            norep ? RepetitionProfile::constant(cfg.prof_d0) : prof;
        const InterferenceCdf cdf = build_cdf(cfg, ov, field);
        csv << "r_m,N,e_wasted_J,combiner\n";
        for (double r : grid) {
            const int n = norep ? 1 : prof.repetitions(r);
            const double e = energy_wasted(r, combiner, cfg.energy, prof, cfg.cell, cdf);
            csv << fmt(r) << "," << n << "," << fmt(e) << "," << comb << "\n";
            rows.push_back({{"r_m", r}, {"N", n}, {"e_wasted_J", e}, {"combiner", comb}});
        }
    } else {
        // b sweep: cell-average wasted energy per profile midpoint, with the
        // no-repetition baseline alongside
        const RepetitionProfile base = RepetitionProfile::constant(cfg.prof_d0);
        const InterferenceCdf base_cdf = build_cdf(cfg, ov, base);
        const double baseline =
            cell_avg_wasted(CombinerKind::NoRepetition, cfg.energy, base, cfg.cell, base_cdf);
        for (double b : grid) {
            ExperimentConfig point = cfg;
            point.prof_b = b;
            const RepetitionProfile prof = point.profile();
            double avg = baseline;
            int n_edge = 1;
            if (!norep) {
                const InterferenceCdf cdf = build_cdf(point, ov, prof);
                avg = cell_avg_wasted(combiner, cfg.energy, prof, cfg.cell, cdf);
                n_edge = prof.repetitions(cfg.cell.R_c);
            }
            csv << fmt(b) << "," << n_edge << "," << fmt(avg) << "," << fmt(baseline) << ","
                << comb << "\n";
            rows.push_back({{"b_m", b},
                            {"N", n_edge},
                            {"e_cell_avg_J", avg},
                            {"e_norep_baseline_J", baseline},
                            {"combiner", comb}});
        }
    }

    if (cfg.format == OutputFormat::Csv) {
        std::ostringstream out;
        out << comment_block(cfg);
        if (cfg.sweep.axis == "b") out << "b_m,N,e_cell_avg_J,e_norep_baseline_J,combiner\n";
        out << csv.str();
        write_file_once(cfg.out_path, out.str());
    } else {
        nlohmann::json doc{{"config", canonical_config_text(cfg)}, {"rows", rows}};
        write_file_once(cfg.out_path, doc.dump(2) + "\n");
    }
    log << "energy: wrote " << grid.size() << " rows to " << cfg.out_path << "\n";
}

bool run_validate(const ExperimentConfig& raw, const RunOverrides& ov, std::ostream& log) {
    const ExperimentConfig cfg = apply_overrides(raw, ov);
    nlohmann::json checks = nlohmann::json::array();
    bool all_pass = true;
    const auto add = [&](const std::string& name, bool pass, nlohmann::json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        checks.push_back(detail);
        all_pass = all_pass && pass;
    };

    // 1. known transform pairs through the same inversion path as F_I
    {
        using cplx = std::complex<double>;
        double worst_exp = 0.0, worst_g2 = 0.0, worst_step = 0.0;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.1 * i;
            worst_exp = std::max(worst_exp,
                                 std::fabs(invert_cdf_transform([](cplx s) { return 1.0 / (1.0 + s); },
                                                                x, ov.euler_depth) -
                                           (1.0 - std::exp(-x))));
            worst_g2 = std::max(
                worst_g2, std::fabs(invert_cdf_transform(
                                        [](cplx s) { return 1.0 / ((1.0 + s) * (1.0 + s)); }, x,
                                        ov.euler_depth) -
                                    (1.0 - std::exp(-x) * (1.0 + x))));
            worst_step = std::max(worst_step,
                                  std::fabs(invert_cdf_transform(
                                                [](cplx s) { return std::exp(-0.01 * s); }, x,
                                                ov.euler_depth) -
                                            1.0));
        }
        const double worst = std::max({worst_exp, worst_g2, worst_step});
        add("inversion_known_pairs", worst <= 1e-6,
            {{"max_abs_error", worst},
             {"exponential", worst_exp},
             {"gamma_shape_2", worst_g2},
             {"delayed_step", worst_step},
             {"euler_depth", ov.euler_depth}});
    }

    const RepetitionProfile prof = cfg.profile();
    const RepetitionProfile norep_prof = RepetitionProfile::constant(cfg.prof_d0);
    const InterferenceCdf cdf_prof = build_cdf(cfg, ov, prof);
    const InterferenceCdf cdf_norep = build_cdf(cfg, ov, norep_prof);

    // 2. inversion at 0+ against the closed-form void probability
    {
        double worst = 0.0;
        for (const InterferenceCdf* cdf : {&cdf_norep, &cdf_prof}) {
            const double closed =
                std::exp(-cfg.cell.lambda_o * cell_constant(cdf->spec().prof, cfg.cell));
            const double inverted = cdf->direct_value(2.0 * cdf->x_eps());
            worst = std::max(worst, std::fabs(inverted - closed));
        }
        add("void_probability_inversion", worst <= 1e-4, {{"max_abs_error", worst}});
    }

    // 3. empirical void probability (constant-duty field)
    {
        McConfig mc = make_mc(cfg, ov, CombinerKind::NoRepetition, norep_prof);
        mc.trials = std::min<long>(cfg.mc_trials, 200000);
        const auto draws = sample_interference_batch(mc, mc.trials);
        long zeros = 0;
        for (double d : draws) zeros += d == 0.0;
        const double p_hat = static_cast<double>(zeros) / mc.trials;
        const double p = cdf_norep.atom0();
        const double sigma = std::sqrt(p * (1.0 - p) / mc.trials);
        add("void_probability_mc", std::fabs(p_hat - p) <= 4.0 * sigma,
            {{"empirical", p_hat}, {"analytic", p}, {"four_sigma", 4.0 * sigma},
             {"trials", mc.trials}});
    }

    // 4. analytic vs Monte Carlo coverage across combiners and radii
    {
        nlohmann::json points = nlohmann::json::array();
        bool pass = true;
        for (CombinerKind comb : {CombinerKind::NoRepetition, CombinerKind::SelectionCombining,
                                  CombinerKind::MaximalRatioCombining}) {
            const InterferenceCdf& cdf =
                comb == CombinerKind::NoRepetition ? cdf_norep : cdf_prof;
            const McConfig mc = make_mc(cfg, ov, comb, prof);
            for (double frac : {0.25, 0.5, 0.75, 1.0}) {
                const double r = frac * cfg.cell.R_c;
                const double analytic = success_probability(r, comb, prof, cfg.cell, cdf);
                const McEstimate est = estimate_coverage(mc, r, comb);
                const double se = est.half_width_95 / 1.96;
                const double tol = std::max(3.0 * se, 0.01);
                const bool ok = std::fabs(analytic - est.mean) <= tol;
                pass = pass && ok;
                points.push_back({{"combiner", combiner_name(comb)},
                                  {"r_m", r},
                                  {"analytic", analytic},
                                  {"mc", estimate_json(est)},
                                  {"tolerance", tol},
                                  {"pass", ok}});
            }
        }
        add("coverage_mc_agreement", pass, {{"points", points}});
    }

    // 5. empirical CDF within the DKW band
    {
        McConfig mc = make_mc(cfg, ov, CombinerKind::NoRepetition, norep_prof);
        mc.trials = std::min<long>(cfg.mc_trials, 100000);
        auto draws = sample_interference_batch(mc, mc.trials);
        std::sort(draws.begin(), draws.end());
        const double eps = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * mc.trials));
        double worst = 0.0;
        for (long i = 0; i < mc.trials; i += 13) {
            const double f = cdf_norep.value(draws[i]);
            worst = std::max(worst, std::max(static_cast<double>(i) / mc.trials - f,
                                             f - static_cast<double>(i + 1) / mc.trials));
        }
        add("dkw_band", worst < eps,
            {{"sup_deviation", worst}, {"dkw_epsilon", eps}, {"samples", mc.trials}});
    }

    // 6. exact reduction identities
    {
        const double r = 0.6 * cfg.cell.R_c;
        const double p1 = p_single(r, cfg.cell, cdf_prof);
        const double d_sc = std::fabs(p_sc(r, 1, cfg.cell, cdf_prof) - p1);
        const double d_mrc = std::fabs(p_mrc(r, 1, cfg.cell, cdf_prof) - p1);
        const double pdf_mass = integrate(
            [&](double x) { return radial_pdf(x, prof, cfg.cell); }, 0.0, cfg.cell.R_c, 1e-12,
            1e-14);
        double gamma_worst = 0.0;
        for (int n : {1, 7, 51}) {
            const double mass = integrate([&](double u) { return gamma_pdf(u, n); }, 0.0,
                                          n + 12.0 * std::sqrt(n) + 30.0, 1e-12, 1e-14);
            gamma_worst = std::max(gamma_worst, std::fabs(mass - 1.0));
        }
        add("reduction_identities",
            d_sc <= 1e-10 && d_mrc <= 1e-10 && std::fabs(pdf_mass - 1.0) <= 1e-9 &&
                gamma_worst <= 1e-9,
            {{"sc_n1_gap", d_sc},
             {"mrc_n1_gap", d_mrc},
             {"radial_pdf_mass_gap", std::fabs(pdf_mass - 1.0)},
             {"gamma_pdf_mass_gap", gamma_worst}});
    }

    // 7. cache diagnostics
    {
        const long warn = cdf_prof.overshoot_warnings() + cdf_norep.overshoot_warnings();
        add("inversion_overshoot_warnings", warn == 0,
            {{"count", warn}, {"euler_depth", ov.euler_depth}});
    }

    nlohmann::json doc{{"config", canonical_config_text(cfg)},
                       {"seed", cfg.mc_seed},
                       {"checks", checks},
                       {"pass", all_pass}};
    write_file_once(cfg.out_path, doc.dump(2) + "\n");
    log << "validate: " << (all_pass ? "all checks passed" : "CHECKS FAILED") << ", report at "
        << cfg.out_path << "\n";
    return all_pass;
}

void run_mc_cdf(const ExperimentConfig& raw, const RunOverrides& ov, std::ostream& log) {
    const ExperimentConfig cfg = apply_overrides(raw, ov);
    const RepetitionProfile prof = cfg.profile();
    const InterferenceCdf cdf = build_cdf(cfg, ov, prof);
    McConfig mc = make_mc(cfg, ov, CombinerKind::SelectionCombining, prof);

    auto draws = sample_interference_batch(mc, mc.trials);
    std::sort(draws.begin(), draws.end());
    const long zeros = std::count(draws.begin(), draws.end(), 0.0);
    const double lo = zeros < mc.trials ? draws[zeros] : cdf.x_eps();
    const double hi = draws.back() > lo ? draws.back() : 2.0 * lo;
    const double dkw = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * mc.trials));

    const int rows = 200;
    std::ostringstream out;
    out << comment_block(cfg);
    out << "# atom0_analytic = " << fmt(cdf.atom0()) << "\n";
    out << "# zero_fraction_mc = " << fmt(static_cast<double>(zeros) / mc.trials) << "\n";
    out << "# dkw_epsilon_99.9 = " << fmt(dkw) << "\n";
    out << "x_w,f_mc,f_analytic,abs_dev\n";
    for (int i = 0; i < rows; ++i) {
        const double x =
            std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (rows - 1.0));
        const double f_mc =
            static_cast<double>(std::upper_bound(draws.begin(), draws.end(), x) - draws.begin()) /
            mc.trials;
        const double f_an = cdf.value(x);
        out << fmt(x) << "," << fmt(f_mc) << "," << fmt(f_an) << "," << fmt(std::fabs(f_mc - f_an))
            << "\n";
    }
    write_file_once(cfg.out_path, out.str());
    log << "mc-cdf: wrote " << rows << " rows to " << cfg.out_path << "\n";
}

} // namespace repcov
