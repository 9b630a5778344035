#include "repcov/config.hpp"
#include "repcov/quadrature.hpp"
#include "repcov/runner.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CliState {
    std::string config_path;
    std::string combiner;
    std::string channel;
    std::string sweep;
    std::string out;
    std::string format;
    long mc_trials = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool trials_set = false;
    bool with_mc = false;
    int threads = 0;
    int inversion_depth = repcov::kDefaultEulerDepth;
    int cache_grid = 256;
};

void add_common(CLI::App* sub, CliState& st, bool needs_combiner) {
    sub->add_option("--config", st.config_path, "experiment config file")->required();
    auto* comb = sub->add_option("--combiner", st.combiner, "norep | sc | mrc");
    if (needs_combiner) comb->required();
    sub->add_option("--channel", st.channel, "pathloss | fading (overrides file)");
    sub->add_option("--sweep", st.sweep, "AXIS:START:STOP:COUNT[:log] (meters)");
    sub->add_option("--mc-trials", st.mc_trials, "Monte Carlo trials (overrides file)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", st.seed, "Monte Carlo seed (overrides file)");
    sub->add_option("--out", st.out, "output path (overrides file)");
    sub->add_option("--format", st.format, "csv | json (overrides file)");
    sub->add_option("--threads", st.threads, "worker threads (0 = hardware)");
    sub->add_option("--inversion-depth", st.inversion_depth,
                    "Euler summation depth M (2M+1 transform evaluations)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cache-grid", st.cache_grid, "CDF cache nodes (>= 64)");
}

repcov::RunOverrides to_overrides(const CLI::App* sub, const CliState& st) {
    repcov::RunOverrides ov;
    if (!st.combiner.empty()) ov.combiner = repcov::combiner_from_name(st.combiner);
    if (!st.channel.empty()) ov.channel = repcov::channel_from_name(st.channel);
    if (!st.sweep.empty()) ov.sweep = repcov::parse_sweep_flag(st.sweep);
    if (sub->count("--mc-trials")) ov.mc_trials = st.mc_trials;
    if (sub->count("--seed")) ov.seed = st.seed;
    if (!st.out.empty()) ov.out_path = st.out;
    if (!st.format.empty()) {
        if (st.format == "csv")
            ov.format = repcov::OutputFormat::Csv;
        else if (st.format == "json")
            ov.format = repcov::OutputFormat::Json;
        else
            throw repcov::ConfigError("--format must be csv or json");
    }
    ov.with_mc = st.with_mc;
    ov.threads = st.threads;
    ov.euler_depth = st.inversion_depth;
    ov.cache_grid = st.cache_grid;
    return ov;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coverage and energy analysis for repetition-based IoT uplinks"};
    app.require_subcommand(1);

    CliState st;
    auto* cov = app.add_subcommand("coverage", "success-probability curve over an r sweep");
    add_common(cov, st, true);
    cov->add_flag("--with-mc", st.with_mc, "add Monte Carlo columns");
    auto* en = app.add_subcommand("energy", "wasted-energy curve (r sweep) or cell average (b sweep)");
    add_common(en, st, true);
    auto* val = app.add_subcommand("validate", "analytic-vs-Monte-Carlo cross-validation report");
    add_common(val, st, false);
    auto* mcc = app.add_subcommand("mc-cdf", "empirical interference CDF vs numerical inversion");
    add_common(mcc, st, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const repcov::ExperimentConfig cfg = repcov::parse_config_file(st.config_path);
        if (cov->parsed()) {
            repcov::run_coverage(cfg, to_overrides(cov, st), std::cerr);
        } else if (en->parsed()) {
            repcov::run_energy(cfg, to_overrides(en, st), std::cerr);
        } else if (val->parsed()) {
            if (!repcov::run_validate(cfg, to_overrides(val, st), std::cerr)) return 3;
        } else if (mcc->parsed()) {
            repcov::run_mc_cdf(cfg, to_overrides(mcc, st), std::cerr);
        }
    } catch (const repcov::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const repcov::QuadratureError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
