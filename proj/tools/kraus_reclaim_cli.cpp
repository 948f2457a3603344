// kraus-reclaim: fidelity sweeps, self-verification, decomposition search
// and dilation checks for amplitude-damping channels.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kraus_reclaim/kraus_reclaim.hpp"

namespace kr = kraus_reclaim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

// Flag > KRAUS_RECLAIM_SEED > 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("KRAUS_RECLAIM_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const unsigned long long v = std::stoull(env, &used, 10);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw kr::InvalidInput("KRAUS_RECLAIM_SEED must be a decimal 64-bit integer");
    }
    return 0;
}

kr::Sampler parse_sampler(const std::string& s) {
    if (s == "gellmann") return kr::Sampler::gellmann;
    if (s == "haar") return kr::Sampler::haar;
    throw kr::InvalidInput("unknown sampler: " + s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Environment-assisted correction of amplitude damping: bounds and optimal decompositions"};
    app.require_subcommand(1);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "CSV of fidelities over a p grid");
    int sweep_d = 3;
    kr::PGrid grid;
    bool sweep_search = false;
    std::size_t sweep_samples = 10000;
    std::optional<std::uint64_t> sweep_seed;
    unsigned sweep_jobs = 0;
    std::string svg_path, csv_path;
    sweep_cmd->add_option("--d", sweep_d, "qudit dimension")->check(CLI::Range(2, 16));
    sweep_cmd->add_option("--start", grid.start, "first p");
    sweep_cmd->add_option("--stop", grid.stop, "last p");
    sweep_cmd->add_option("--step", grid.step, "p increment");
    sweep_cmd->add_flag("--search", sweep_search, "add an f_search column from random search");
    sweep_cmd->add_option("--samples", sweep_samples, "samples per p for --search")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", sweep_seed, "RNG seed");
    sweep_cmd->add_option("--jobs", sweep_jobs, "worker threads (0 = all cores)");
    sweep_cmd->add_option("--svg", svg_path, "also render an SVG plot to this path");
    sweep_cmd->add_option("-o,--output", csv_path, "write CSV here instead of stdout");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "run the self-check suite (JSON lines)");
    std::string level = "fast";
    std::optional<std::uint64_t> verify_seed;
    double expected_offset = 0.0;
    unsigned verify_jobs = 0;
    verify_cmd->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify_cmd->add_option("--seed", verify_seed, "RNG seed");
    verify_cmd->add_option("--expected-offset", expected_offset,
                           "shift every expected value (failure-path testing)");
    verify_cmd->add_option("--jobs", verify_jobs, "worker threads (0 = all cores)");

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "search for the decomposition with the best bound");
    int opt_d = 3;
    double opt_p = 0.5;
    int outcomes = 0;
    std::string sampler = "gellmann";
    std::optional<std::uint64_t> opt_seed;
    kr::SearchConfig opt_config;
    opt_cmd->add_option("--d", opt_d, "qudit dimension")->check(CLI::Range(2, 6));
    opt_cmd->add_option("--p", opt_p, "loss probability")->check(CLI::Range(0.0, 1.0));
    opt_cmd->add_option("-n,--samples", opt_config.n_samples, "random samples")->check(CLI::PositiveNumber);
    opt_cmd->add_option("--seed", opt_seed, "RNG seed");
    opt_cmd->add_option("--sampler", sampler, "gellmann or haar")->check(CLI::IsMember({"gellmann", "haar"}));
    opt_cmd->add_option("--outcomes", outcomes, "measurement outcomes N' (default d)");
    opt_cmd->add_option("--range", opt_config.coeff_range, "half-width of the coefficient box")
        ->check(CLI::NonNegativeNumber);
    opt_cmd->add_option("--refine-iters", opt_config.refine_iters, "Nelder-Mead iterations (0 disables)")
        ->check(CLI::NonNegativeNumber);
    opt_cmd->add_option("--refine-step", opt_config.refine_step, "initial simplex size")
        ->check(CLI::PositiveNumber);
    opt_cmd->add_option("--jobs", opt_config.jobs, "worker threads (0 = all cores)");

    // dilate
    auto* dilate_cmd = app.add_subcommand("dilate", "Kraus operators from the system-environment unitary");
    int dilate_d = 3;
    std::optional<double> chi, dilate_p;
    dilate_cmd->add_option("--d", dilate_d, "qudit dimension")->check(CLI::Range(2, 32));
    auto* chi_opt = dilate_cmd->add_option("--chi", chi, "coupling angle");
    auto* p_opt = dilate_cmd->add_option("--p", dilate_p, "loss probability, chi = asin(sqrt(p))")
                      ->check(CLI::Range(0.0, 1.0));
    chi_opt->excludes(p_opt);
    p_opt->excludes(chi_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*sweep_cmd) {
            kr::SweepOptions options{sweep_d, grid, std::nullopt};
            if (sweep_search) {
                kr::SearchConfig cfg;
                cfg.n_samples = sweep_samples;
                cfg.seed = resolve_seed(sweep_seed);
                cfg.jobs = sweep_jobs;
                options.search = cfg;
            }
            const auto rows = kr::sweep(options);
            if (csv_path.empty()) {
                kr::write_csv(std::cout, rows, sweep_search);
            } else {
                std::ofstream out(csv_path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + csv_path);
                kr::write_csv(out, rows, sweep_search);
            }
            if (!svg_path.empty()) {
                std::ofstream svg(svg_path, std::ios::binary);
                if (!svg) throw std::runtime_error("cannot write " + svg_path);
                kr::write_svg(svg, rows, sweep_d);
            }
            return exit_ok;
        }

        if (*verify_cmd) {
            kr::VerifyOptions options;
            options.level = level == "full" ? kr::VerifyLevel::full : kr::VerifyLevel::fast;
            options.seed = resolve_seed(verify_seed);
            options.expected_offset = expected_offset;
            options.jobs = verify_jobs;
            bool all_passed = true;
            for (const auto& report : kr::run_verification(options)) {
                std::cout << report.to_json().dump() << '\n';
                all_passed = all_passed && report.passed;
            }
            return all_passed ? exit_ok : exit_failed;
        }

        if (*opt_cmd) {
            opt_config.seed = resolve_seed(opt_seed);
            opt_config.sampler = parse_sampler(sampler);
            opt_config.outcomes = outcomes;
            if (outcomes != 0 && outcomes < opt_d) {
                throw kr::InvalidInput("--outcomes must be >= d");
            }
            const kr::KrausSet canonical = kr::amplitude_damping(opt_d, opt_p);
            kr::SearchResult result = kr::random_search(canonical, opt_config);
            const double sampled_best = result.best_bound;
            if (opt_config.refine_iters > 0) {
                const kr::SUParams refined = kr::local_refine(canonical, result.best_params, opt_config);
                const kr::Objective f(canonical, refined.n);
                kr::KrausSet refined_kraus = f.decomposition(f.unitary(refined.coeffs));
                const double refined_bound = kr::correction_bound(refined_kraus);
                if (refined_bound > result.best_bound) {
                    result.best_params = refined;
                    result.best_kraus = std::move(refined_kraus);
                    result.best_bound = refined_bound;
                }
            }
            nlohmann::json j = kr::to_json(result);
            j["d"] = opt_d;
            j["p"] = opt_p;
            j["outcomes"] = outcomes == 0 ? opt_d : outcomes;
            j["sampler"] = kr::to_string(opt_config.sampler);
            j["seed"] = opt_config.seed;
            j["sampled_best"] = sampled_best;
            j["refine_iters"] = opt_config.refine_iters;
            if (opt_d == 3) {
                j["fD_max"] = kr::fD_max(opt_p);
                j["gap"] = kr::fD_max(opt_p) - result.best_bound;
            }
            std::cout << j.dump(2) << '\n';
            return exit_ok;
        }

        if (*dilate_cmd) {
            if (chi.has_value() == dilate_p.has_value()) {
                std::cerr << "dilate: give exactly one of --chi or --p\n";
                return exit_usage;
            }
            const double angle = chi ? *chi : std::asin(std::sqrt(*dilate_p));
            std::cout << kr::dilation_report(dilate_d, angle).dump(2) << '\n';
            return exit_ok;
        }
    } catch (const kr::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_usage;
}
