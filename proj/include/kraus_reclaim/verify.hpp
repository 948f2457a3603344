#pragma once

// Self-check suite behind `kraus-reclaim verify`. Each check reduces to one
// measured scalar compared with an expected value at a fixed tolerance.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kraus_reclaim/dilation.hpp"
#include "kraus_reclaim/families.hpp"
#include "kraus_reclaim/optimizer.hpp"
#include "kraus_reclaim/report.hpp"

namespace kraus_reclaim {

struct VerifyReport {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;

    nlohmann::json to_json() const {
        return {{"check", name}, {"status", passed ? "pass" : "fail"}, {"measured", measured},
                {"expected", expected}, {"tolerance", tolerance}};
    }
};

enum class VerifyLevel { fast, full };

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::fast;
    std::uint64_t seed = 0;
    double expected_offset = 0.0;  // added to every expected value; exercises the failure path
    unsigned jobs = 0;
};

namespace detail {

inline VerifyReport make_report(std::string name, double measured, double expected, double tolerance) {
    return {std::move(name), std::abs(measured - expected) <= tolerance, measured, expected, tolerance};
}

inline std::vector<double> tenth_grid() {
    std::vector<double> ps;
    for (int i = 0; i <= 10; ++i) ps.push_back(i / 10.0);
    return ps;
}

inline Complex random_phase(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    return std::polar(1.0, angle(rng));
}

}  // namespace detail

inline std::vector<VerifyReport> run_verification(const VerifyOptions& options) {
    std::vector<VerifyReport> out;
    const double off = options.expected_offset;
    auto add = [&](std::string name, double measured, double expected, double tolerance) {
        out.push_back(detail::make_report(std::move(name), measured, expected + off, tolerance));
    };
    std::mt19937_64 rng(options.seed);

    {
        double worst = 0.0;
        for (double p : detail::tenth_grid()) {
            worst = std::max(worst, std::abs(correction_bound(amplitude_damping(2, p)) - f2_canonical(p)));
        }
        add("qubit_closed_form", worst, 0.0, 1e-10);
    }
    {
        double spread = 0.0;
        for (double p : {0.25, 0.5, 0.75}) {
            const KrausSet k = amplitude_damping(2, p);
            double lo = 1.0, hi = 0.0;
            for (int i = 0; i < 200; ++i) {
                const double v = correction_bound(mix(k, haar_unitary(2, rng)));
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            spread = std::max(spread, hi - lo);
        }
        add("qubit_decomposition_invariance", spread, 0.0, 1e-9);
    }
    {
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double p = i / 100.0;
            worst = std::max(worst, std::abs(correction_bound(amplitude_damping(3, p)) - fc_canonical_d3(p)));
        }
        add("qutrit_canonical_closed_form", worst, 0.0, 1e-10);
        add("qutrit_canonical_at_half", correction_bound(amplitude_damping(3, 0.5)), 0.7912578, 5e-8);
    }
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst = 0.0;
        for (double p : {0.2, 0.5, 0.8}) {
            for (int i = 0; i < 30; ++i) {
                const double mod = std::sqrt(unit(rng));
                const Complex a = mod * detail::random_phase(rng);
                const Complex b = std::sqrt(1.0 - mod * mod) * detail::random_phase(rng);
                for (Coset c : {Coset::identity, Coset::g1, Coset::g2}) {
                    worst = std::max(worst, std::abs(correction_bound(g1_kraus(p, {a, b, c})) - fc_canonical_d3(p)));
                }
            }
        }
        add("equi_canonical_invariance", worst, 0.0, 1e-9);
    }
    {
        std::uniform_real_distribution<double> unit(0.01, 0.99);
        double worst = 0.0;
        double violations = 0.0;
        for (int i = 0; i < 60; ++i) {
            const double p = unit(rng);
            const double mod = std::sqrt(unit(rng));
            const Complex g = mod * detail::random_phase(rng);
            const Complex e = std::sqrt(1.0 - mod * mod) * detail::random_phase(rng);
            const double bound = correction_bound(g2_kraus(p, {g, e, Coset::identity}));
            worst = std::max(worst, std::abs(bound - fD(p, mod)));
            if (!(bound > fc_canonical_d3(p))) violations += 1.0;
        }
        add("super_canonical_closed_form", worst, 0.0, 1e-9);
        add("super_canonical_dominance_violations", violations, 0.0, 0.0);
    }
    {
        double worst = 0.0;
        for (int i = 1; i < 50; ++i) {
            const double p = i / 50.0;
            double best = -1.0, arg = -1.0;
            for (int j = 0; j <= 100; ++j) {
                const double g2 = j / 100.0;
                const double v = fD(p, std::sqrt(g2));
                if (v > best) best = v, arg = g2;
            }
            worst = std::max({worst, std::abs(best - fD_max(p)), std::abs(arg - 0.5)});
        }
        add("super_canonical_maximum", worst, 0.0, 1e-10);
        add("super_canonical_maximum_at_half", fD_max(0.5), 0.8040076, 5e-8);
    }
    {
        double worst = 0.0;
        for (int d = 2; d <= 5; ++d) {
            for (int i = 0; i <= 8; ++i) {
                const double chi = i * std::numbers::pi / 16.0;
                worst = std::max(worst, dilation_report(d, chi).at("abs_deviation").get<double>());
            }
        }
        add("dilation_consistency", worst, 0.0, 1e-10);
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 60; ++i) {
            const int d = 2 + (i % 2);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const KrausSet k = mix(amplitude_damping(d, unit(rng)), haar_unitary(d, rng));
            const double fid = ent_fidelity(corrected_channel(k, optimal_recovery(k)));
            worst = std::max(worst, std::abs(fid - correction_bound(k)));
        }
        add("recovery_attains_bound", worst, 0.0, 1e-9);
    }
    {
        double violations = 0.0;
        for (const auto& row : sweep({3, {}, std::nullopt})) {
            if (!(row.f_nocorr <= row.f_canonical + 1e-12 && row.f_canonical <= *row.f_supermax + 1e-12 &&
                  *row.f_supermax <= 1.0 + 1e-12)) {
                violations += 1.0;
            }
        }
        add("sweep_ordering_violations", violations, 0.0, 0.0);
    }

    if (options.level == VerifyLevel::full) {
        SearchConfig cfg;
        cfg.seed = options.seed;
        cfg.jobs = options.jobs;
        cfg.refine_iters = 4000;
        for (int i = 1; i <= 9; ++i) {
            const double p = i / 10.0;
            const GlobalMaxReport r = verify_global_max(p, cfg);
            add("global_max_gap_p" + format_number(p), r.best_found, r.analytic, 1e-6);
            add("global_max_exceed_count_p" + format_number(p), static_cast<double>(r.exceed_count), 0.0, 0.0);
        }
        SearchConfig four = cfg;
        four.n_samples = 10000;
        four.sampler = Sampler::haar;
        four.outcomes = 4;
        const double ceiling = fD_max(0.5) + tol::fidelity;
        four.count_above = ceiling;
        const SearchResult r = random_search(amplitude_damping(3, 0.5), four);
        add("four_outcome_exceed_count", static_cast<double>(r.count_above), 0.0, 0.0);
    }
    return out;
}

}  // namespace kraus_reclaim
