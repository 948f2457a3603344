#pragma once

// Search for the Kraus decomposition with the largest correction bound.
//
// A decomposition is reached from a reference set K (usually the canonical
// one) by mixing with the first |K| columns of an SU(N') element,
// N' >= |K|, parametrized as exp(-i sum_j a_j L_j) over the generalized
// Gell-Mann basis. Random sampling is followed by a Nelder-Mead refinement.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "kraus_reclaim/channel.hpp"
#include "kraus_reclaim/families.hpp"

namespace kraus_reclaim {

struct SUParams {
    int n = 2;
    RealVector coeffs;

    static SUParams zero(int n) { return {n, RealVector(static_cast<std::size_t>(n * n - 1), 0.0)}; }
};

enum class Sampler { gellmann, haar };

struct SearchConfig {
    std::size_t n_samples = 100000;
    std::uint64_t seed = 0;
    double coeff_range = std::numbers::pi;  // coefficients uniform in [-r, r]
    Sampler sampler = Sampler::gellmann;
    int refine_iters = 200;
    double refine_step = 0.1;
    int outcomes = 0;        // N'; 0 means the operator count of the reference set
    unsigned jobs = 0;       // worker threads; 0 means hardware concurrency
    std::optional<double> count_above;  // also count samples with bound > this
};

inline constexpr std::size_t histogram_bins = 1000;  // width 1e-3 over [0, 1]

struct SearchResult {
    double best_bound = 0.0;
    SUParams best_params;
    KrausSet best_kraus;
    std::size_t best_index = 0;
    std::size_t samples_evaluated = 0;
    double min_bound = 0.0;
    double max_bound = 0.0;
    std::size_t count_above = 0;
    std::vector<std::uint64_t> histogram;
    double wall_time = 0.0;  // seconds
};

/// Correction bound as a function of the SU(N') coefficients.
class Objective {
public:
    Objective(KrausSet reference, int outcomes)
        : reference_(std::move(reference)),
          n_(outcomes == 0 ? static_cast<int>(reference_.size()) : outcomes) {
        detail::require_square(reference_, "Objective");
        if (n_ < static_cast<int>(reference_.size())) {
            throw InvalidInput("Objective: outcome count must be >= operator count");
        }
        if (n_ >= 2) basis_ = gellmann_generators(n_);
    }

    int group_dim() const { return n_; }
    std::size_t param_count() const { return basis_.size(); }
    const KrausSet& reference() const { return reference_; }
    const std::vector<ComplexMatrix>& basis() const { return basis_; }

    ComplexMatrix unitary(std::span<const double> coeffs) const {
        if (n_ == 1) {
            if (!coeffs.empty()) throw InvalidInput("objective: N = 1 takes no coefficients");
            return ComplexMatrix::Identity(1, 1);
        }
        return unitary_exp(coeffs, basis_);
    }

    /// The reference set mixed by the first |K| columns of u.
    KrausSet decomposition(const ComplexMatrix& u) const {
        return mix(reference_, u.leftCols(static_cast<Eigen::Index>(reference_.size())));
    }

    double from_unitary(const ComplexMatrix& u) const {
        // Same as correction_bound(decomposition(u)) without re-validating completeness.
        const Eigen::Index count = static_cast<Eigen::Index>(reference_.size());
        const double d = reference_.d_in();
        double sum = 0.0;
        ComplexMatrix b(reference_.d_out(), reference_.d_in());
        for (Eigen::Index row = 0; row < u.rows(); ++row) {
            b.setZero();
            for (Eigen::Index col = 0; col < count; ++col) {
                b += u(row, col) * reference_[static_cast<std::size_t>(col)];
            }
            const double norm = trace_abs(b);
            sum += norm * norm;
        }
        return sum / (d * d);
    }

    double operator()(std::span<const double> coeffs) const { return from_unitary(unitary(coeffs)); }

private:
    KrausSet reference_;
    int n_;
    std::vector<ComplexMatrix> basis_;
};

/// correction_bound(mix(K, first |K| columns of exp(-i sum a_j L_j))).
inline double objective(const KrausSet& k, const SUParams& params) {
    if (params.n < static_cast<int>(k.size())) {
        throw InvalidInput("objective: group dimension smaller than operator count");
    }
    if (params.coeffs.size() != static_cast<std::size_t>(params.n * params.n - 1)) {
        throw InvalidInput("objective: coefficient count must be N^2 - 1");
    }
    const Objective f(k, params.n);
    return correction_bound(f.decomposition(f.unitary(params.coeffs)));
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of R's diagonal moved into Q.
template <class Rng>
ComplexMatrix haar_unitary(int n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix z(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i, j) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        const Complex phase = mag > 0.0 ? r(j, j) / mag : Complex(1.0, 0.0);
        q.col(j) *= phase;
    }
    return q;
}

namespace detail {

inline constexpr std::size_t samples_per_chunk = 4096;

/// Independent stream for one fixed-size chunk of the sample index space, so
/// results do not depend on how chunks are spread over workers.
inline std::mt19937_64 chunk_stream(std::uint64_t seed, std::size_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      0x6b72u};
    return std::mt19937_64(seq);
}

inline std::size_t histogram_bin(double value) {
    const double scaled = std::floor(std::clamp(value, 0.0, 1.0) * histogram_bins);
    return std::min(static_cast<std::size_t>(scaled), histogram_bins - 1);
}

struct WorkerState {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    RealVector best_coeffs;
    ComplexMatrix best_unitary;
    double min_bound = std::numeric_limits<double>::infinity();
    double max_bound = -std::numeric_limits<double>::infinity();
    std::size_t count_above = 0;
    std::vector<std::uint64_t> histogram = std::vector<std::uint64_t>(histogram_bins, 0);

    bool better(double value, std::size_t index) const {
        return value > best || (value == best && index < best_index);
    }

    void merge(const WorkerState& other) {
        if (better(other.best, other.best_index)) {
            best = other.best;
            best_index = other.best_index;
            best_coeffs = other.best_coeffs;
            best_unitary = other.best_unitary;
        }
        min_bound = std::min(min_bound, other.min_bound);
        max_bound = std::max(max_bound, other.max_bound);
        count_above += other.count_above;
        for (std::size_t b = 0; b < histogram_bins; ++b) histogram[b] += other.histogram[b];
    }
};

inline SearchResult finish_result(const Objective& f, SUParams params, std::size_t best_index,
                                  std::size_t evaluated) {
    KrausSet best_kraus = f.decomposition(f.unitary(params.coeffs));
    const double bound = correction_bound(best_kraus);
    return SearchResult{bound, std::move(params), std::move(best_kraus), best_index, evaluated,
                        bound, bound, 0, std::vector<std::uint64_t>(histogram_bins, 0), 0.0};
}

}  // namespace detail

/// Evaluates the objective at n_samples i.i.d. draws and returns the argmax
/// (ties go to the lowest sample index). Deterministic for a given seed and
/// independent of the worker count.
inline SearchResult random_search(const KrausSet& k, const SearchConfig& config) {
    if (config.n_samples < 1) throw InvalidInput("random_search: n_samples must be >= 1");
    if (!(config.coeff_range >= 0.0) || !std::isfinite(config.coeff_range)) {
        throw InvalidInput("random_search: coeff_range must be finite and nonnegative");
    }
    const auto started = std::chrono::steady_clock::now();
    const Objective f(k, config.outcomes);
    const int n = f.group_dim();
    const std::size_t dims = f.param_count();
    const std::size_t chunks =
        (config.n_samples + detail::samples_per_chunk - 1) / detail::samples_per_chunk;

    std::atomic<std::size_t> next_chunk{0};
    detail::WorkerState total;
    std::mutex merge_mutex;

    auto work = [&] {
        detail::WorkerState local;
        RealVector coeffs(dims, 0.0);
        std::uniform_real_distribution<double> uniform(-config.coeff_range, config.coeff_range);
        for (std::size_t chunk = next_chunk++; chunk < chunks; chunk = next_chunk++) {
            auto rng = detail::chunk_stream(config.seed, chunk);
            const std::size_t first = chunk * detail::samples_per_chunk;
            const std::size_t last = std::min(first + detail::samples_per_chunk, config.n_samples);
            for (std::size_t index = first; index < last; ++index) {
                ComplexMatrix u;
                if (config.sampler == Sampler::gellmann) {
                    for (auto& c : coeffs) c = config.coeff_range > 0.0 ? uniform(rng) : 0.0;
                    u = f.unitary(coeffs);
                } else {
                    u = haar_unitary(n, rng);
                }
                const double value = f.from_unitary(u);
                local.min_bound = std::min(local.min_bound, value);
                local.max_bound = std::max(local.max_bound, value);
                ++local.histogram[detail::histogram_bin(value)];
                if (config.count_above && value > *config.count_above) ++local.count_above;
                if (local.better(value, index)) {
                    local.best = value;
                    local.best_index = index;
                    if (config.sampler == Sampler::gellmann) {
                        local.best_coeffs = coeffs;
                    } else {
                        local.best_unitary = u;
                    }
                }
            }
        }
        std::lock_guard lock(merge_mutex);
        total.merge(local);
    };

    unsigned workers = config.jobs != 0 ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    SUParams best_params{n, {}};
    if (config.sampler == Sampler::gellmann) {
        best_params.coeffs = total.best_coeffs;
    } else {
        best_params.coeffs = n >= 2 ? su_coefficients(total.best_unitary, f.basis()) : RealVector{};
    }
    SearchResult result = detail::finish_result(f, std::move(best_params), total.best_index, config.n_samples);
    result.min_bound = total.min_bound;
    result.max_bound = total.max_bound;
    result.count_above = total.count_above;
    result.histogram = std::move(total.histogram);
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

namespace detail {

/// Nelder-Mead maximization with dimension-adaptive coefficients and
/// restarts around the incumbent once a simplex collapses.
inline RealVector nelder_mead_max(const Objective& f, RealVector start, int max_iters, double step) {
    const std::size_t dims = start.size();
    if (dims == 0 || max_iters <= 0) return start;
    const double nd = static_cast<double>(dims);
    const double reflect = 1.0;
    const double expand = 1.0 + 2.0 / nd;
    const double contract = 0.75 - 0.5 / nd;
    const double shrink = 1.0 - 1.0 / nd;
    constexpr double min_gain = 1e-12;

    RealVector best = std::move(start);
    double best_value = f(best);
    int iters = 0;
    double scale = step;

    while (iters < max_iters) {
        std::vector<RealVector> simplex(dims + 1, best);
        std::vector<double> values(dims + 1, best_value);
        for (std::size_t i = 0; i < dims; ++i) {
            simplex[i + 1][i] += scale;
            values[i + 1] = f(simplex[i + 1]);
        }
        const double restart_value = best_value;

        std::vector<std::size_t> order(dims + 1);
        RealVector centroid(dims), trial(dims), trial2(dims);
        auto point = [&](double t, RealVector& out, std::size_t worst) {
            for (std::size_t j = 0; j < dims; ++j) {
                out[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            }
        };

        while (iters < max_iters) {
            ++iters;
            for (std::size_t i = 0; i <= dims; ++i) order[i] = i;
            // Descending by value, index breaks ties for determinism.
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return values[a] > values[b] || (values[a] == values[b] && a < b);
            });
            const std::size_t hi = order.front();
            const std::size_t lo = order.back();
            const std::size_t second_lo = order[dims - 1];
            if (values[hi] - values[lo] < min_gain) break;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i < dims; ++i) {
                for (std::size_t j = 0; j < dims; ++j) centroid[j] += simplex[order[i]][j] / nd;
            }

            point(-reflect, trial, lo);
            const double reflected = f(trial);
            if (reflected > values[hi]) {
                point(-expand, trial2, lo);
                const double expanded = f(trial2);
                if (expanded > reflected) {
                    simplex[lo] = trial2;
                    values[lo] = expanded;
                } else {
                    simplex[lo] = trial;
                    values[lo] = reflected;
                }
                continue;
            }
            if (reflected > values[second_lo]) {
                simplex[lo] = trial;
                values[lo] = reflected;
                continue;
            }
            const bool outside = reflected > values[lo];
            point(outside ? -contract : contract, trial2, lo);
            const double contracted = f(trial2);
            if (contracted > std::max(outside ? reflected : values[lo], values[lo])) {
                simplex[lo] = trial2;
                values[lo] = contracted;
                continue;
            }
            for (std::size_t i = 0; i <= dims; ++i) {
                if (i == hi) continue;
                for (std::size_t j = 0; j < dims; ++j) {
                    simplex[i][j] = simplex[hi][j] + shrink * (simplex[i][j] - simplex[hi][j]);
                }
                values[i] = f(simplex[i]);
            }
        }

        const auto top = static_cast<std::size_t>(
            std::max_element(values.begin(), values.end()) - values.begin());
        if (values[top] > best_value) {
            best_value = values[top];
            best = simplex[top];
        }
        if (best_value - restart_value < min_gain) break;
        scale = std::max(scale * 0.5, 1e-6);
    }
    return best;
}

}  // namespace detail

/// Derivative-free ascent from start. Never returns a point worse than start.
inline SUParams local_refine(const KrausSet& k, const SUParams& start, const SearchConfig& config) {
    const Objective f(k, start.n);
    if (start.coeffs.size() != f.param_count()) {
        throw InvalidInput("local_refine: coefficient count must be N^2 - 1");
    }
    return {start.n, detail::nelder_mead_max(f, start.coeffs, config.refine_iters, config.refine_step)};
}

struct GlobalMaxReport {
    double p = 0.0;
    double analytic = 0.0;       // fD_max(p)
    double sampled_best = 0.0;   // best random sample
    double best_found = 0.0;     // after refinement
    double gap = 0.0;            // analytic - best_found (negative if exceeded)
    std::size_t samples = 0;
    std::size_t exceed_count = 0;  // samples above analytic + 1e-9
    bool refined_exceeds = false;  // refined point above analytic + 1e-9
    SUParams best_params;
    double wall_time = 0.0;
};

/// Random search plus refinement on the qutrit channel, compared against fD_max(p).
inline GlobalMaxReport verify_global_max(double p, const SearchConfig& config) {
    detail::require_probability(p, "verify_global_max");
    const auto started = std::chrono::steady_clock::now();
    const KrausSet canonical = amplitude_damping(3, p);
    const double analytic = fD_max(p);
    SearchConfig cfg = config;
    cfg.count_above = analytic + tol::fidelity;
    const SearchResult search = random_search(canonical, cfg);
    SUParams refined = local_refine(canonical, search.best_params, cfg);
    const double refined_value = objective(canonical, refined);

    GlobalMaxReport report;
    report.p = p;
    report.analytic = analytic;
    report.sampled_best = search.best_bound;
    report.best_found = std::max(refined_value, search.best_bound);
    if (search.best_bound > refined_value) refined = search.best_params;
    report.gap = analytic - report.best_found;
    report.samples = search.samples_evaluated;
    report.exceed_count = search.count_above;
    report.refined_exceeds = report.best_found > analytic + tol::fidelity;
    report.best_params = std::move(refined);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace kraus_reclaim
