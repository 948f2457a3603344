#pragma once

// Kraus-set channels, amplitude damping, entanglement fidelity and the
// outcome-conditioned correction bound.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "kraus_reclaim/matcore.hpp"

namespace kraus_reclaim {

/// An ordered Kraus decomposition {t_a} of a channel from a d_in-dimensional
/// to a d_out-dimensional space. Completeness sum_a t_a^dagger t_a = I is
/// enforced on construction.
class KrausSet {
public:
    explicit KrausSet(std::vector<ComplexMatrix> ops, double tolerance = tol::structural)
        : ops_(std::move(ops)) {
        if (ops_.empty()) throw InvalidInput("KrausSet: at least one operator required");
        const Eigen::Index rows = ops_.front().rows();
        const Eigen::Index cols = ops_.front().cols();
        if (rows == 0 || cols == 0) throw InvalidInput("KrausSet: empty operator");
        ComplexMatrix sum = ComplexMatrix::Zero(cols, cols);
        for (const auto& op : ops_) {
            if (op.rows() != rows || op.cols() != cols) {
                throw InvalidInput("KrausSet: operators differ in shape");
            }
            require_finite(op, "KrausSet");
            sum += op.adjoint() * op;
        }
        residual_ = max_abs(sum - ComplexMatrix::Identity(cols, cols));
        if (residual_ > tolerance) {
            throw InvalidInput("KrausSet: completeness violated (residual " +
                               std::to_string(residual_) + ")");
        }
    }

    int d_in() const { return static_cast<int>(ops_.front().cols()); }
    int d_out() const { return static_cast<int>(ops_.front().rows()); }
    std::size_t size() const { return ops_.size(); }
    const ComplexMatrix& operator[](std::size_t i) const { return ops_[i]; }
    const std::vector<ComplexMatrix>& ops() const { return ops_; }
    auto begin() const { return ops_.begin(); }
    auto end() const { return ops_.end(); }

    /// max |sum t^dagger t - I| measured at construction.
    double completeness_residual() const { return residual_; }

private:
    std::vector<ComplexMatrix> ops_;
    double residual_ = 0.0;
};

struct DampingParams {
    int d = 2;
    double p = 0.0;  // single-quantum loss probability
};

namespace detail {

inline double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / i;
    return c;
}

inline void require_square(const KrausSet& k, const char* what) {
    if (k.d_in() != k.d_out()) {
        throw InvalidInput(std::string(what) + ": requires d_in == d_out");
    }
}

}  // namespace detail

/// Canonical qudit amplitude-damping operators, indexed by the number of
/// quanta lost m:
///   C_m = sum_{n=m}^{d-1} sqrt(C(n,m) (1-p)^{n-m} p^m) |n-m><n|.
inline KrausSet amplitude_damping(DampingParams params) {
    if (params.d < 2) throw InvalidInput("amplitude_damping: d must be >= 2");
    if (!(params.p >= 0.0 && params.p <= 1.0)) {
        throw InvalidInput("amplitude_damping: p must lie in [0, 1]");
    }
    const int d = params.d;
    const double p = params.p;
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m) {
        ComplexMatrix c = ComplexMatrix::Zero(d, d);
        for (int n = m; n < d; ++n) {
            const double weight = detail::binomial(n, m) * std::pow(1.0 - p, n - m) * std::pow(p, m);
            c(n - m, n) = std::sqrt(weight);
        }
        ops.push_back(std::move(c));
    }
    return KrausSet(std::move(ops));
}

inline KrausSet amplitude_damping(int d, double p) { return amplitude_damping({d, p}); }

/// True iff the operators are pairwise trace-orthogonal.
inline bool is_canonical(const KrausSet& k, double tolerance = tol::structural) {
    for (std::size_t i = 0; i < k.size(); ++i) {
        for (std::size_t j = i + 1; j < k.size(); ++j) {
            if (std::abs((k[i].adjoint() * k[j]).trace()) > tolerance) return false;
        }
    }
    return true;
}

/// Checks that rho is a density matrix of the given dimension.
inline void require_density(const ComplexMatrix& rho, int d) {
    require_finite(rho, "apply");
    if (rho.rows() != d || rho.cols() != d) {
        throw InvalidInput("apply: density matrix has wrong shape");
    }
    if (!is_hermitian(rho, tol::structural)) throw InvalidInput("apply: density matrix not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol::structural) {
        throw InvalidInput("apply: density matrix trace is not 1");
    }
    const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
    if (herm_eig(herm).values.front() < -tol::structural) {
        throw InvalidInput("apply: density matrix not positive semidefinite");
    }
}

/// T(rho) = sum_a t_a rho t_a^dagger.
inline ComplexMatrix apply(const KrausSet& k, const ComplexMatrix& rho) {
    require_density(rho, k.d_in());
    ComplexMatrix out = ComplexMatrix::Zero(k.d_out(), k.d_out());
    for (const auto& t : k) out += t * rho * t.adjoint();
    return out;
}

/// Entanglement fidelity (1/d^2) sum_k |tr A_k|^2.
inline double ent_fidelity(const KrausSet& k) {
    detail::require_square(k, "ent_fidelity");
    const double d = k.d_in();
    double sum = 0.0;
    for (const auto& t : k) sum += std::norm(t.trace());
    return sum / (d * d);
}

/// Best fidelity reachable by outcome-conditioned recovery for this
/// decomposition: (1/d^2) sum_a (tr|t_a|)^2.
inline double correction_bound(const KrausSet& k) {
    detail::require_square(k, "correction_bound");
    const double d = k.d_in();
    double sum = 0.0;
    for (const auto& t : k) {
        const double norm = trace_abs(t);
        sum += norm * norm;
    }
    return sum / (d * d);
}

/// Re-mixes a decomposition: B_k = sum_l V(k,l) C_l. V must be an N' x N
/// isometry with N the operator count of K.
inline KrausSet mix(const KrausSet& k, const ComplexMatrix& v) {
    if (v.cols() != static_cast<Eigen::Index>(k.size())) {
        throw InvalidInput("mix: isometry column count must equal operator count");
    }
    if (!is_isometry(v, tol::structural)) throw InvalidInput("mix: V is not an isometry");
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(v.rows()));
    for (Eigen::Index row = 0; row < v.rows(); ++row) {
        ComplexMatrix b = ComplexMatrix::Zero(k.d_out(), k.d_in());
        for (std::size_t col = 0; col < k.size(); ++col) {
            b += v(row, static_cast<Eigen::Index>(col)) * k[col];
        }
        out.push_back(std::move(b));
    }
    return KrausSet(std::move(out));
}

/// True iff every t_a t_a^dagger is a nonnegative multiple of the identity.
inline bool completely_correctable(const KrausSet& k, double tolerance = tol::structural) {
    if (k.d_in() != k.d_out()) return false;
    const int d = k.d_out();
    for (const auto& t : k) {
        const ComplexMatrix outer = t * t.adjoint();
        const double tau = outer.trace().real() / d;
        if (tau < -tolerance) return false;
        if (max_abs(outer - tau * ComplexMatrix::Identity(d, d)) > tolerance) return false;
    }
    return true;
}

}  // namespace kraus_reclaim
