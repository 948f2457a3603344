#pragma once

// Dense complex linear algebra kernel. Small matrices only (N <= ~100).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kraus_reclaim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = std::vector<double>;

/// Raised when an argument is malformed: wrong shape, out of range, non-finite.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a caller breaks a documented precondition on otherwise
/// well-formed data (e.g. eigensolving a non-Hermitian matrix).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

namespace tol {
inline constexpr double structural = 1e-10;
inline constexpr double fidelity = 1e-9;
inline constexpr double determinant = 1e-8;
}  // namespace tol

inline bool is_finite(const ComplexMatrix& m) {
    return m.size() == 0 || m.array().isFinite().all();
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    if (!is_finite(m)) {
        throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
    }
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Singular values, descending.
inline RealVector singular_values(const ComplexMatrix& m) {
    require_finite(m, "singular_values");
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    return RealVector(s.data(), s.data() + s.size());
}

/// Trace norm tr|M| = tr sqrt(M^dagger M), summed from singular values.
inline double trace_abs(const ComplexMatrix& m) {
    double sum = 0.0;
    for (double s : singular_values(m)) sum += std::max(s, 0.0);
    return sum;
}

struct HermEig {
    RealVector values;  // ascending
    ComplexMatrix vectors;  // columns are orthonormal eigenvectors
};

inline bool is_hermitian(const ComplexMatrix& h, double tolerance = tol::structural) {
    return h.rows() == h.cols() && max_abs(h - h.adjoint()) <= tolerance;
}

inline HermEig herm_eig(const ComplexMatrix& h) {
    require_finite(h, "herm_eig");
    if (h.rows() != h.cols()) throw InvalidInput("herm_eig: matrix is not square");
    if (!is_hermitian(h)) throw ContractViolation("herm_eig: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw ContractViolation("herm_eig: eigensolver failed to converge");
    }
    const auto& ev = solver.eigenvalues();
    return {RealVector(ev.data(), ev.data() + ev.size()), solver.eigenvectors()};
}

/// Generalized Gell-Mann generators of su(N), normalized to tr(L_i L_j) = 2 delta_ij.
///
/// Ordering: for k = 1..N-1, the symmetric/antisymmetric pair for each j < k
/// followed by the k-th diagonal generator. At N = 2 this gives the Pauli
/// matrices (x, y, z); at N = 3 it gives lambda_1..lambda_8 in standard order.
inline std::vector<ComplexMatrix> gellmann_generators(int n) {
    if (n < 2) throw InvalidInput("gellmann_generators: N must be >= 2");
    const Complex i_unit{0.0, 1.0};
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(n * n - 1));
    for (int k = 1; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            ComplexMatrix sym = ComplexMatrix::Zero(n, n);
            sym(j, k) = 1.0;
            sym(k, j) = 1.0;
            out.push_back(std::move(sym));

            ComplexMatrix anti = ComplexMatrix::Zero(n, n);
            anti(j, k) = -i_unit;
            anti(k, j) = i_unit;
            out.push_back(std::move(anti));
        }
        ComplexMatrix diag = ComplexMatrix::Zero(n, n);
        const double scale = std::sqrt(2.0 / (static_cast<double>(k) * (k + 1)));
        for (int j = 0; j < k; ++j) diag(j, j) = scale;
        diag(k, k) = -scale * k;
        out.push_back(std::move(diag));
    }
    return out;
}

/// exp(-i H) for Hermitian H, through its eigendecomposition.
inline ComplexMatrix exp_minus_i(const ComplexMatrix& h) {
    const HermEig eig = herm_eig(h);
    const Eigen::Index n = h.rows();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        phases(j) = std::polar(1.0, -eig.values[static_cast<std::size_t>(j)]);
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// sum_j a_j L_j over a given basis.
inline ComplexMatrix generator_combination(std::span<const double> coeffs,
                                           const std::vector<ComplexMatrix>& basis) {
    if (basis.empty()) throw InvalidInput("generator_combination: empty basis");
    if (coeffs.size() != basis.size()) {
        throw InvalidInput("generator_combination: expected " + std::to_string(basis.size()) +
                           " coefficients, got " + std::to_string(coeffs.size()));
    }
    ComplexMatrix h = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (!std::isfinite(coeffs[j])) throw InvalidInput("unitary_exp: non-finite coefficient");
        h += coeffs[j] * basis[j];
    }
    // Kill the O(eps) anti-Hermitian part left by summation.
    return 0.5 * (h + h.adjoint());
}

/// U = exp(-i sum_j a_j L_j) with L_j from a precomputed generator basis.
inline ComplexMatrix unitary_exp(std::span<const double> coeffs,
                                 const std::vector<ComplexMatrix>& basis) {
    return exp_minus_i(generator_combination(coeffs, basis));
}

inline ComplexMatrix unitary_exp(std::span<const double> coeffs, int n) {
    if (n < 1) throw InvalidInput("unitary_exp: N must be positive");
    if (n == 1) {
        if (!coeffs.empty()) throw InvalidInput("unitary_exp: N = 1 takes no coefficients");
        return ComplexMatrix::Identity(1, 1);
    }
    return unitary_exp(coeffs, gellmann_generators(n));
}

inline bool is_isometry(const ComplexMatrix& m, double tolerance) {
    if (!is_finite(m) || m.cols() > m.rows() || m.size() == 0) return false;
    const ComplexMatrix gram = m.adjoint() * m;
    return max_abs(gram - ComplexMatrix::Identity(m.cols(), m.cols())) <= tolerance;
}

inline bool is_unitary(const ComplexMatrix& m, double tolerance) {
    return m.rows() == m.cols() && is_isometry(m, tolerance);
}

/// Unitary polar factor W with t = W |t|.
///
/// Taken as U V^dagger from a full SVD. For rank-deficient t the null
/// right-singular vectors are sent to the null left-singular vectors in index
/// order; any such completion leaves tr(W^dagger t) = tr|t| unchanged because
/// kernel vectors contribute nothing to the trace.
inline ComplexMatrix polar_unitary(const ComplexMatrix& t) {
    require_finite(t, "polar_unitary");
    if (t.rows() != t.cols() || t.size() == 0) {
        throw InvalidInput("polar_unitary: matrix must be square and non-empty");
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

/// Real coefficients a_j with U = exp(-i sum_j a_j L_j), after removing the
/// global phase of U so that det = 1. Principal branch; the eigenphase branch
/// is shifted by 2 pi where needed to make the generator traceless.
inline RealVector su_coefficients(const ComplexMatrix& u,
                                  const std::vector<ComplexMatrix>& basis) {
    const Eigen::Index n = u.rows();
    if (!is_unitary(u, 1e-8)) throw InvalidInput("su_coefficients: matrix is not unitary");
    if (static_cast<std::size_t>(n * n - 1) != basis.size()) {
        throw InvalidInput("su_coefficients: basis does not match matrix dimension");
    }
    const Complex det = u.determinant();
    const ComplexMatrix special = std::polar(1.0, -std::arg(det) / static_cast<double>(n)) * u;

    // A unitary matrix is normal, so its Schur form is diagonal.
    Eigen::ComplexSchur<ComplexMatrix> schur(special);
    const ComplexMatrix& q = schur.matrixU();
    std::vector<double> theta(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        theta[static_cast<std::size_t>(j)] = std::arg(schur.matrixT()(j, j));
        total += theta[static_cast<std::size_t>(j)];
    }
    const auto wraps = static_cast<long>(std::lround(total / (2.0 * std::numbers::pi)));
    std::vector<std::size_t> order(theta.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return theta[a] > theta[b]; });
    for (long w = 0; w < std::labs(wraps); ++w) {
        if (wraps > 0) {
            theta[order[static_cast<std::size_t>(w)]] -= 2.0 * std::numbers::pi;
        } else {
            theta[order[order.size() - 1 - static_cast<std::size_t>(w)]] += 2.0 * std::numbers::pi;
        }
    }
    Eigen::VectorXcd diag(n);
    for (Eigen::Index j = 0; j < n; ++j) diag(j) = -theta[static_cast<std::size_t>(j)];
    const ComplexMatrix h = q * diag.asDiagonal() * q.adjoint();

    RealVector coeffs(basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        coeffs[j] = 0.5 * (h * basis[j]).trace().real();
    }
    return coeffs;
}

}  // namespace kraus_reclaim
