#pragma once

// Closed forms for the qubit and qutrit amplitude-damping channel, and the two
// SU(3) subgroup families of qutrit decompositions built on the canonical one:
//
//   equi-canonical  U1 = [[1,0,0],[0,a,b],[0,-b*,a*]]  (bound equals canonical)
//   super-canonical U2 = [[g,0,e],[0,1,0],[-e*,0,g*]]  (bound exceeds canonical)
//
// together with their left cosets under the cyclic permutations g1, g2.
// The closed forms are deliberately independent of correction_bound() so the
// two can check each other.

#include <cmath>
#include <stdexcept>
#include <string>

#include "kraus_reclaim/channel.hpp"

namespace kraus_reclaim {

enum class Coset { identity, g1, g2 };

inline const char* to_string(Coset c) {
    switch (c) {
        case Coset::identity: return "identity";
        case Coset::g1: return "g1";
        case Coset::g2: return "g2";
    }
    return "?";
}

struct G1Params {
    Complex alpha{1.0, 0.0};
    Complex beta{0.0, 0.0};
    Coset coset = Coset::identity;
};

struct G2Params {
    Complex gamma{1.0, 0.0};
    Complex delta{0.0, 0.0};
    Coset coset = Coset::identity;
};

namespace detail {

inline double safe_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

inline void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string(what) + ": p must lie in [0, 1]");
}

inline void require_unit_pair(Complex x, Complex y, const char* what) {
    if (std::abs(std::norm(x) + std::norm(y) - 1.0) > 1e-12) {
        throw InvalidInput(std::string(what) + ": |x|^2 + |y|^2 must equal 1");
    }
}

}  // namespace detail

/// Qubit bound (1 + sqrt(1-p)) / 2; every two-operator decomposition attains it.
inline double f2_canonical(double p) {
    detail::require_probability(p, "f2_canonical");
    return 0.5 * (1.0 + detail::safe_sqrt(1.0 - p));
}

/// Qutrit correction bound of the canonical decomposition.
inline double fc_canonical_d3(double p) {
    detail::require_probability(p, "fc_canonical_d3");
    const double q = 1.0 - p;
    const double t0 = 2.0 - p + detail::safe_sqrt(q);
    const double t1 = detail::safe_sqrt(p) + detail::safe_sqrt(2.0 * p * q);
    return (t0 * t0 + t1 * t1 + p * p) / 9.0;
}

/// The exact permutation matrices I, g1, g2 (all even, det = 1).
inline ComplexMatrix coset_permutation(Coset c) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    switch (c) {
        case Coset::identity:
            m = ComplexMatrix::Identity(3, 3);
            break;
        case Coset::g1:
            m(0, 2) = 1.0;
            m(1, 0) = 1.0;
            m(2, 1) = 1.0;
            break;
        case Coset::g2:
            m(0, 1) = 1.0;
            m(1, 2) = 1.0;
            m(2, 0) = 1.0;
            break;
    }
    return m;
}

inline ComplexMatrix g1_unitary(const G1Params& params) {
    detail::require_unit_pair(params.alpha, params.beta, "G1Params");
    ComplexMatrix u = ComplexMatrix::Zero(3, 3);
    u(0, 0) = 1.0;
    u(1, 1) = params.alpha;
    u(1, 2) = params.beta;
    u(2, 1) = -std::conj(params.beta);
    u(2, 2) = std::conj(params.alpha);
    return coset_permutation(params.coset) * u;
}

inline ComplexMatrix g2_unitary(const G2Params& params) {
    detail::require_unit_pair(params.gamma, params.delta, "G2Params");
    ComplexMatrix u = ComplexMatrix::Zero(3, 3);
    u(0, 0) = params.gamma;
    u(0, 2) = params.delta;
    u(1, 1) = 1.0;
    u(2, 0) = -std::conj(params.delta);
    u(2, 2) = std::conj(params.gamma);
    return coset_permutation(params.coset) * u;
}

/// {C0, a C1 + b C2, -b* C1 + a* C2}, cyclically permuted per coset.
inline KrausSet g1_kraus(double p, const G1Params& params) {
    detail::require_probability(p, "g1_kraus");
    return mix(amplitude_damping(3, p), g1_unitary(params));
}

/// {g C0 + e C2, C1, -e* C0 + g* C2}, cyclically permuted per coset.
inline KrausSet g2_kraus(double p, const G2Params& params) {
    detail::require_probability(p, "g2_kraus");
    return mix(amplitude_damping(3, p), g2_unitary(params));
}

struct G1Eigen {
    double a = 0.0;
    double b = 0.0;
    double lambda = 0.0;        // larger nonzero eigenvalue of B1^dagger B1
    double lambda_prime = 0.0;  // smaller one
};

/// Nonzero eigenvalues (a +- sqrt(a^2 - b^2)) / 2 of B1^dagger B1 in the
/// equi-canonical family.
inline G1Eigen g1_eigen_closed_form(double p, double abs_alpha) {
    const double alpha2 = abs_alpha * abs_alpha;
    G1Eigen out;
    out.a = p * p + 3.0 * p * (1.0 - p) * alpha2;
    out.b = 2.0 * p * alpha2 * detail::safe_sqrt(2.0 * (1.0 - p));
    const double disc = detail::safe_sqrt(out.a * out.a - out.b * out.b);
    out.lambda = 0.5 * (out.a + disc);
    out.lambda_prime = 0.5 * (out.a - disc);
    return out;
}

/// Super-canonical excess term; the family bound is
/// fc_canonical_d3(p) + 2 sqrt(1-p)/9 * omega(p, |gamma|).
inline double omega(double p, double abs_gamma) {
    const double q = 1.0 - p;
    const double gamma2 = abs_gamma * abs_gamma;
    const double delta2 = std::max(1.0 - gamma2, 0.0);
    const double abs_delta = std::sqrt(delta2);
    const double g = p * p + 2.0 * q * gamma2;
    const double h = 2.0 * q * gamma2;
    const double k = p * p + 2.0 * q * delta2;
    const double l = 2.0 * q * delta2;
    return abs_gamma * detail::safe_sqrt(g + h) + abs_delta * detail::safe_sqrt(k + l) - (2.0 - p);
}

inline double fD(double p, double abs_gamma) {
    return fc_canonical_d3(p) + 2.0 * detail::safe_sqrt(1.0 - p) / 9.0 * omega(p, abs_gamma);
}

/// Maximum of fD over the super-canonical cosets, reached at |gamma| = |delta| = 1/sqrt(2).
inline double fD_max(double p) {
    detail::require_probability(p, "fD_max");
    const double q = 1.0 - p;
    return (5.0 - 2.0 * p + 2.0 * p * detail::safe_sqrt(2.0 * q) +
            2.0 * detail::safe_sqrt(2.0 * q * (2.0 - 2.0 * p + p * p))) /
           9.0;
}

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// |x| sqrt(a) + |y| sqrt(b) == sqrt(|x|^2 a + |y|^2 b + 2 |x||y| sqrt(ab)).
inline IdentitySides appendix_identity(double abs_alpha, double abs_beta, double a, double b) {
    if (abs_alpha < 0.0 || abs_beta < 0.0 || a < 0.0 || b < 0.0) {
        throw InvalidInput("appendix_identity: arguments must be nonnegative");
    }
    IdentitySides out;
    out.lhs = abs_alpha * std::sqrt(a) + abs_beta * std::sqrt(b);
    out.rhs = std::sqrt(abs_alpha * abs_alpha * a + abs_beta * abs_beta * b +
                        2.0 * abs_alpha * abs_beta * std::sqrt(a * b));
    if (std::abs(out.lhs - out.rhs) > 1e-12 * std::max(1.0, out.lhs)) {
        throw ContractViolation("appendix_identity: sides disagree");
    }
    return out;
}

}  // namespace kraus_reclaim
