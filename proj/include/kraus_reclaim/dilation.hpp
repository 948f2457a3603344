#pragma once

// System-environment model of amplitude damping, U = exp(-i chi (a b^dag + a^dag b)),
// and the polar-decomposition recovery that attains the correction bound.

#include <cmath>
#include <utility>
#include <vector>

#include "kraus_reclaim/channel.hpp"

namespace kraus_reclaim {

/// The beam-splitter unitary restricted to the excitation sectors N = 0..d-1.
/// Block N acts on |n>_a |N-n>_b, n = 0..N, and is stored in that order.
struct JointUnitary {
    int d = 0;
    double chi = 0.0;
    std::vector<ComplexMatrix> blocks;
};

/// Generator a b^dag + a^dag b inside the N-excitation sector.
inline ComplexMatrix sector_generator(int excitations) {
    const int size = excitations + 1;
    ComplexMatrix g = ComplexMatrix::Zero(size, size);
    for (int n = 1; n <= excitations; ++n) {
        const double element = std::sqrt(static_cast<double>(n) * (excitations - n + 1));
        g(n - 1, n) = element;
        g(n, n - 1) = element;
    }
    return g;
}

inline JointUnitary joint_unitary(int d, double chi) {
    if (d < 2) throw InvalidInput("joint_unitary: d must be >= 2");
    if (!std::isfinite(chi)) throw InvalidInput("joint_unitary: chi must be finite");
    JointUnitary u{d, chi, {}};
    u.blocks.reserve(static_cast<std::size_t>(d));
    for (int excitations = 0; excitations < d; ++excitations) {
        u.blocks.push_back(exp_minus_i(chi * sector_generator(excitations)));
    }
    return u;
}

/// C_m = <m|_b U |0>_b. Entry (n-m, n) of C_m is <n-m, m|U|n, 0>, read from
/// block N = n. The result carries the factors (-i)^m of the generator's phase
/// convention relative to the positive-real canonical operators.
inline KrausSet extract_kraus(const JointUnitary& u) {
    const int d = u.d;
    std::vector<ComplexMatrix> ops(static_cast<std::size_t>(d), ComplexMatrix::Zero(d, d));
    for (int n = 0; n < d; ++n) {
        const ComplexMatrix& block = u.blocks[static_cast<std::size_t>(n)];
        for (int m = 0; m <= n; ++m) ops[static_cast<std::size_t>(m)](n - m, n) = block(n - m, n);
    }
    return KrausSet(std::move(ops));
}

struct RecoveryPlan {
    std::vector<ComplexMatrix> unitaries;  // W_a; recovery on outcome a is rho -> W_a^dag rho W_a
};

inline RecoveryPlan optimal_recovery(const KrausSet& k) {
    if (k.d_in() != k.d_out()) throw InvalidInput("optimal_recovery: Kraus operators must be square");
    RecoveryPlan plan;
    plan.unitaries.reserve(k.size());
    for (const auto& t : k) plan.unitaries.push_back(polar_unitary(t));
    return plan;
}

/// Kraus set {W_a^dag t_a} of the corrected channel sum_a R_a o T_a.
inline KrausSet corrected_channel(const KrausSet& k, const RecoveryPlan& plan) {
    if (plan.unitaries.size() != k.size()) {
        throw InvalidInput("corrected_channel: one recovery unitary per outcome required");
    }
    std::vector<ComplexMatrix> ops;
    ops.reserve(k.size());
    for (std::size_t a = 0; a < k.size(); ++a) {
        const ComplexMatrix& w = plan.unitaries[a];
        if (w.rows() != k.d_out() || !is_unitary(w, tol::structural)) {
            throw InvalidInput("corrected_channel: recovery operator is not a unitary of matching size");
        }
        ops.push_back(w.adjoint() * k[a]);
    }
    return KrausSet(std::move(ops));
}

}  // namespace kraus_reclaim
