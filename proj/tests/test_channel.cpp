#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kraus_reclaim/channel.hpp"
#include "test_support.hpp"

using namespace kraus_reclaim;
using kraus_reclaim::testing::gram_schmidt_unitary;
using kraus_reclaim::testing::random_density;

namespace {

ComplexMatrix ket_bra(int d, int row, int col, double value = 1.0) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(row, col) = value;
    return m;
}

}  // namespace

TEST(AmplitudeDamping, QubitOperators) {
    const double p = 0.3;
    const KrausSet k = amplitude_damping(2, p);
    ASSERT_EQ(k.size(), 2u);
    ComplexMatrix c0 = ket_bra(2, 0, 0) + ket_bra(2, 1, 1, std::sqrt(1 - p));
    EXPECT_LE(max_abs(k[0] - c0), 1e-15);
    EXPECT_LE(max_abs(k[1] - ket_bra(2, 0, 1, std::sqrt(p))), 1e-15);
}

TEST(AmplitudeDamping, QutritOperators) {
    const double p = 0.3;
    const KrausSet k = amplitude_damping(3, p);
    const ComplexMatrix c0 = ket_bra(3, 0, 0) + ket_bra(3, 1, 1, std::sqrt(1 - p)) + ket_bra(3, 2, 2, 1 - p);
    const ComplexMatrix c1 = ket_bra(3, 0, 1, std::sqrt(p)) + ket_bra(3, 1, 2, std::sqrt(2 * p * (1 - p)));
    EXPECT_LE(max_abs(k[0] - c0), 1e-15);
    EXPECT_LE(max_abs(k[1] - c1), 1e-15);
    EXPECT_LE(max_abs(k[2] - ket_bra(3, 0, 2, p)), 1e-15);
}

TEST(AmplitudeDamping, NoDampingIsIdentity) {
    const KrausSet k = amplitude_damping(3, 0.0);
    EXPECT_LE(max_abs(k[0] - ComplexMatrix::Identity(3, 3)), 0.0);
    EXPECT_LE(max_abs(k[1]), 0.0);
    EXPECT_LE(max_abs(k[2]), 0.0);
}

TEST(AmplitudeDamping, CompleteForManyDimensions) {
    for (int d = 2; d <= 12; ++d) {
        for (double p : {0.0, 0.01, 0.37, 0.5, 0.99, 1.0}) {
            const KrausSet k = amplitude_damping(d, p);
            EXPECT_EQ(k.size(), static_cast<std::size_t>(d));
            EXPECT_LE(k.completeness_residual(), 1e-12);
        }
    }
}

TEST(AmplitudeDamping, RejectsBadParameters) {
    EXPECT_THROW(amplitude_damping(3, -0.1), InvalidInput);
    EXPECT_THROW(amplitude_damping(3, 1.1), InvalidInput);
    EXPECT_THROW(amplitude_damping(3, std::nan("")), InvalidInput);
    EXPECT_THROW(amplitude_damping(1, 0.5), InvalidInput);
}

TEST(KrausSet, RejectsIncompleteOrMismatched) {
    EXPECT_THROW(KrausSet({}), InvalidInput);
    EXPECT_THROW(KrausSet({0.5 * ComplexMatrix::Identity(2, 2)}), InvalidInput);
    EXPECT_THROW(KrausSet({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(3, 3)}), InvalidInput);
}

TEST(IsCanonical, Cases) {
    EXPECT_TRUE(is_canonical(amplitude_damping(3, 0.5)));
    std::mt19937_64 rng(1);
    const KrausSet mixed = mix(amplitude_damping(3, 0.5), gram_schmidt_unitary(3, rng));
    EXPECT_FALSE(is_canonical(mixed));
    double largest = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            largest = std::max(largest, std::abs((mixed[i].adjoint() * mixed[j]).trace()));
        }
    }
    EXPECT_GT(largest, 1e-3);
    EXPECT_TRUE(is_canonical(KrausSet({gram_schmidt_unitary(3, rng)})));
}

TEST(Apply, KnownCases) {
    std::mt19937_64 rng(2);
    const ComplexMatrix rho = random_density(3, rng);
    EXPECT_LE(max_abs(kraus_reclaim::apply(KrausSet({ComplexMatrix::Identity(3, 3)}), rho) - rho), 1e-15);

    const ComplexMatrix excited = ket_bra(2, 1, 1);
    EXPECT_LE(max_abs(kraus_reclaim::apply(amplitude_damping(2, 1.0), excited) - ket_bra(2, 0, 0)), 1e-15);

    const double p = 0.35;
    ComplexMatrix expected = ket_bra(2, 0, 0, p) + ket_bra(2, 1, 1, 1 - p);
    EXPECT_LE(max_abs(kraus_reclaim::apply(amplitude_damping(2, p), excited) - expected), 1e-15);
}

TEST(Apply, OutputIsDensity) {
    std::mt19937_64 rng(3);
    for (int d = 2; d <= 5; ++d) {
        const KrausSet k = mix(amplitude_damping(d, 0.4), gram_schmidt_unitary(d, rng));
        const ComplexMatrix out = kraus_reclaim::apply(k, random_density(d, rng));
        EXPECT_TRUE(is_hermitian(out, 1e-9));
        EXPECT_NEAR(out.trace().real(), 1.0, 1e-9);
        EXPECT_GE(herm_eig(0.5 * (out + out.adjoint())).values.front(), -1e-9);
    }
}

TEST(Apply, RejectsBadState) {
    const KrausSet k = amplitude_damping(2, 0.5);
    EXPECT_THROW(kraus_reclaim::apply(k, ComplexMatrix::Identity(3, 3) / 3.0), InvalidInput);
    EXPECT_THROW(kraus_reclaim::apply(k, ComplexMatrix::Identity(2, 2)), InvalidInput);  // trace 2
    ComplexMatrix neg = ComplexMatrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(kraus_reclaim::apply(k, neg), InvalidInput);
    ComplexMatrix nonherm = ComplexMatrix::Identity(2, 2) / 2.0;
    nonherm(0, 1) = 0.1;
    EXPECT_THROW(kraus_reclaim::apply(k, nonherm), InvalidInput);
}

TEST(EntFidelity, KnownValues) {
    EXPECT_NEAR(ent_fidelity(KrausSet({ComplexMatrix::Identity(3, 3)})), 1.0, 1e-15);
    for (double p : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const double closed = std::pow(2 - p + std::sqrt(1 - p), 2) / 9.0;
        EXPECT_NEAR(ent_fidelity(amplitude_damping(3, p)), closed, 1e-14);
    }
    EXPECT_NEAR(ent_fidelity(amplitude_damping(3, 0.5)), 0.5412578159510714, 1e-12);
}

TEST(EntFidelity, RejectsRectangular) {
    const ComplexMatrix iso = ComplexMatrix::Identity(3, 2);
    EXPECT_THROW(ent_fidelity(KrausSet({iso})), InvalidInput);
    EXPECT_THROW(correction_bound(KrausSet({iso})), InvalidInput);
}

TEST(CorrectionBound, KnownValues) {
    EXPECT_NEAR(correction_bound(KrausSet({ComplexMatrix::Identity(2, 2)})), 1.0, 1e-15);
    for (double p : {0.0, 0.25, 0.5, 1.0}) {
        EXPECT_NEAR(correction_bound(amplitude_damping(2, p)), (1 + std::sqrt(1 - p)) / 2, 1e-14);
    }
    EXPECT_NEAR(correction_bound(amplitude_damping(3, 0.5)), 0.7912578159510714, 1e-12);
    for (int d = 2; d <= 7; ++d) {
        for (double p : {0.1, 0.6}) {
            EXPECT_NEAR(correction_bound(amplitude_damping(d, p)),
                        kraus_reclaim::testing::canonical_bound_oracle(d, p), 1e-12);
        }
    }
}

TEST(CorrectionBound, OrderingOverRandomDecompositions) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + trial % 4;
        const int outcomes = d + trial % 3;
        const ComplexMatrix v = gram_schmidt_unitary(outcomes, rng).leftCols(d);
        const KrausSet k = mix(amplitude_damping(d, unit(rng)), v);
        const double f = ent_fidelity(k);
        const double bound = correction_bound(k);
        EXPECT_LE(f, bound + 1e-12);
        EXPECT_LE(bound, 1.0 + 1e-12);
    }
}

TEST(CorrectionBound, PermutationInvariant) {
    std::mt19937_64 rng(5);
    const KrausSet k = mix(amplitude_damping(4, 0.45), gram_schmidt_unitary(4, rng));
    std::vector<ComplexMatrix> ops = k.ops();
    const double base = correction_bound(k);
    std::sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) { return a(0, 0).real() < b(0, 0).real(); });
    do {
        EXPECT_NEAR(correction_bound(KrausSet(ops)), base, 1e-14);
    } while (std::next_permutation(ops.begin(), ops.end(),
                                   [](const auto& a, const auto& b) { return a(0, 0).real() < b(0, 0).real(); }));
}

TEST(Mix, IdentityLeavesSetUnchanged) {
    const KrausSet k = amplitude_damping(3, 0.2);
    const KrausSet same = mix(k, ComplexMatrix::Identity(3, 3));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(max_abs(same[i] - k[i]), 0.0);
}

TEST(Mix, QubitSpecialUnitaryForm) {
    const double p = 0.4;
    const Complex a = std::polar(0.6, 0.3);
    const Complex b = std::polar(0.8, -1.1);
    ComplexMatrix u(2, 2);
    u << a, b, -std::conj(b), std::conj(a);
    const KrausSet k = mix(amplitude_damping(2, p), u);
    ComplexMatrix b0(2, 2), b1(2, 2);
    b0 << a, b * std::sqrt(p), 0.0, a * std::sqrt(1 - p);
    b1 << -std::conj(b), std::conj(a) * std::sqrt(p), 0.0, -std::conj(b) * std::sqrt(1 - p);
    EXPECT_LE(max_abs(k[0] - b0), 1e-15);
    EXPECT_LE(max_abs(k[1] - b1), 1e-15);
}

TEST(Mix, IsometricExtensionToMoreOutcomes) {
    std::mt19937_64 rng(6);
    const ComplexMatrix v = gram_schmidt_unitary(3, rng).leftCols(2);
    const KrausSet k = mix(amplitude_damping(2, 0.5), v);
    EXPECT_EQ(k.size(), 3u);
    EXPECT_LE(k.completeness_residual(), 1e-12);
    EXPECT_NEAR(correction_bound(k), (1 + std::sqrt(0.5)) / 2, 1e-9);
}

TEST(Mix, RejectsNonIsometry) {
    const KrausSet k = amplitude_damping(2, 0.5);
    EXPECT_THROW(mix(k, 2.0 * ComplexMatrix::Identity(2, 2)), InvalidInput);
    EXPECT_THROW(mix(k, ComplexMatrix::Identity(3, 3)), InvalidInput);
}

TEST(Mix, QubitBoundInvariantUnderAnyUnitary) {
    std::mt19937_64 rng(7);
    for (double p : {0.1, 0.5, 0.9}) {
        const KrausSet k = amplitude_damping(2, p);
        for (int i = 0; i < 100; ++i) {
            EXPECT_NEAR(correction_bound(mix(k, gram_schmidt_unitary(2, rng))), (1 + std::sqrt(1 - p)) / 2, 1e-9);
        }
    }
}

TEST(Mix, GlobalPhaseInvariance) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const KrausSet k = amplitude_damping(3, 0.6);
    for (int i = 0; i < 50; ++i) {
        const ComplexMatrix u = gram_schmidt_unitary(3, rng);
        const Complex phase = std::polar(1.0, angle(rng));
        EXPECT_NEAR(correction_bound(mix(k, phase * u)), correction_bound(mix(k, u)), 1e-12);
    }
}

TEST(Mix, ChannelActionUnchanged) {
    std::mt19937_64 rng(9);
    for (int d = 2; d <= 4; ++d) {
        const KrausSet k = amplitude_damping(d, 0.3);
        for (int i = 0; i < 10; ++i) {
            const KrausSet mixed = mix(k, gram_schmidt_unitary(d, rng));
            const ComplexMatrix rho = random_density(d, rng);
            EXPECT_LE(max_abs(kraus_reclaim::apply(mixed, rho) - kraus_reclaim::apply(k, rho)), 1e-10);
        }
    }
}

TEST(CompletelyCorrectable, Cases) {
    std::mt19937_64 rng(10);
    const ComplexMatrix u = gram_schmidt_unitary(3, rng);
    const double s = 1 / std::sqrt(2.0);
    EXPECT_TRUE(completely_correctable(KrausSet({s * ComplexMatrix::Identity(3, 3), s * u})));
    EXPECT_FALSE(completely_correctable(amplitude_damping(2, 0.5)));
    for (int d = 2; d <= 5; ++d) EXPECT_TRUE(completely_correctable(amplitude_damping(d, 0.0)));
}
