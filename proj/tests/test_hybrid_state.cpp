#include "oamcnot/hybrid_state.hpp"

#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace oamcnot;
using oamcnot::testing::max_deviation;
using oamcnot::testing::random_state;

namespace {
const double h = kInvSqrt2;
}

TEST(hybrid_state, basis_state_ordering) {
    EXPECT_EQ(basis_state(0, 0, 1).amplitudes(), (Amplitudes4{1, 0, 0, 0}));
    EXPECT_EQ(basis_state(1, 0, 1).amplitudes(), (Amplitudes4{0, 0, 1, 0}));
    auto s = basis_state(1, 1, 2);
    EXPECT_EQ(s.amplitudes(), (Amplitudes4{0, 0, 0, 1}));
    EXPECT_EQ(s.oam_magnitude(), 2);
}

TEST(hybrid_state, magnitude_zero_rejected) {
    EXPECT_THROW(basis_state(0, 0, 0), std::invalid_argument);
    EXPECT_THROW(HybridState({1, 0, 0, 0}, 0), std::invalid_argument);
    EXPECT_THROW(HybridState({1, 1, 0, 0}, 1), std::invalid_argument);
    EXPECT_THROW(basis_state(2, 0, 1), std::invalid_argument);
}

TEST(hybrid_state, cnot_reproduces_basis_transformations) {
    // |0p0o> -> |0p0o>, |0p1o> -> |0p1o>, |1p0o> -> |1p1o>, |1p1o> -> |1p0o>
    EXPECT_EQ(cnot(basis_state(0, 0, 1)), basis_state(0, 0, 1));
    EXPECT_EQ(cnot(basis_state(0, 1, 1)), basis_state(0, 1, 1));
    EXPECT_EQ(cnot(basis_state(1, 0, 1)), basis_state(1, 1, 1));
    EXPECT_EQ(cnot(basis_state(1, 1, 1)), basis_state(1, 0, 1));
}

TEST(hybrid_state, cnot_swaps_last_two_amplitudes) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto s = random_state(rng, 3);
        const auto t = cnot(s);
        EXPECT_EQ(t[0], s[0]);
        EXPECT_EQ(t[1], s[1]);
        EXPECT_EQ(t[2], s[3]);
        EXPECT_EQ(t[3], s[2]);
        EXPECT_EQ(t.oam_magnitude(), 3);
    }
}

TEST(hybrid_state, cnot_matrix_structure) {
    // Column j = cnot(basis j); entries must be exactly 0 or 1.
    const int expected[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    for (unsigned j = 0; j < 4; ++j) {
        const auto col = cnot(basis_state(j / 2, j % 2, 1));
        for (unsigned i = 0; i < 4; ++i) EXPECT_EQ(col[i], cplx(expected[i][j], 0.0)) << i << "," << j;
    }
}

TEST(hybrid_state, hadamard_examples) {
    const auto a = hadamard_pol(basis_state(0, 0, 1));
    EXPECT_LT(max_deviation(a, HybridState({h, 0, h, 0}, 1)), 1e-15);
    const auto b = hadamard_pol(basis_state(1, 0, 1));
    EXPECT_LT(max_deviation(b, HybridState({h, 0, -h, 0}, 1)), 1e-15);
    const auto c = hadamard_pol(basis_state(0, 1, 1));
    EXPECT_LT(max_deviation(c, HybridState({0, h, 0, h}, 1)), 1e-15);
    const auto d = hadamard_pol(basis_state(1, 1, 1));
    EXPECT_LT(max_deviation(d, HybridState({0, h, 0, -h}, 1)), 1e-15);
}

TEST(hybrid_state, bell_family) {
    EXPECT_LT(max_deviation(bell_state(0, 0, 1), HybridState({h, 0, 0, h}, 1)), 1e-15);
    EXPECT_LT(max_deviation(bell_state(0, 1, 1), HybridState({0, h, h, 0}, 1)), 1e-15);
    EXPECT_LT(max_deviation(bell_state(1, 0, 1), HybridState({h, 0, 0, -h}, 1)), 1e-15);
    EXPECT_LT(max_deviation(bell_state(1, 1, 1), HybridState({0, h, -h, 0}, 1)), 1e-15);
}

TEST(hybrid_state, bell_orthonormal_and_maximally_entangled) {
    for (unsigned i = 0; i < 4; ++i) {
        const auto bi = bell_state(i / 2, i % 2, 1);
        EXPECT_NEAR(concurrence(bi), 1.0, 1e-12);
        EXPECT_NEAR(concurrence(basis_state(i / 2, i % 2, 1)), 0.0, 1e-12);
        for (unsigned j = 0; j < 4; ++j) {
            const auto bj = bell_state(j / 2, j % 2, 1);
            EXPECT_NEAR(std::abs(inner_product(bi, bj)), i == j ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(hybrid_state, project_polarization_examples) {
    auto p = project_polarization(bell_state(0, 0, 1), PolarizationAxis::Horizontal);
    EXPECT_NEAR(p.probability, 0.5, 1e-15);
    ASSERT_TRUE(p.collapsed);
    EXPECT_LT(max_deviation(*p.collapsed, basis_state(0, 0, 1)), 1e-15);

    p = project_polarization(basis_state(0, 1, 1), PolarizationAxis::Vertical);
    EXPECT_EQ(p.probability, 0.0);
    EXPECT_FALSE(p.collapsed);

    p = project_polarization(basis_state(0, 1, 1), PolarizationAxis::Horizontal);
    EXPECT_EQ(p.probability, 1.0);
    ASSERT_TRUE(p.collapsed);
    EXPECT_EQ(*p.collapsed, basis_state(0, 1, 1));
}

TEST(hybrid_state, diagonal_projection) {
    const auto d = hadamard_pol(basis_state(0, 1, 2));  // (H + V)/sqrt2 with negative OAM
    auto p = project_polarization(d, PolarizationAxis::Diagonal);
    EXPECT_NEAR(p.probability, 1.0, 1e-15);
    p = project_polarization(d, PolarizationAxis::Antidiagonal);
    EXPECT_NEAR(p.probability, 0.0, 1e-15);
    EXPECT_FALSE(p.collapsed);
    p = project_polarization(d, PolarizationAxis::Horizontal);
    EXPECT_NEAR(p.probability, 0.5, 1e-15);
    EXPECT_EQ(p.collapsed->oam_magnitude(), 2);
}

TEST(hybrid_state, projection_probabilities_sum_to_one) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = random_state(rng);
        const double ph = project_polarization(s, PolarizationAxis::Horizontal).probability;
        const double pv = project_polarization(s, PolarizationAxis::Vertical).probability;
        const double pd = project_polarization(s, PolarizationAxis::Diagonal).probability;
        const double pa = project_polarization(s, PolarizationAxis::Antidiagonal).probability;
        EXPECT_NEAR(ph + pv, 1.0, 1e-12);
        EXPECT_NEAR(pd + pa, 1.0, 1e-12);
    }
}

TEST(hybrid_state, concurrence_examples) {
    EXPECT_NEAR(concurrence(bell_state(0, 0, 1)), 1.0, 1e-15);
    EXPECT_EQ(concurrence(basis_state(1, 0, 1)), 0.0);
    EXPECT_NEAR(concurrence(hadamard_pol(basis_state(0, 0, 1))), 0.0, 1e-15);
}

TEST(hybrid_state, fidelity_examples) {
    std::mt19937_64 rng(3);
    const auto s = random_state(rng);
    EXPECT_NEAR(fidelity(s, s), 1.0, 1e-15);
    EXPECT_EQ(fidelity(basis_state(0, 0, 1), basis_state(1, 1, 1)), 0.0);
    EXPECT_NEAR(fidelity(bell_state(0, 0, 1), bell_state(1, 0, 1)), 0.0, 1e-15);
    EXPECT_THROW(fidelity(basis_state(0, 0, 1), basis_state(0, 0, 2)), std::invalid_argument);
}

TEST(hybrid_state, fidelity_ignores_global_phase) {
    std::mt19937_64 rng(9);
    const auto s = random_state(rng);
    Amplitudes4 a = s.amplitudes();
    for (auto& x : a) x *= std::polar(1.0, 0.7);
    EXPECT_NEAR(fidelity(s, HybridState(a, 1)), 1.0, 1e-14);
}

TEST(hybrid_state_properties, norm_preservation_and_involution) {
    std::mt19937_64 rng(20240521);
    for (int i = 0; i < 1000; ++i) {
        const auto s = random_state(rng, 1 + i % 4);
        EXPECT_NEAR(cnot(s).norm(), 1.0, 1e-12);
        EXPECT_NEAR(hadamard_pol(s).norm(), 1.0, 1e-12);
        EXPECT_EQ(cnot(cnot(s)), s);
        EXPECT_LT(max_deviation(hadamard_pol(hadamard_pol(s)), s), 1e-12);
        EXPECT_EQ(hadamard_pol(s).oam_magnitude(), s.oam_magnitude());
    }
}
