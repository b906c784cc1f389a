#include <cmath>

#include <gtest/gtest.h>

#include <qnet/dynamics.hpp>
#include <qnet/field.hpp>

using namespace qnet;

namespace {

LatticeConfig lattice(std::size_t L) {
    LatticeConfig c;
    c.size = L;
    return c;
}

Pattern all_ones(const LatticeConfig& cfg) { return Pattern(cfg, 1); }

}  // namespace

TEST(FieldCore, AllUpPatternGivesMaximalOrder) {
    const auto cfg = lattice(20);
    const DoubletField f = new_field(cfg, all_ones(cfg));
    for (std::size_t i = 0; i < f.sites(); ++i) {
        EXPECT_EQ(f.u(i), cplx(1.0, 0.0));
        EXPECT_EQ(f.d(i), cplx(0.0, 0.0));
    }
    const OrderParameter m = order_parameter(f);
    EXPECT_EQ(m.value, 200.0);
    EXPECT_EQ(m.n_u, 400u);
    EXPECT_EQ(m.n_d, 0u);
}

TEST(FieldCore, CheckerboardIsBalanced) {
    const auto cfg = lattice(20);
    const OrderParameter m = order_parameter(new_field(cfg, checkerboard(cfg)));
    EXPECT_EQ(m.n_u, 200u);
    EXPECT_EQ(m.n_d, 200u);
    EXPECT_EQ(m.value, 0.0);
}

TEST(FieldCore, OrderParameterFromCounts) {
    EXPECT_EQ(OrderParameter::from_counts(250, 150).value, 50.0);
    EXPECT_EQ(OrderParameter::from_counts(150, 250).value, 50.0);
}

TEST(FieldCore, PatternShapeMismatchThrows) {
    EXPECT_THROW(new_field(lattice(4), checkerboard(lattice(5))), ShapeError);
}

TEST(FieldCore, NormalStateHasNoNetMagnetization) {
    // Monte-Carlo check of the Bloch-sphere sampler: mean |m| over 100 seeds.
    const auto cfg = lattice(20);
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const DoubletField f = new_field(cfg, NormalRandom{}, seed);
        for (std::size_t i = 0; i < f.sites(); ++i) EXPECT_NEAR(site_density(f, i), 1.0, 1e-12);
        sum += net_magnetization(f).norm();
    }
    EXPECT_LE(sum / 100.0, 0.1);
}

TEST(FieldCore, NormalStateIsSeedDeterministic) {
    const auto cfg = lattice(8);
    EXPECT_EQ(new_field(cfg, NormalRandom{}, 7), new_field(cfg, NormalRandom{}, 7));
    EXPECT_FALSE(new_field(cfg, NormalRandom{}, 7) == new_field(cfg, NormalRandom{}, 8));
}

TEST(FieldCore, LocalMagnetizationOfBasisStates) {
    DoubletField f(lattice(2));
    const double h = 1.0 / std::sqrt(2.0);
    f.set(0, 1.0, 0.0);
    f.set(1, 0.0, 1.0);
    f.set(2, h, h);
    f.set(3, h, cplx(0.0, h));

    auto m = local_magnetization(f, {0, 0});
    EXPECT_DOUBLE_EQ(m.mx, 0.0);
    EXPECT_DOUBLE_EQ(m.my, 0.0);
    EXPECT_DOUBLE_EQ(m.mz, 1.0);
    m = local_magnetization(f, {0, 1});
    EXPECT_DOUBLE_EQ(m.mz, -1.0);
    m = local_magnetization(f, {1, 0});
    EXPECT_NEAR(m.mx, 1.0, 1e-15);
    EXPECT_NEAR(m.my, 0.0, 1e-15);
    EXPECT_NEAR(m.mz, 0.0, 1e-15);
    m = local_magnetization(f, {1, 1});
    EXPECT_NEAR(m.my, 1.0, 1e-15);

    EXPECT_THROW(local_magnetization(f, {2, 0}), IndexError);
    EXPECT_THROW(local_magnetization(f, {0, 5}), IndexError);
}

TEST(FieldCore, NetMagnetizationAverages) {
    const auto cfg = lattice(2);
    DoubletField f(cfg);
    const double h = 1.0 / std::sqrt(2.0);
    f.set(0, 1.0, 0.0);
    for (std::size_t i = 1; i < 4; ++i) f.set(i, h, h);
    const Magnetization m = net_magnetization(f);
    EXPECT_NEAR(m.mx, 0.75, 1e-15);
    EXPECT_NEAR(m.my, 0.0, 1e-15);
    EXPECT_NEAR(m.mz, 0.25, 1e-15);

    EXPECT_EQ(net_magnetization(new_field(lattice(4), all_ones(lattice(4)))).mz, 1.0);
    Pattern half(lattice(4));
    for (std::size_t i = 0; i < 8; ++i) half.bits[i] = 1;
    EXPECT_EQ(net_magnetization(new_field(lattice(4), half)).mz, 0.0);
}

TEST(FieldCore, TotalNorm) {
    EXPECT_EQ(total_norm(new_field(lattice(20), all_ones(lattice(20)))), 400.0);
    EXPECT_EQ(total_norm(DoubletField(lattice(3))), 0.0);
}

TEST(FieldCore, BinarizeBasisFields) {
    const auto cfg = lattice(5);
    EXPECT_EQ(binarize(new_field(cfg, all_ones(cfg))), all_ones(cfg));
    EXPECT_EQ(binarize(new_field(cfg, Pattern(cfg, 0))), Pattern(cfg, 0));
}

TEST(FieldCore, ZeroMzCountsAsUp) {
    DoubletField f(lattice(1));
    const double h = 1.0 / std::sqrt(2.0);
    f.set(0, h, -h);
    EXPECT_EQ(binarize(f).bits[0], 1);
    EXPECT_EQ(order_parameter(f).n_u, 1u);
}

TEST(FieldCoreProperty, PatternRoundTripAndCodeConsistency) {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cfg = lattice(2 + rng.index(15));
        const Pattern p = random_pattern(cfg, rng);
        EXPECT_EQ(binarize(new_field(cfg, p)), p);
        const DoubletField f = new_field(cfg, NormalRandom{}, rng.next());
        EXPECT_EQ(order_parameter(binarize(f)), order_parameter(f));
    }
}

TEST(FieldCoreProperty, MagnetizationBoundedByDensity) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        DoubletField f(lattice(6));
        double max_rho = 0.0;
        for (std::size_t i = 0; i < f.sites(); ++i) {
            f.set(i, cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)), cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)));
            const Magnetization m = site_magnetization(f, i);
            // pure spinor: |m| == rho
            EXPECT_NEAR(m.norm(), site_density(f, i), 1e-12 * site_density(f, i));
            max_rho = std::max(max_rho, site_density(f, i));
        }
        EXPECT_LE(net_magnetization(f).norm(), max_rho + 1e-12);
    }
}

TEST(FieldCore, Su2IdentityAndFlip) {
    const auto cfg = lattice(6);
    const DoubletField f = new_field(cfg, NormalRandom{}, 5);
    EXPECT_EQ(su2_rotate(f, SU2Element::identity()), f);

    const DoubletField up = new_field(cfg, all_ones(cfg));
    const DoubletField flipped = su2_rotate(up, SU2Element::flip());
    EXPECT_EQ(binarize(flipped), Pattern(cfg, 0));
    for (std::size_t i = 0; i < flipped.sites(); ++i) EXPECT_NEAR(std::abs(flipped.d(i)), 1.0, 1e-15);
    EXPECT_EQ(order_parameter(flipped).value, order_parameter(up).value);
}

TEST(FieldCore, Su2RejectsInvalidMatrices) {
    const auto f = new_field(lattice(2), NormalRandom{}, 1);
    SU2Element scaled;
    scaled.a = 2.0;
    scaled.d = 0.5;  // det 1, not unitary
    EXPECT_THROW(su2_rotate(f, scaled), InvalidRotation);
    SU2Element reflection;
    reflection.d = -1.0;  // unitary, det -1
    EXPECT_THROW(su2_rotate(f, reflection), InvalidRotation);
}

TEST(FieldCoreProperty, Su2PreservesNorm) {
    Rng rng(19);
    for (int trial = 0; trial < 25; ++trial) {
        const SU2Element r = SU2Element::random(rng);
        ASSERT_TRUE(r.is_special_unitary());
        const DoubletField f = new_field(lattice(20), NormalRandom{}, rng.next());
        EXPECT_NEAR(total_norm(su2_rotate(f, r)), total_norm(f), 1e-12 * total_norm(f));
    }
}

TEST(FieldCore, AxisAngleRotationOfMagnetization) {
    // A pi/2 turn about y takes +z to +x.
    const auto cfg = lattice(1);
    const auto r = SU2Element::from_axis_angle(0, 1, 0, std::numbers::pi / 2);
    const auto m = net_magnetization(su2_rotate(new_field(cfg, all_ones(cfg)), r));
    EXPECT_NEAR(m.mx, 1.0, 1e-15);
    EXPECT_NEAR(m.mz, 0.0, 1e-15);
}

TEST(Patterns, FlipBitsFlipsExactFraction) {
    const auto cfg = lattice(20);
    Rng rng(1);
    const Pattern p = random_pattern(cfg, rng);
    const Pattern q = flip_bits(p, 0.1, rng);
    std::size_t diff = 0;
    for (std::size_t i = 0; i < p.sites(); ++i) diff += p.bits[i] != q.bits[i];
    EXPECT_EQ(diff, 40u);
    EXPECT_DOUBLE_EQ(pattern_overlap(p, q), 0.8);
}
