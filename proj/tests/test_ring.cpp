#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "selfpump/error.hpp"
#include "selfpump/instrument.hpp"
#include "selfpump/ring.hpp"
#include "selfpump/units.hpp"

using namespace selfpump;

namespace
{
RingGeometry default_geometry() { return RingGeometry::from_fsr(10.0, 7.5, 1555.87); }
CouplingConfig default_coupling() { return calibrate_symmetric(default_geometry(), 1555.87, 2750.0, 0.04); }

// Sum of partial waves over N round trips, as a field starting at the input bus.
std::complex<double> series_through(const CouplingConfig &c, double phase, int trips)
{
    const std::complex<double> j(0.0, 1.0);
    const double k1 = std::sqrt(1 - c.t1() * c.t1());
    std::complex<double> sum = c.t1();
    std::complex<double> wave = -k1 * k1 * c.t2() * c.a() * std::exp(j * phase);
    const std::complex<double> loop = c.t1() * c.t2() * c.a() * std::exp(j * phase);
    for (int n = 0; n < trips; ++n) {
        sum += wave;
        wave *= loop;
    }
    return sum;
}

double series_drop(const CouplingConfig &c, double phase, int trips)
{
    const std::complex<double> j(0.0, 1.0);
    const double k1 = std::sqrt(1 - c.t1() * c.t1());
    const double k2 = std::sqrt(1 - c.t2() * c.t2());
    std::complex<double> sum = 0.0;
    std::complex<double> wave = k1 * k2 * std::sqrt(c.a()) * std::exp(0.5 * j * phase);
    const std::complex<double> loop = c.t1() * c.t2() * c.a() * std::exp(j * phase);
    for (int n = 0; n < trips; ++n) {
        sum += wave;
        wave *= loop;
    }
    return std::norm(sum);
}
} // namespace

TEST(RingGeometry, RejectsBadInputs)
{
    EXPECT_THROW(RingGeometry(0.0, 4.0), InvalidArgument);
    EXPECT_THROW(RingGeometry(10.0, 0.5), InvalidArgument);
    EXPECT_THROW(RingGeometry(10.0, 7.0), InvalidArgument);
    EXPECT_NO_THROW(RingGeometry(10.0, 4.2));
}

TEST(RingGeometry, FromFsrRoundTrips)
{
    const auto g = default_geometry();
    EXPECT_NEAR(fsr(g, 1555.87), 7.5, 1e-12);
    EXPECT_NEAR(g.round_trip_length_um(), 2 * kPi * 10.0, 1e-12);
}

TEST(Coupling, RejectsOutOfRange)
{
    EXPECT_THROW(CouplingConfig(1.0, 0.9, 0.9), InvalidArgument);
    EXPECT_THROW(CouplingConfig(0.9, 0.0, 0.9), InvalidArgument);
    EXPECT_THROW(CouplingConfig(0.9, 0.9, 0.0), InvalidArgument);
    EXPECT_THROW(CouplingConfig(0.9, 0.9, 1.1), InvalidArgument);
    EXPECT_NO_THROW(CouplingConfig(0.9, 0.9, 1.0));
}

TEST(Transfer, LosslessSymmetricFullDrop)
{
    const CouplingConfig c(0.9, 0.9, 1.0);
    EXPECT_NEAR(drop_transmission(c, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(through_transmission(c, 0.0), 0.0, 1e-12);
}

TEST(Transfer, LossDissipatesOnResonance)
{
    const CouplingConfig c(0.9, 0.9, 0.95);
    EXPECT_LT(through_transmission(c, 0.0) + drop_transmission(c, 0.0), 1.0);
}

TEST(Transfer, ClosedFormMatchesRoundTripSeries)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0.3, 0.98), a(0.5, 0.999), ph(-kPi, kPi);
    for (int i = 0; i < 100; ++i) {
        const CouplingConfig c(t(rng), t(rng), a(rng));
        const double phase = ph(rng);
        EXPECT_NEAR(through_transmission(c, phase), std::norm(series_through(c, phase, 10000)), 1e-8);
        EXPECT_NEAR(drop_transmission(c, phase), series_drop(c, phase, 10000), 1e-8);
    }
}

TEST(Transfer, EnergyBound)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(0.05, 0.999), a(0.05, 1.0), ph(-kPi, kPi);
    for (int i = 0; i < 2000; ++i) {
        const CouplingConfig c(t(rng), t(rng), a(rng));
        const double p = ph(rng);
        const double sum = through_transmission(c, p) + drop_transmission(c, p);
        EXPECT_LE(sum, 1.0 + 1e-12);
        if (c.a() < 0.999)
            EXPECT_LT(sum, 1.0);
    }
    const CouplingConfig lossless(0.7, 0.4, 1.0);
    for (double p : {0.0, 0.3, 2.0})
        EXPECT_NEAR(through_transmission(lossless, p) + drop_transmission(lossless, p), 1.0, 1e-12);
}

TEST(Transfer, CriticalCouplingBothDirections)
{
    // t1 = t2 a  =>  zero through transmission
    for (double t2 : {0.5, 0.8, 0.95})
        for (double a : {0.6, 0.9, 0.99}) {
            const CouplingConfig c(t2 * a, t2, a);
            EXPECT_NEAR(through_transmission(c, 0.0), 0.0, 1e-10);
            EXPECT_TRUE(c.critically_coupled());
        }
    // zero through transmission => t1 = t2 a (off critical gives a finite dip)
    const CouplingConfig off(0.85, 0.9, 0.9);
    EXPECT_GT(through_transmission(off, 0.0), 1e-10);
    EXPECT_FALSE(off.critically_coupled());
}

TEST(Transfer, Periodic)
{
    const auto c = default_coupling();
    for (double p : {0.0, 0.01, 1.0, -2.5}) {
        EXPECT_NEAR(through_transmission(c, p), through_transmission(c, p + 2 * kPi), 1e-12);
        EXPECT_NEAR(drop_transmission(c, p), drop_transmission(c, p - 2 * kPi), 1e-12);
        EXPECT_NEAR(field_enhancement(c, p), field_enhancement(c, p + 4 * kPi), 1e-10);
    }
}

TEST(FieldEnhancement, VanishesWithCoupling)
{
    EXPECT_LT(field_enhancement(CouplingConfig(0.999999, 0.9, 0.9), 0.0), 1e-4);
}

TEST(FieldEnhancement, MaximalOnResonance)
{
    const auto c = default_coupling();
    const double peak = field_enhancement(c, 0.0);
    for (int k = 1; k < 200; ++k)
        EXPECT_LT(field_enhancement(c, 2 * kPi * k / 200.0), peak);
}

TEST(FieldEnhancement, OnOffRatioMatchesCirculatingSum)
{
    const auto c = default_coupling();
    auto circulating = [&](double phase) {
        const std::complex<double> j(0.0, 1.0);
        const std::complex<double> loop = c.t1() * c.t2() * c.a() * std::exp(j * phase);
        std::complex<double> sum = 0.0, w = 1.0;
        for (int n = 0; n < 10000; ++n) {
            sum += w;
            w *= loop;
        }
        return std::norm(sum);
    };
    const double ratio = field_enhancement(c, 0.0) / field_enhancement(c, kPi);
    EXPECT_NEAR(ratio / (circulating(0.0) / circulating(kPi)), 1.0, 1e-8);
}

TEST(Linewidth, MatchesNumericHalfMaximumScan)
{
    const auto c = default_coupling();
    const int n = 400001;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = -0.5 + i * (1.0 / (n - 1));
        y[i] = drop_transmission(c, x[i]);
    }
    EXPECT_NEAR(measured_fwhm(x, y) / linewidth_phase(c), 1.0, 1e-3);
}

TEST(LoadedQ, DefaultCalibrationHitsTargets)
{
    const auto g = default_geometry();
    const auto c = default_coupling();
    EXPECT_NEAR(loaded_q(c, g, 1555.87), 2750.0, 1e-6);
    EXPECT_NEAR(through_transmission(c, 0.0), 0.04, 1e-9);
    EXPECT_DOUBLE_EQ(c.t1(), c.t2());
    EXPECT_GT(c.t1(), c.t2() * c.a());
}

TEST(LoadedQ, FwhmArithmetic)
{
    const auto g = default_geometry();
    EXPECT_NEAR(1555.87 / loaded_q(calibrate_symmetric(g, 1555.87, 2500.0, 0.04), g, 1555.87), 0.622, 5e-4);
    EXPECT_NEAR(1555.87 / loaded_q(calibrate_symmetric(g, 1555.87, 3000.0, 0.04), g, 1555.87), 0.519, 5e-4);
}

TEST(LoadedQ, HalvingLossRateDoublesQ)
{
    const auto g = default_geometry();
    // round-trip loss rate 1 - x: halve it in the high-Q limit
    const CouplingConfig c1(std::sqrt(0.998), std::sqrt(0.998), 0.998);
    const double x1 = c1.round_trip_factor();
    const double x2 = 1 - 0.5 * (1 - x1);
    const CouplingConfig c2(std::cbrt(x2), std::cbrt(x2), std::cbrt(x2));
    // Q ~ sqrt(x) / (1 - x): twice the Q up to the sqrt(x) prefactor
    EXPECT_NEAR(loaded_q(c2, g, 1555.87) / loaded_q(c1, g, 1555.87), 2.0 * std::sqrt(x2 / x1), 1e-5);
    EXPECT_NEAR(loaded_q(c2, g, 1555.87) / loaded_q(c1, g, 1555.87), 2.0, 3e-3);
}

TEST(ResonanceGrid, NeighboursMatchMeasuredTriplet)
{
    const auto g = default_geometry();
    const auto set = resonance_grid(g, default_coupling(), 1555.87, 1);
    ASSERT_EQ(set.size(), 3u);
    EXPECT_NEAR(set[0].wavelength_nm, 1548.39, 0.15);
    EXPECT_NEAR(set[1].wavelength_nm, 1555.87, 1e-12);
    EXPECT_NEAR(set[2].wavelength_nm, 1563.45, 0.15);
    EXPECT_NO_THROW(set.validate(g));
}

TEST(ResonanceGrid, SingletonForZero)
{
    const auto set = resonance_grid(default_geometry(), default_coupling(), 1555.87, 0);
    ASSERT_EQ(set.size(), 1u);
    EXPECT_DOUBLE_EQ(set[0].wavelength_nm, 1555.87);
}

TEST(ResonanceGrid, SpacingsEqualLocalFsr)
{
    const auto g = default_geometry();
    const auto set = resonance_grid(g, default_coupling(), 1555.87, 4);
    for (std::size_t i = 0; i + 1 < set.size(); ++i) {
        const double l1 = set[i].wavelength_nm, l2 = set[i + 1].wavelength_nm;
        // independent recomputation: phase advances by exactly 2 pi
        const double dphi = 2 * kPi * g.optical_length_nm() * (1 / l1 - 1 / l2);
        EXPECT_NEAR(dphi, 2 * kPi, 1e-9);
        EXPECT_NEAR((l2 - l1) / fsr(g, std::sqrt(l1 * l2)), 1.0, 1e-6);
    }
}

TEST(ResonanceGrid, SitsOnTransmissionMinima)
{
    const auto g = default_geometry();
    const auto c = default_coupling();
    const RingDevice dev{g, c, 1555.87};
    const auto set = resonance_grid(g, c, 1555.87, 2);
    for (const auto &r : set.entries())
        EXPECT_NEAR(dev.through(r.wavelength_nm), through_transmission(c, 0.0), 1e-9);
}

TEST(ResonanceSet, ValidationAndRoles)
{
    const auto g = default_geometry();
    auto set = resonance_grid(g, default_coupling(), 1555.87, 1);
    set.assign_role(1, ResonanceRole::pump);
    EXPECT_EQ(set[1].role, ResonanceRole::pump);
    // a role lives on one resonance at a time
    set.assign_role(0, ResonanceRole::pump);
    EXPECT_EQ(set[0].role, ResonanceRole::pump);
    EXPECT_EQ(set[1].role, ResonanceRole::unassigned);
    EXPECT_THROW(set.assign_role(3, ResonanceRole::idler), InvalidArgument);
    EXPECT_EQ(set.nearest(1563.0), 2u);

    auto bad = set.entries();
    std::swap(bad[0], bad[1]);
    EXPECT_THROW(ResonanceSet(bad).validate(g), InvalidArgument);
}

TEST(Sampling, RowCountAndErrors)
{
    const RingDevice dev{default_geometry(), default_coupling(), 1555.87};
    const auto a = sample_ring_spectrum(dev, 1540, 1572, 50);
    const auto b = sample_ring_spectrum(dev, 1540, 1572, 25);
    EXPECT_EQ(a.size(), 641u);
    EXPECT_NEAR(static_cast<double>(b.size()), 2.0 * a.size(), 1.0);
    EXPECT_THROW(sample_ring_spectrum(dev, 1550, 1550, 50), InvalidArgument);
    EXPECT_THROW(sample_ring_spectrum(dev, 1540, 1572, 0), InvalidArgument);
    EXPECT_THROW(sample_ring_spectrum(dev, 1540, 1572, -5), InvalidArgument);
}
