#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "selfpump/error.hpp"
#include "selfpump/fwm.hpp"
#include "selfpump/instrument.hpp"
#include "selfpump/units.hpp"

using namespace selfpump;

namespace
{
const RingGeometry kGeom = RingGeometry::from_fsr(10.0, 7.5, 1555.87);
const CouplingConfig kCoupling = calibrate_symmetric(kGeom, 1555.87, 2750.0, 0.04);

FwmSetup default_setup()
{
    return {ResonantEnhancement::from_rings(kCoupling, kCoupling, kCoupling), 300.0, kGeom.round_trip_length_um()};
}
} // namespace

TEST(IdlerWavelength, MeasuredTriplet)
{
    const double li = idler_wavelength(1555.87, 1563.45);
    EXPECT_NEAR(li, 1548.39, 0.05);
    EXPECT_NEAR(li, 1548.3631, 1e-3);
}

TEST(IdlerWavelength, DegenerateAndInvolution)
{
    EXPECT_NEAR(idler_wavelength(1555.87, 1555.87), 1555.87, 1e-12);
    for (double s : {1540.0, 1563.45, 1600.0}) {
        const double i = idler_wavelength(1555.87, s);
        EXPECT_NEAR(idler_wavelength(1555.87, i), s, 1e-9);
        EXPECT_NEAR(energy_residual(i, 1555.87, s), 0.0, 1e-15);
    }
}

TEST(IdlerWavelength, RejectsNoIdler)
{
    EXPECT_THROW(idler_wavelength(1555.87, 700.0), InvalidArgument);
    EXPECT_THROW(idler_wavelength(1555.87, 777.935), InvalidArgument);
    EXPECT_THROW(idler_wavelength(-1.0, 1500.0), InvalidArgument);
}

TEST(Triplet, MeasuredTripletOnGrid)
{
    const auto set = resonance_grid(kGeom, kCoupling, 1555.87, 2);
    const FwmTriplet t(set, 1548.39, 1555.87, 1563.45);
    EXPECT_EQ(t.pump_index(), 2u);
    EXPECT_EQ(t.idler_index(), 1u);
    EXPECT_EQ(t.signal_index(), 3u);
    const auto labelled = t.labelled(set);
    EXPECT_EQ(labelled[2].role, ResonanceRole::pump);
    EXPECT_EQ(labelled[1].role, ResonanceRole::idler);
}

TEST(Triplet, Rejections)
{
    const auto set = resonance_grid(kGeom, kCoupling, 1555.87, 2);
    EXPECT_THROW(FwmTriplet(set, 1548.0, 1555.87, 1563.45), InvalidArgument);    // energy
    EXPECT_THROW(FwmTriplet(set, 1555.87, 1555.87, 1555.87), InvalidArgument);   // same resonance
    EXPECT_THROW(FwmTriplet(set, 1548.1, 1555.87, 1563.75, 0.5), InvalidArgument); // off grid
}

TEST(Triplet, GeneratedTripletsConserveEnergyExactly)
{
    const auto set = resonance_grid(kGeom, kCoupling, 1555.87, 3);
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto t = FwmTriplet::from_grid(set, 3 - k, 3, 3 + k);
        EXPECT_NEAR(energy_residual(t.idler_nm(), t.pump_nm(), t.signal_nm()), 0.0, 1e-15);
    }
}

TEST(IdlerPower, Scaling)
{
    const auto s = default_setup();
    const double base = idler_power_mw(s.enhancement, 300.0, s.length_um, 1.0, 100.0);
    EXPECT_NEAR(idler_power_mw(s.enhancement, 300.0, s.length_um, 2.0, 100.0) / base, 4.0, 1e-12);
    EXPECT_NEAR(idler_power_mw(s.enhancement, 300.0, s.length_um, 1.0, 200.0) / base, 2.0, 1e-12);
    EXPECT_EQ(idler_power_mw(s.enhancement, 300.0, s.length_um, 0.0, 100.0), 0.0);
    EXPECT_THROW(idler_power_mw(s.enhancement, 0.0, s.length_um, 1.0, 1.0), InvalidArgument);
    EXPECT_THROW(idler_power_mw(s.enhancement, 300.0, s.length_um, -1.0, 1.0), InvalidArgument);
}

TEST(IdlerPower, ExplicitArithmetic)
{
    const ResonantEnhancement fe{2.0, 3.0, 5.0};
    // (300 * 1e-4)^2 * (1e-3)^2 * 1e-6 * 9 * 5 * 2  W  -> mW
    const double expected = std::pow(300.0 * 100e-6, 2) * 1e-6 * 1e-6 * 90.0 * 1e3;
    EXPECT_NEAR(idler_power_mw(fe, 300.0, 100.0, 1.0, 1.0) / expected, 1.0, 1e-12);
}

TEST(IdlerPower, SignalIdlerSwapSymmetry)
{
    const ResonantEnhancement a{2.0, 3.0, 5.0}, b{5.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(idler_power_mw(a, 300.0, 62.8, 1.87, 130.0), idler_power_mw(b, 300.0, 62.8, 1.87, 130.0));
}

TEST(IdlerPower, FiniteDifferenceExponentsOverFourDecades)
{
    const auto s = default_setup();
    auto f = [&](double p, double q) { return idler_power_mw(s.enhancement, 300.0, s.length_um, p, q); };
    for (double x = 1e-3; x <= 10.0; x *= 10.0) {
        const double h = 1e-4;
        EXPECT_NEAR((std::log(f(x * std::exp(h), 100.0)) - std::log(f(x * std::exp(-h), 100.0))) / (2 * h), 2.0, 1e-9);
        EXPECT_NEAR((std::log(f(1.0, x * std::exp(h))) - std::log(f(1.0, x * std::exp(-h)))) / (2 * h), 1.0, 1e-9);
    }
}

TEST(Sweeps, LogLogSlopes)
{
    const auto s = default_setup();
    std::vector<double> p, q;
    for (int k = 0; k <= 40; ++k) {
        p.push_back(1e-3 * std::pow(10.0, k / 10.0));
        q.push_back(1e-1 * std::pow(10.0, k / 10.0));
    }
    EXPECT_NEAR(sweep_pump_power(s, p, 130.0).loglog_slope, 2.0, 1e-9);
    EXPECT_NEAR(sweep_signal(s, 1.87, q).loglog_slope, 1.0, 1e-9);
    EXPECT_THROW(sweep_signal(s, 1.87, std::vector<double>{1.0}), InvalidArgument);
}

TEST(Sweeps, ZeroFixedPowerGivesZeroCurve)
{
    const auto s = default_setup();
    for (const auto &r : sweep_signal(s, 0.0, std::vector<double>{1.0, 10.0, 100.0}).rows)
        EXPECT_EQ(r.idler_mw, 0.0);
}

TEST(Sweeps, PumpCurrentMonotone)
{
    const auto s = default_setup();
    const auto g = GainModel::calibrated(90.0, 20.0, 2.5);
    std::vector<double> currents;
    for (double i = 150.0; i <= 300.0; i += 10.0)
        currents.push_back(i);
    const auto sweep = sweep_pump_current(s, g, LossBudget::bench_default(), currents, 130.0);
    for (std::size_t k = 1; k < sweep.rows.size(); ++k)
        EXPECT_GT(sweep.rows[k].idler_mw, sweep.rows[k - 1].idler_mw);
    EXPECT_NEAR(sweep.loglog_slope, 2.0, 1e-9);
    // coupled pump at 250 mA is close to the bench operating point
    EXPECT_NEAR(ring_input_power(g, LossBudget::bench_default(), 250.0), 1.87, 0.1);
}

TEST(IdlerSpectrum, NarrowKernelRecoversLorentzian)
{
    const double fwhm = 1548.39 / 2750.0;
    const auto w = centred_window(1548.39, fwhm, 12.0, 5.0);
    const auto s = idler_spectrum(1548.39, fwhm, 1.0, 1e-6, w);
    double sup = 0.0;
    for (std::size_t k = 0; k < s.bare.size(); ++k)
        sup = std::max(sup, std::abs(s.measured[k] - s.bare[k]));
    EXPECT_LT(sup, 1e-6);
    EXPECT_THROW(idler_spectrum(1548.39, fwhm, 1.0, 0.0, w), InvalidArgument);
}

TEST(IdlerSpectrum, BroadenedAndMassConserving)
{
    const double fwhm = 1548.39 / 2750.0;
    const auto w = centred_window(1548.39, fwhm, 12.0, 5.0);
    const auto s = idler_spectrum(1548.39, fwhm, 2.0, 67.0, w);
    EXPECT_GT(measured_fwhm(s.wavelength_nm, s.measured), measured_fwhm(s.wavelength_nm, s.bare));
    EXPECT_NEAR(measured_fwhm(s.wavelength_nm, s.bare), fwhm, 1e-3);
    const double in = std::accumulate(s.bare.begin(), s.bare.end(), 0.0);
    const double out = std::accumulate(s.measured.begin(), s.measured.end(), 0.0);
    EXPECT_NEAR(out / in, 1.0, 1e-9);
    // the truncated window holds the Lorentzian fraction (2/pi) atan(span)
    EXPECT_NEAR(in * 5e-3 / 2.0, 2.0 / kPi * std::atan(12.0), 2e-3);
}

TEST(Instrument, KernelNormalisedAndSymmetric)
{
    const auto k = gaussian_bin_kernel(5.0, 67.0);
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-14);
    for (std::size_t i = 0; i < k.size(); ++i)
        EXPECT_NEAR(k[i], k[k.size() - 1 - i], 1e-15);
    EXPECT_EQ(gaussian_bin_kernel(5.0, 0.0).size(), 1u);
}
