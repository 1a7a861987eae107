#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "selfpump/error.hpp"
#include "selfpump/joint_spectrum.hpp"
#include "selfpump/units.hpp"

using namespace selfpump;

namespace
{
constexpr double kSignal = 1563.45;
constexpr double kIdler = 1548.39;
// Loaded linewidth of the default ring, Q = 2750 at 1555.87 nm.
const double kGamma = linewidth_ghz_from_nm(1555.87 / 2750.0, 1555.87);

const RingGeometry kGeom = RingGeometry::from_fsr(10.0, 7.5, 1555.87);
const CouplingConfig kCoupling = calibrate_symmetric(kGeom, 1555.87, 2750.0, 0.04);
const RingDevice kRing{kGeom, kCoupling, 1555.87};

FwmTriplet measured_triplet()
{
    return FwmTriplet(resonance_grid(kGeom, kCoupling, 1555.87, 2), 1548.39, 1555.87, 1563.45);
}

// Purity from the reduced density matrix, Tr(rho^2) / Tr(rho)^2, without an SVD.
double purity_oracle(const Eigen::MatrixXcd &a)
{
    const Eigen::MatrixXcd rho = a * a.adjoint();
    const double tr = rho.trace().real();
    return (rho.cwiseAbs2().sum()) / (tr * tr);
}

Eigen::MatrixXcd weighted(const JointAmplitude &ja)
{
    const auto ws = ja.grid.signal.frequency_weights();
    const auto wi = ja.grid.idler.frequency_weights();
    Eigen::MatrixXcd out = ja.amplitude;
    for (Eigen::Index r = 0; r < out.rows(); ++r)
        for (Eigen::Index c = 0; c < out.cols(); ++c)
            out(r, c) *= std::sqrt(ws[static_cast<std::size_t>(r)] * wi[static_cast<std::size_t>(c)]);
    return out;
}

SchmidtResult purity_at(double ratio, double step_pm = 10.0, double span = 8.0)
{
    const auto grid = SpectralGrid::around(kSignal, kGamma, kIdler, kGamma, span, step_pm);
    return schmidt(jsa(grid, ratio * kGamma, kGamma, kGamma));
}
} // namespace

TEST(PumpLineshape, PeakAndTail)
{
    const double d = 3.0;
    const auto peak = two_photon_pump_lineshape(d, 0.0);
    EXPECT_DOUBLE_EQ(peak.real(), 1.0);
    EXPECT_DOUBLE_EQ(peak.imag(), 0.0);
    EXPECT_LT(std::abs(two_photon_pump_lineshape(d, 10 * d)), 0.02);
    EXPECT_THROW(two_photon_pump_lineshape(0.0, 1.0), InvalidArgument);
}

TEST(PumpLineshape, FwhmIsTwiceLinewidth)
{
    const double d = 5.0, step = 1e-3;
    double lo = 0.0, hi = 0.0;
    for (double x = -20.0; x <= 20.0; x += step)
        if (std::abs(two_photon_pump_lineshape(d, x)) >= 0.5) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    EXPECT_NEAR(hi - lo, 2 * d, 2 * step);
}

TEST(ResonanceAmplitude, IntensityFwhm)
{
    EXPECT_NEAR(std::norm(resonance_amplitude(kGamma, 0.5 * kGamma)), 0.5, 1e-12);
    EXPECT_NEAR(std::norm(resonance_amplitude(kGamma, 0.0)), 1.0, 1e-12);
}

TEST(Grid, Validation)
{
    const auto g = SpectralGrid::around(kSignal, kGamma, kIdler, kGamma, 8.0, 10.0);
    EXPECT_NO_THROW(g.validate(kGamma, kGamma));
    EXPECT_EQ(g.signal.size() % 2, 1u);
    SpectralGrid small{{kSignal, 0.1, 10.0}, {kIdler, 0.1, 10.0}};
    EXPECT_THROW(small.validate(), InvalidArgument);
    SpectralGrid narrow{{kSignal, 0.5, 10.0}, {kIdler, 0.5, 10.0}};
    EXPECT_THROW(narrow.validate(kGamma, kGamma), InvalidArgument);
    SpectralAxis bad{kSignal, 1.0, 0.0};
    EXPECT_THROW(bad.size(), InvalidArgument);
}

TEST(Schmidt, RankOneIsPure)
{
    Eigen::VectorXcd f(20), g(30);
    for (int i = 0; i < 20; ++i)
        f(i) = std::complex<double>(std::sin(i + 1.0), 0.3 * i);
    for (int i = 0; i < 30; ++i)
        g(i) = std::exp(-0.1 * i);
    const auto r = schmidt(Eigen::MatrixXcd(f * g.transpose()));
    EXPECT_NEAR(r.purity, 1.0, 1e-10);
    EXPECT_NEAR(r.schmidt_number, 1.0, 1e-10);
}

TEST(Schmidt, TwoEqualModes)
{
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    a(0, 1) = 1.0;
    a(2, 3) = std::complex<double>(0.0, 1.0);
    EXPECT_NEAR(schmidt(a).purity, 0.5, 1e-12);
}

TEST(Schmidt, RejectsZero)
{
    EXPECT_THROW(schmidt(Eigen::MatrixXcd::Zero(3, 3)), InvalidArgument);
}

TEST(Schmidt, InvariantsAndOracle)
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXcd a(12, 17);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a.data()[i] = {n(rng), n(rng)};
        const auto r = schmidt(a);
        EXPECT_NEAR(std::accumulate(r.coefficients.begin(), r.coefficients.end(), 0.0), 1.0, 1e-12);
        EXPECT_NEAR(r.schmidt_number * r.purity, 1.0, 1e-12);
        EXPECT_NEAR(r.purity, purity_oracle(a), 1e-12);
        EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
    }
}

TEST(Jsa, WeightedSchmidtMatchesOracle)
{
    for (double ratio : {10.0, 1.0, 0.1}) {
        const auto grid = SpectralGrid::around(kSignal, kGamma, kIdler, kGamma, 8.0, 10.0);
        const auto ja = jsa(grid, ratio * kGamma, kGamma, kGamma);
        EXPECT_NEAR(schmidt(ja).purity, purity_oracle(weighted(ja)), 1e-10);
    }
}

TEST(Jsa, FlatPumpIsSeparable) { EXPECT_GT(purity_at(100.0).purity, 0.99); }

TEST(Jsa, PurityMonotoneInPumpLinewidth)
{
    double prev = 1.0 + 1e-12;
    for (double ratio : {100.0, 10.0, 3.0, 1.0, 0.3, 0.1, 0.05, 0.01}) {
        const double p = purity_at(ratio).purity;
        EXPECT_LE(p, prev) << ratio;
        EXPECT_GT(p, 0.0);
        prev = p;
    }
}

TEST(Jsa, GoldenPurities)
{
    // Frozen from the reduced-density-matrix oracle on the default grid.
    const std::pair<double, double> golden[] = {
        {10.0, 0.999285197507},
        {1.0, 0.866612036846},
        {0.1, 0.232861120637},
        {0.05, 0.122378162327},
        {0.01, 0.027135042984},
    };
    for (const auto &[ratio, value] : golden) {
        const auto grid = SpectralGrid::around(kSignal, kGamma, kIdler, kGamma, 8.0, 10.0);
        EXPECT_NEAR(purity_oracle(weighted(jsa(grid, ratio * kGamma, kGamma, kGamma))), value, 1e-8) << ratio;
        EXPECT_NEAR(purity_at(ratio).purity, value, 1e-8) << ratio;
    }
}

TEST(Jsa, GridRefinementStable)
{
    for (double ratio : {1.0, 0.1, 0.05})
        EXPECT_LT(std::abs(purity_at(ratio, 10.0).purity - purity_at(ratio, 5.0).purity), 1e-3) << ratio;
}

TEST(Jsa, TransposeSymmetry)
{
    const auto grid = SpectralGrid::around(kSignal, kGamma, kSignal, kGamma, 8.0, 10.0);
    const auto i = jsa(grid, 0.2 * kGamma, kGamma, kGamma).intensity();
    EXPECT_LT((i - i.transpose()).cwiseAbs().maxCoeff(), 1e-12);

    const auto g2 = SpectralGrid::around(kSignal, kGamma, kSignal, 1.5 * kGamma, 8.0, 10.0);
    const auto g3 = SpectralGrid{g2.idler, g2.signal};
    const auto a = jsa(g2, 3.0, kGamma, 1.5 * kGamma).intensity();
    const auto b = jsa(g3, 3.0, 1.5 * kGamma, kGamma).intensity();
    EXPECT_LT((a - b.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Jsa, NarrowPumpRidgeIsAntiDiagonal)
{
    const auto grid = SpectralGrid::around(kSignal, kGamma, kIdler, kGamma, 8.0, 10.0);
    const auto ja = jsa(grid, 0.01 * kGamma, kGamma, kGamma);
    const auto ws = grid.signal.wavelengths();
    const auto wi = grid.idler.wavelengths();
    const auto in = ja.intensity();
    for (Eigen::Index r = 10; r < in.rows() - 10; r += 7) {
        Eigen::Index c = 0;
        in.row(r).maxCoeff(&c);
        const double target = wavelength_nm(frequency_ghz(kSignal) + frequency_ghz(kIdler) -
                                            frequency_ghz(ws[static_cast<std::size_t>(r)]));
        EXPECT_NEAR(wi[static_cast<std::size_t>(c)], target, 0.011);
    }
}

TEST(Scan, RidgeSlopeMatchesEnergyMap)
{
    const double expected = -std::pow(1548.3631 / 1563.45, 2);
    const auto scan = simulate_jsd_scan(measured_triplet(), kRing, 0.05 * kGamma, {}, 67.0);
    const auto fit = ridge_fit(scan);
    EXPECT_NEAR(fit.slope, expected, 0.005);
    EXPECT_NEAR(fit.slope, -0.981, 0.005);
    EXPECT_EQ(fit.columns_used, scan.signal_nm.size());
    EXPECT_EQ(scan.signal_nm.size(), 601u);
}

TEST(Scan, NonNegativeAndMassConserving)
{
    const auto t = measured_triplet();
    const auto raw = simulate_jsd_scan(t, kRing, 0.05 * kGamma, {}, 0.0);
    const auto blurred = simulate_jsd_scan(t, kRing, 0.05 * kGamma, {}, 67.0);
    EXPECT_GE(blurred.intensity.minCoeff(), 0.0);
    for (Eigen::Index r = 0; r < raw.intensity.rows(); r += 25)
        EXPECT_NEAR(blurred.intensity.row(r).sum() / raw.intensity.row(r).sum(), 1.0, 1e-9);
}

TEST(Scan, DeltaLimitCollapsesColumns)
{
    const auto scan = simulate_jsd_scan(measured_triplet(), kRing, 0.0, {}, 0.0);
    for (Eigen::Index r = 0; r < scan.intensity.rows(); ++r)
        EXPECT_EQ((scan.intensity.row(r).array() > 0.0).count(), 1);
    const auto fit = ridge_fit(scan);
    EXPECT_NEAR(fit.slope, -std::pow(1548.3631 / 1563.45, 2), 2e-3);
}

TEST(Scan, ColumnMassFollowsSignalResonance)
{
    const auto t = measured_triplet();
    const auto scan = simulate_jsd_scan(t, kRing, 0.0, {}, 0.0);
    // In the delta limit each column carries drop-like signal filter x idler filter at the image point.
    std::size_t peak = 0;
    Eigen::VectorXd mass = scan.intensity.rowwise().sum();
    mass.maxCoeff(&peak);
    EXPECT_NEAR(scan.signal_nm[peak], 1563.45, 0.011);
    const double x = kCoupling.round_trip_factor();
    const double signal_resonance = resonance_grid(kGeom, kCoupling, 1555.87, 2)[4].wavelength_nm;
    for (std::size_t r = 0; r < scan.signal_nm.size(); r += 50) {
        const double s = scan.signal_nm[r];
        const double i = idler_wavelength(1555.87, s);
        auto airy = [&](double wl, double c) {
            const double ph = detuning_phase(kGeom, wl, c);
            return std::norm((1 - x) / (1.0 - x * std::polar(1.0, ph)));
        };
        // the drop profile normalised to its peak is the same Airy filter
        EXPECT_NEAR(airy(s, signal_resonance), kRing.drop(s) / kRing.drop(signal_resonance), 1e-12);
        EXPECT_NEAR(mass(static_cast<Eigen::Index>(r)), airy(s, t.signal_nm()) * airy(i, t.idler_nm()), 1e-12);
    }
}

TEST(Scan, WiderResolutionWidensRidge)
{
    const auto t = measured_triplet();
    const double w1 = ridge_fit(simulate_jsd_scan(t, kRing, 0.05 * kGamma, {}, 67.0)).rms_width_nm;
    const double w2 = ridge_fit(simulate_jsd_scan(t, kRing, 0.05 * kGamma, {}, 134.0)).rms_width_nm;
    EXPECT_GT(w2, w1);
}

TEST(Scan, Errors)
{
    const auto t = measured_triplet();
    JsdScanSettings off{1565.0, 1568.0, 10.0, 10.0, 0.5};
    EXPECT_THROW(simulate_jsd_scan(t, kRing, 1.0, off, 67.0), InvalidArgument);
    JsdScanSettings wide{1558.0, 1566.0, 10.0, 10.0, 0.5};
    EXPECT_THROW(simulate_jsd_scan(t, kRing, 1.0, wide, 67.0), InvalidArgument);
    EXPECT_THROW(simulate_jsd_scan(t, kRing, -1.0, {}, 67.0), InvalidArgument);
}

TEST(Ridge, ExactAntiDiagonal)
{
    JsdScan scan;
    for (int k = 0; k < 50; ++k) {
        scan.signal_nm.push_back(1560.0 + 0.01 * k);
        scan.idler_nm.push_back(1550.0 + 0.01 * k);
    }
    scan.intensity = Eigen::MatrixXd::Zero(50, 50);
    for (int k = 0; k < 50; ++k)
        scan.intensity(k, 49 - k) = 1.0;
    const auto fit = ridge_fit(scan);
    EXPECT_NEAR(fit.slope, -1.0, 1e-9);
    EXPECT_NEAR(fit.rms_width_nm, 0.0, 1e-9);
}
