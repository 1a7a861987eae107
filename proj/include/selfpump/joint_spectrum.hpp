#ifndef SELFPUMP_JOINT_SPECTRUM_HPP
#define SELFPUMP_JOINT_SPECTRUM_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "selfpump/fwm.hpp"
#include "selfpump/ring.hpp"

namespace selfpump
{
// Uniform wavelength axis: center +/- span/2 in steps of step_pm.
struct SpectralAxis
{
    double center_nm = 0.0;
    double span_nm = 0.0;
    double step_pm = 10.0;

    std::size_t size() const;
    std::vector<double> wavelengths() const;
    // Frequency cell widths |d nu| in GHz, one per sample (central differences).
    std::vector<double> frequency_weights() const;
};

struct SpectralGrid
{
    SpectralAxis signal;
    SpectralAxis idler;

    // Steps positive, at least 16 points per axis, and (when linewidths are
    // given) spans of at least four resonance FWHM.
    void validate(double signal_linewidth_ghz = 0.0, double idler_linewidth_ghz = 0.0) const;

    // Axes centred on the two resonances, span_fwhm linewidths wide.
    static SpectralGrid around(double signal_center_nm,
                               double signal_linewidth_ghz,
                               double idler_center_nm,
                               double idler_linewidth_ghz,
                               double span_fwhm,
                               double step_pm);
};

// Effective two-photon pump amplitude: a real Lorentzian of FWHM
// 2 * pump_linewidth_ghz in the sum detuning.
std::complex<double> two_photon_pump_lineshape(double pump_linewidth_ghz, double sum_detuning_ghz);

// Resonance field amplitude (Gamma/2) / (Gamma/2 - i Omega); |l|^2 has FWHM Gamma.
std::complex<double> resonance_amplitude(double linewidth_ghz, double detuning_ghz);

struct JointAmplitude
{
    SpectralGrid grid;
    Eigen::MatrixXcd amplitude; // rows: signal samples, columns: idler samples
    double pump_linewidth_ghz = 0.0;
    double signal_linewidth_ghz = 0.0;
    double idler_linewidth_ghz = 0.0;

    Eigen::MatrixXd intensity() const { return amplitude.cwiseAbs2(); }
};

// A(Os, Oi) = pump(Os + Oi) * l_s(Os) * l_i(Oi), detunings in exact frequency
// (nu = c / lambda) relative to each axis centre.
JointAmplitude jsa(const SpectralGrid &grid, double pump_linewidth_ghz, double signal_linewidth_ghz,
                   double idler_linewidth_ghz);

struct SchmidtResult
{
    std::vector<double> singular_values; // descending
    std::vector<double> coefficients;    // normalised squares, sum to 1
    double purity = 1.0;
    double schmidt_number = 1.0;
};

// Schmidt decomposition of a raw amplitude matrix (uniform weights).
SchmidtResult schmidt(const Eigen::MatrixXcd &amplitude);

// Schmidt decomposition of a joint amplitude with frequency quadrature
// weights sqrt(d nu_s d nu_i) applied before the SVD.
SchmidtResult schmidt(const JointAmplitude &ja);

struct JsdScanSettings
{
    double signal_start_nm = 1560.0;
    double signal_stop_nm = 1566.0;
    double signal_step_pm = 10.0;
    double idler_step_pm = 10.0;
    // Extra idler range beyond the energy-conserving image of the signal scan.
    double idler_margin_nm = 0.5;
};

struct JsdScan
{
    std::vector<double> signal_nm;
    std::vector<double> idler_nm;
    Eigen::MatrixXd intensity; // rows: signal settings, columns: idler pixels
};

// Stimulated joint-spectral-density scan. For every signal-laser wavelength
// the idler column is the joint intensity at that signal frequency (ring
// resonance filters, two-photon pump lineshape about 2 nu_pump), then blurred
// along the idler axis by a Gaussian spectrometer of resolution_pm FWHM
// (0 disables). pump_linewidth_ghz = 0 places each column's mass in the
// idler pixel nearest the energy-conserving frequency. amplitude_scale
// multiplies every entry.
JsdScan simulate_jsd_scan(const FwmTriplet &triplet,
                          const RingDevice &ring,
                          double pump_linewidth_ghz,
                          const JsdScanSettings &settings,
                          double resolution_pm,
                          double amplitude_scale = 1.0);

struct RidgeFit
{
    double slope = 0.0;     // d(lambda_i)/d(lambda_s)
    double intercept = 0.0; // nm
    double rms_width_nm = 0.0;
    std::size_t columns_used = 0;
};

// Per-signal centroid along the idler axis, then a line fit weighted by the
// inverse of each column's centroid variance (floored at one pixel's
// quantisation variance). The width is the weighted rms spread about the
// fitted line, projected perpendicular to it.
RidgeFit ridge_fit(const JsdScan &scan);

} // namespace selfpump

#endif // SELFPUMP_JOINT_SPECTRUM_HPP
