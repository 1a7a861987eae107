#include "selfpump/joint_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "selfpump/error.hpp"
#include "selfpump/instrument.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
std::size_t SpectralAxis::size() const
{
    if (!all_finite(center_nm, span_nm, step_pm) || step_pm <= 0.0 || span_nm < 0.0)
        throw InvalidArgument("spectral axis needs a positive step and non-negative span");
    return static_cast<std::size_t>(std::llround(span_nm / (step_pm * 1e-3))) + 1;
}

std::vector<double> SpectralAxis::wavelengths() const
{
    const auto n = size();
    const double step = step_pm * 1e-3;
    const double first = center_nm - 0.5 * static_cast<double>(n - 1) * step;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = first + static_cast<double>(k) * step;
    return out;
}

std::vector<double> SpectralAxis::frequency_weights() const
{
    const auto wl = wavelengths();
    const auto n = wl.size();
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = 1.0;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? n - 1 : k + 1;
        out[k] = std::abs(frequency_ghz(wl[lo]) - frequency_ghz(wl[hi])) / static_cast<double>(hi - lo);
    }
    return out;
}

void SpectralGrid::validate(double signal_linewidth_ghz, double idler_linewidth_ghz) const
{
    if (signal.size() < 16 || idler.size() < 16)
        throw InvalidArgument("spectral grid axes need at least 16 points");
    auto check_span = [](const SpectralAxis &axis, double linewidth_ghz, const char *name) {
        if (linewidth_ghz <= 0.0)
            return;
        const double fwhm_nm = linewidth_nm_from_ghz(linewidth_ghz, axis.center_nm);
        if (axis.span_nm < 4.0 * fwhm_nm * (1.0 - 1e-9))
            throw InvalidArgument(std::string(name) + " axis spans fewer than four resonance linewidths");
    };
    check_span(signal, signal_linewidth_ghz, "signal");
    check_span(idler, idler_linewidth_ghz, "idler");
}

SpectralGrid SpectralGrid::around(double signal_center_nm,
                                  double signal_linewidth_ghz,
                                  double idler_center_nm,
                                  double idler_linewidth_ghz,
                                  double span_fwhm,
                                  double step_pm)
{
    auto axis = [&](double center, double linewidth) {
        const double step_nm = step_pm * 1e-3;
        const double span = span_fwhm * linewidth_nm_from_ghz(linewidth, center);
        // Round the span up to a whole, even number of steps.
        const double steps = 2.0 * std::ceil(0.5 * span / step_nm);
        return SpectralAxis{center, steps * step_nm, step_pm};
    };
    return {axis(signal_center_nm, signal_linewidth_ghz), axis(idler_center_nm, idler_linewidth_ghz)};
}

std::complex<double> two_photon_pump_lineshape(double pump_linewidth_ghz, double sum_detuning_ghz)
{
    if (!std::isfinite(pump_linewidth_ghz) || pump_linewidth_ghz <= 0.0)
        throw InvalidArgument("pump linewidth must be positive");
    const double r = sum_detuning_ghz / pump_linewidth_ghz;
    return {1.0 / (1.0 + r * r), 0.0};
}

std::complex<double> resonance_amplitude(double linewidth_ghz, double detuning_ghz)
{
    if (!std::isfinite(linewidth_ghz) || linewidth_ghz <= 0.0)
        throw InvalidArgument("resonance linewidth must be positive");
    const double h = 0.5 * linewidth_ghz;
    return h / std::complex<double>(h, -detuning_ghz);
}

JointAmplitude jsa(const SpectralGrid &grid, double pump_linewidth_ghz, double signal_linewidth_ghz,
                   double idler_linewidth_ghz)
{
    grid.validate(signal_linewidth_ghz, idler_linewidth_ghz);
    const auto ws = grid.signal.wavelengths();
    const auto wi = grid.idler.wavelengths();
    const double nu_s0 = frequency_ghz(grid.signal.center_nm);
    const double nu_i0 = frequency_ghz(grid.idler.center_nm);

    std::vector<double> os(ws.size()), oi(wi.size());
    std::vector<std::complex<double>> ls(ws.size()), li(wi.size());
    for (std::size_t r = 0; r < ws.size(); ++r) {
        os[r] = frequency_ghz(ws[r]) - nu_s0;
        ls[r] = resonance_amplitude(signal_linewidth_ghz, os[r]);
    }
    for (std::size_t c = 0; c < wi.size(); ++c) {
        oi[c] = frequency_ghz(wi[c]) - nu_i0;
        li[c] = resonance_amplitude(idler_linewidth_ghz, oi[c]);
    }

    JointAmplitude out;
    out.grid = grid;
    out.pump_linewidth_ghz = pump_linewidth_ghz;
    out.signal_linewidth_ghz = signal_linewidth_ghz;
    out.idler_linewidth_ghz = idler_linewidth_ghz;
    out.amplitude.resize(static_cast<Eigen::Index>(ws.size()), static_cast<Eigen::Index>(wi.size()));
    for (std::size_t r = 0; r < ws.size(); ++r)
        for (std::size_t c = 0; c < wi.size(); ++c)
            out.amplitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                two_photon_pump_lineshape(pump_linewidth_ghz, os[r] + oi[c]) * ls[r] * li[c];
    return out;
}

SchmidtResult schmidt(const Eigen::MatrixXcd &amplitude)
{
    if (amplitude.size() == 0 || !amplitude.allFinite())
        throw InvalidArgument("joint amplitude must be non-empty and finite");
    if (amplitude.squaredNorm() == 0.0)
        throw InvalidArgument("joint amplitude is identically zero");

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(amplitude);
    const Eigen::VectorXd &sv = svd.singularValues();

    SchmidtResult out;
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    double total = 0.0;
    for (double s : out.singular_values)
        total += s * s;
    out.coefficients.reserve(out.singular_values.size());
    double purity = 0.0;
    for (double s : out.singular_values) {
        const double lambda = s * s / total;
        out.coefficients.push_back(lambda);
        purity += lambda * lambda;
    }
    out.purity = purity;
    out.schmidt_number = 1.0 / purity;
    return out;
}

SchmidtResult schmidt(const JointAmplitude &ja)
{
    const auto ws = ja.grid.signal.frequency_weights();
    const auto wi = ja.grid.idler.frequency_weights();
    if (static_cast<Eigen::Index>(ws.size()) != ja.amplitude.rows() ||
        static_cast<Eigen::Index>(wi.size()) != ja.amplitude.cols())
        throw InvalidArgument("joint amplitude does not match its grid");
    Eigen::VectorXd rs(ja.amplitude.rows()), cs(ja.amplitude.cols());
    for (Eigen::Index r = 0; r < rs.size(); ++r)
        rs(r) = std::sqrt(ws[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < cs.size(); ++c)
        cs(c) = std::sqrt(wi[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXcd weighted = rs.asDiagonal() * ja.amplitude * cs.asDiagonal();
    return schmidt(weighted);
}

JsdScan simulate_jsd_scan(const FwmTriplet &triplet,
                          const RingDevice &ring,
                          double pump_linewidth_ghz,
                          const JsdScanSettings &settings,
                          double resolution_pm,
                          double amplitude_scale)
{
    if (!all_finite(pump_linewidth_ghz, resolution_pm, amplitude_scale) || pump_linewidth_ghz < 0.0 ||
        resolution_pm < 0.0 || amplitude_scale < 0.0)
        throw InvalidArgument("pump linewidth, resolution and scale must be finite and >= 0");
    if (!(settings.signal_step_pm > 0.0) || !(settings.idler_step_pm > 0.0))
        throw InvalidArgument("scan steps must be positive");
    if (!(settings.signal_stop_nm > settings.signal_start_nm))
        throw InvalidArgument("signal scan must have positive span");

    const double signal_center = triplet.signal_nm();
    const double idler_center = triplet.idler_nm();
    if (signal_center < settings.signal_start_nm || signal_center > settings.signal_stop_nm)
        throw InvalidArgument("signal scan does not cover the signal resonance");
    if (settings.signal_stop_nm - settings.signal_start_nm >= fsr(ring.geometry, signal_center))
        throw InvalidArgument("signal scan spans more than one FSR around the signal resonance");

    const double nu_pump2 = 2.0 * frequency_ghz(triplet.pump_nm());
    const double x = ring.coupling.round_trip_factor();
    auto filter = [&](double wl, double center) {
        const double phase = detuning_phase(ring.geometry, wl, center);
        return std::norm((1.0 - x) / (1.0 - x * std::polar(1.0, phase)));
    };

    JsdScan scan;
    const double sstep = settings.signal_step_pm * 1e-3;
    const auto ns = static_cast<std::size_t>(
                        std::floor((settings.signal_stop_nm - settings.signal_start_nm) / sstep + 1e-9)) +
                    1;
    for (std::size_t k = 0; k < ns; ++k)
        scan.signal_nm.push_back(settings.signal_start_nm + static_cast<double>(k) * sstep);

    // Idler pixels on a grid through the idler resonance centre.
    const double istep = settings.idler_step_pm * 1e-3;
    // The idler image runs backwards relative to the signal scan.
    const double i_a = wavelength_nm(nu_pump2 - frequency_ghz(scan.signal_nm.front()));
    const double i_b = wavelength_nm(nu_pump2 - frequency_ghz(scan.signal_nm.back()));
    const double i_lo = std::min(i_a, i_b) - settings.idler_margin_nm;
    const double i_hi = std::max(i_a, i_b) + settings.idler_margin_nm;
    const auto k_lo = static_cast<long>(std::floor((i_lo - idler_center) / istep));
    const auto k_hi = static_cast<long>(std::ceil((i_hi - idler_center) / istep));
    for (long k = k_lo; k <= k_hi; ++k)
        scan.idler_nm.push_back(idler_center + static_cast<double>(k) * istep);
    const auto ni = scan.idler_nm.size();

    std::vector<double> idler_filter(ni), idler_nu(ni);
    for (std::size_t j = 0; j < ni; ++j) {
        idler_filter[j] = filter(scan.idler_nm[j], idler_center);
        idler_nu[j] = frequency_ghz(scan.idler_nm[j]);
    }

    scan.intensity.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ni));
    std::vector<double> column(ni);
    for (std::size_t r = 0; r < ns; ++r) {
        const double ls = filter(scan.signal_nm[r], signal_center);
        const double nu_s = frequency_ghz(scan.signal_nm[r]);
        std::fill(column.begin(), column.end(), 0.0);
        if (pump_linewidth_ghz == 0.0) {
            const double target = wavelength_nm(nu_pump2 - nu_s);
            const auto j = static_cast<long>(std::lround((target - scan.idler_nm.front()) / istep));
            if (j >= 0 && static_cast<std::size_t>(j) < ni)
                column[static_cast<std::size_t>(j)] = ls * filter(target, idler_center);
        } else {
            for (std::size_t j = 0; j < ni; ++j) {
                const double pump = std::norm(two_photon_pump_lineshape(pump_linewidth_ghz, nu_s + idler_nu[j] - nu_pump2));
                column[j] = ls * idler_filter[j] * pump;
            }
        }
        const auto blurred = convolve_gaussian(column, settings.idler_step_pm, resolution_pm);
        for (std::size_t j = 0; j < ni; ++j)
            scan.intensity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = amplitude_scale * blurred[j];
    }
    return scan;
}

RidgeFit ridge_fit(const JsdScan &scan)
{
    const auto ns = scan.signal_nm.size();
    const auto ni = scan.idler_nm.size();
    if (scan.intensity.rows() != static_cast<Eigen::Index>(ns) || scan.intensity.cols() != static_cast<Eigen::Index>(ni))
        throw InvalidArgument("scan matrix does not match its axes");
    if (ni < 2)
        throw InvalidArgument("scan needs at least two idler pixels");
    const double pixel = std::abs(scan.idler_nm[1] - scan.idler_nm[0]);
    const double floor_var = pixel * pixel / 12.0;

    std::vector<double> xs, centroids, weights;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < ns; ++r) {
        double total = 0.0, first = 0.0;
        for (std::size_t j = 0; j < ni; ++j) {
            const double v = scan.intensity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
            if (v < 0.0 || !std::isfinite(v))
                throw InvalidArgument("scan intensities must be finite and >= 0");
            total += v;
            first += v * scan.idler_nm[j];
        }
        if (total <= 0.0)
            continue;
        const double c = first / total;
        double var = 0.0;
        for (std::size_t j = 0; j < ni; ++j) {
            const double d = scan.idler_nm[j] - c;
            var += scan.intensity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * d * d;
        }
        var /= total;
        xs.push_back(scan.signal_nm[r]);
        centroids.push_back(c);
        weights.push_back(1.0 / (var + floor_var));
        rows.push_back(r);
    }
    if (xs.size() < 2)
        throw InvalidArgument("fewer than two scan columns carry intensity");

    // Weighted line through the centroids (x centred for conditioning).
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sw += weights[k];
        sx += weights[k] * xs[k];
        sy += weights[k] * centroids[k];
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += weights[k] * (xs[k] - xm) * (xs[k] - xm);
        sxy += weights[k] * (xs[k] - xm) * (centroids[k] - ym);
    }
    if (sxx <= 0.0)
        throw InvalidArgument("ridge fit needs at least two distinct signal settings");

    RidgeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    fit.columns_used = xs.size();

    double spread = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double line = fit.slope * xs[k] + fit.intercept;
        double total = 0.0, second = 0.0;
        for (std::size_t j = 0; j < ni; ++j) {
            const double v = scan.intensity(static_cast<Eigen::Index>(rows[k]), static_cast<Eigen::Index>(j));
            const double d = scan.idler_nm[j] - line;
            total += v;
            second += v * d * d;
        }
        spread += weights[k] * second / total;
    }
    fit.rms_width_nm = std::sqrt(spread / sw) / std::sqrt(1.0 + fit.slope * fit.slope);
    return fit;
}

} // namespace selfpump
