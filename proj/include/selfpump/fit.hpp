#ifndef SELFPUMP_FIT_HPP
#define SELFPUMP_FIT_HPP

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selfpump
{
enum class SpectrumKind
{
    through,
    drop,
    idler,
};

std::string_view to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(std::string_view name);

struct Spectrum
{
    std::vector<double> wavelength_nm;
    std::vector<double> value;
    double resolution_pm = 50.0;
    SpectrumKind kind = SpectrumKind::through;

    // Wavelengths strictly increasing, values finite, transmission kinds in [0, 1.05].
    void validate() const;
};

struct FitParameter
{
    std::string name;
    double value = 0.0;
    double sigma = 0.0;
};

struct FitReport
{
    std::string model;
    std::vector<FitParameter> parameters;
    double residual_rms = 0.0;
    std::size_t points_used = 0;
    std::size_t points_excluded = 0;
    std::size_t iterations = 0;
    bool converged = true;

    const FitParameter &parameter(std::string_view name) const;
    double value(std::string_view name) const { return parameter(name).value; }
    double sigma(std::string_view name) const { return parameter(name).sigma; }

    // "name = value +/- sigma" lines plus bookkeeping.
    std::string to_text() const;
    std::string csv_header() const;
    std::string csv_row() const;
};

// Weighted straight-line regression y = slope*x + intercept. Uncertainties
// come from the covariance scaled by the reduced chi-square (zero for an
// exact two-point line).
FitReport linear_least_squares(std::span<const double> xs,
                               std::span<const double> ys,
                               std::span<const double> weights = {});

struct WavelengthWindow
{
    double min_nm;
    double max_nm;
};

// Lorentzian parameters in fit order: centre, FWHM, signed amplitude, baseline.
using LorentzianParameters = std::array<double, 4>;

double lorentzian(const LorentzianParameters &p, double wavelength_nm);

struct LorentzianFitOptions
{
    std::size_t max_iterations = 200;
    // Start here instead of the deterministic data-driven guess.
    std::optional<LorentzianParameters> initial;
};

// Data-driven start: extremum (smallest wavelength on ties), FWHM from the
// half-depth crossings, baseline from the window edges.
LorentzianParameters lorentzian_initial_guess(const Spectrum &s, WavelengthWindow window);

// Levenberg-Marquardt fit of a Lorentzian plus constant baseline. The report
// carries center_nm, fwhm_nm, amplitude, baseline, q, and extinction (dips)
// or peak (peaks). Throws NonConvergence when the iteration budget runs out
// and InvalidArgument when the window holds several resonances or fewer than
// ten samples across the FWHM.
FitReport fit_lorentzian(const Spectrum &s, WavelengthWindow window, const LorentzianFitOptions &options = {});

struct LasingSample
{
    double current_ma;
    double power_mw;
};

// Linear fit of the above-threshold branch. Points above cutoff_ma are
// excluded. The included set starts as the points above 5% of the maximum
// measured power and shrinks while any point predicts below 5% of the maximum
// prediction; the threshold is the x-intercept.
FitReport fit_lasing_curve(std::span<const LasingSample> points,
                           double cutoff_ma = std::numeric_limits<double>::infinity(),
                           std::span<const double> weights = {});

// Least-squares slope of ln(y) against ln(x) over pairs with x, y > 0.
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

} // namespace selfpump

#endif // SELFPUMP_FIT_HPP
