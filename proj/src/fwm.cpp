#include "selfpump/fwm.hpp"

#include <cmath>
#include <string>

#include "selfpump/error.hpp"
#include "selfpump/fit.hpp"
#include "selfpump/instrument.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
double idler_wavelength(double pump_nm, double signal_nm)
{
    if (!all_finite(pump_nm, signal_nm) || pump_nm <= 0.0 || signal_nm <= 0.0)
        throw InvalidArgument("pump and signal wavelengths must be positive and finite");
    const double inv = 2.0 / pump_nm - 1.0 / signal_nm;
    if (inv <= 0.0)
        throw InvalidArgument("signal at or below half the pump wavelength has no idler");
    return 1.0 / inv;
}

double energy_residual(double idler_nm, double pump_nm, double signal_nm)
{
    return 2.0 / pump_nm - 1.0 / signal_nm - 1.0 / idler_nm;
}

FwmTriplet::FwmTriplet(const ResonanceSet &resonances,
                       double idler_nm,
                       double pump_nm,
                       double signal_nm,
                       double energy_tolerance_nm,
                       double match_tolerance_nm)
    : idler_nm_(idler_nm), pump_nm_(pump_nm), signal_nm_(signal_nm)
{
    const double expected = idler_wavelength(pump_nm, signal_nm);
    if (!std::isfinite(idler_nm) || std::abs(idler_nm - expected) > energy_tolerance_nm)
        throw InvalidArgument("idler " + std::to_string(idler_nm) + " nm violates energy conservation (expected " +
                              std::to_string(expected) + " nm)");
    idler_index_ = resonances.nearest(idler_nm);
    pump_index_ = resonances.nearest(pump_nm);
    signal_index_ = resonances.nearest(signal_nm);
    if (idler_index_ == pump_index_ || pump_index_ == signal_index_ || idler_index_ == signal_index_)
        throw InvalidArgument("idler, pump and signal must lie on distinct resonances");
    const std::pair<std::size_t, double> checks[] = {
        {idler_index_, idler_nm}, {pump_index_, pump_nm}, {signal_index_, signal_nm}};
    for (const auto &[index, wl] : checks)
        if (std::abs(resonances[index].wavelength_nm - wl) > match_tolerance_nm)
            throw InvalidArgument("wavelength " + std::to_string(wl) + " nm is not on a ring resonance");
}

FwmTriplet FwmTriplet::from_grid(const ResonanceSet &resonances,
                                 std::size_t idler_index,
                                 std::size_t pump_index,
                                 std::size_t signal_index)
{
    if (idler_index == pump_index || pump_index == signal_index || idler_index == signal_index)
        throw InvalidArgument("idler, pump and signal must lie on distinct resonances");
    FwmTriplet t;
    t.idler_index_ = idler_index;
    t.pump_index_ = pump_index;
    t.signal_index_ = signal_index;
    t.pump_nm_ = resonances[pump_index].wavelength_nm;
    t.signal_nm_ = resonances[signal_index].wavelength_nm;
    t.idler_nm_ = resonances[idler_index].wavelength_nm;
    if (std::abs(t.idler_nm_ - idler_wavelength(t.pump_nm_, t.signal_nm_)) > 1e-9 * t.idler_nm_)
        throw InvalidArgument("grid resonances do not form an energy-conserving triplet");
    return t;
}

double FwmTriplet::energy_mismatch_nm() const { return idler_nm_ - idler_wavelength(pump_nm_, signal_nm_); }

ResonanceSet FwmTriplet::labelled(const ResonanceSet &resonances) const
{
    ResonanceSet out = resonances;
    out.assign_role(idler_index_, ResonanceRole::idler);
    out.assign_role(pump_index_, ResonanceRole::pump);
    out.assign_role(signal_index_, ResonanceRole::signal);
    return out;
}

double FwmParameters::effective_length_um(const RingGeometry &geom) const
{
    return interaction_length_um > 0.0 ? interaction_length_um : geom.round_trip_length_um();
}

ResonantEnhancement ResonantEnhancement::from_rings(const CouplingConfig &idler_ring,
                                                    const CouplingConfig &pump_ring,
                                                    const CouplingConfig &signal_ring)
{
    return {field_enhancement(idler_ring, 0.0), field_enhancement(pump_ring, 0.0),
            field_enhancement(signal_ring, 0.0)};
}

double idler_power_mw(const ResonantEnhancement &fe,
                      double gamma_per_w_per_m,
                      double length_um,
                      double pump_mw,
                      double signal_uw)
{
    if (!all_finite(gamma_per_w_per_m, length_um, pump_mw, signal_uw))
        throw InvalidArgument("FWM inputs must be finite");
    if (gamma_per_w_per_m <= 0.0 || length_um <= 0.0)
        throw InvalidArgument("nonlinear parameter and interaction length must be positive");
    if (pump_mw < 0.0 || signal_uw < 0.0)
        throw InvalidArgument("pump and signal powers must be >= 0");
    const double gl = gamma_per_w_per_m * length_um * 1e-6; // 1/W
    const double pump_w = pump_mw * 1e-3;
    const double signal_w = signal_uw * 1e-6;
    const double idler_w = gl * gl * pump_w * pump_w * signal_w * fe.pump * fe.pump * fe.signal * fe.idler;
    return idler_w * 1e3;
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::pump ? "pump" : "signal"; }

SweepAxis sweep_axis_from_string(std::string_view name)
{
    if (name == "pump")
        return SweepAxis::pump;
    if (name == "signal")
        return SweepAxis::signal;
    throw InvalidArgument("unknown sweep axis '" + std::string(name) + "'");
}

namespace
{
double row_idler(const FwmSetup &s, double pump_mw, double signal_uw)
{
    return idler_power_mw(s.enhancement, s.gamma_per_w_per_m, s.length_um, pump_mw, signal_uw);
}

void finish(ConversionSweep &sweep)
{
    std::vector<double> xs, ys;
    for (const auto &r : sweep.rows) {
        xs.push_back(sweep.axis == SweepAxis::pump ? r.pump_mw : r.signal_uw);
        ys.push_back(r.idler_mw);
    }
    std::size_t usable = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        usable += xs[i] > 0.0 && ys[i] > 0.0;
    sweep.loglog_slope = usable >= 2 ? loglog_slope(xs, ys) : 0.0;
}

void require_sweep(std::span<const double> values)
{
    if (values.size() < 2)
        throw InvalidArgument("a sweep needs at least two points");
}
} // namespace

ConversionSweep sweep_pump_current(const FwmSetup &setup,
                                   const GainModel &gain,
                                   const LossBudget &budget,
                                   std::span<const double> currents_ma,
                                   double signal_uw)
{
    require_sweep(currents_ma);
    ConversionSweep sweep{SweepAxis::pump, {}, 0.0};
    for (double current : currents_ma) {
        const double pump = ring_input_power(gain, budget, current);
        sweep.rows.push_back({current, pump, signal_uw, row_idler(setup, pump, signal_uw)});
    }
    finish(sweep);
    return sweep;
}

ConversionSweep sweep_pump_power(const FwmSetup &setup, std::span<const double> pumps_mw, double signal_uw)
{
    require_sweep(pumps_mw);
    ConversionSweep sweep{SweepAxis::pump, {}, 0.0};
    for (double pump : pumps_mw)
        sweep.rows.push_back({0.0, pump, signal_uw, row_idler(setup, pump, signal_uw)});
    finish(sweep);
    return sweep;
}

ConversionSweep sweep_signal(const FwmSetup &setup, double pump_mw, std::span<const double> signals_uw)
{
    require_sweep(signals_uw);
    ConversionSweep sweep{SweepAxis::signal, {}, 0.0};
    for (double signal : signals_uw)
        sweep.rows.push_back({0.0, pump_mw, signal, row_idler(setup, pump_mw, signal)});
    finish(sweep);
    return sweep;
}

IdlerSpectrum idler_spectrum(double idler_center_nm,
                             double idler_fwhm_nm,
                             double idler_power_mw,
                             double resolution_pm,
                             const SpectrumWindow &window)
{
    if (!std::isfinite(resolution_pm) || resolution_pm <= 0.0)
        throw InvalidArgument("spectrometer resolution must be positive");
    if (!all_finite(idler_center_nm, idler_fwhm_nm, idler_power_mw) || idler_fwhm_nm <= 0.0 || idler_power_mw < 0.0)
        throw InvalidArgument("idler line parameters must be finite with positive width");
    if (!(window.step_pm > 0.0) || window.count < 3)
        throw InvalidArgument("spectrum window needs a positive step and at least three samples");

    IdlerSpectrum out;
    out.wavelength_nm.reserve(window.count);
    out.bare.reserve(window.count);
    const double hw = 0.5 * idler_fwhm_nm;
    for (std::size_t k = 0; k < window.count; ++k) {
        const double wl = window.wavelength(k);
        const double d = wl - idler_center_nm;
        out.wavelength_nm.push_back(wl);
        out.bare.push_back(idler_power_mw * hw / (kPi * (d * d + hw * hw)));
    }
    out.measured = convolve_gaussian(out.bare, window.step_pm, resolution_pm);
    return out;
}

SpectrumWindow centred_window(double center_nm, double fwhm_nm, double span_fwhm, double step_pm)
{
    if (!(step_pm > 0.0) || !(span_fwhm > 0.0) || !(fwhm_nm > 0.0))
        throw InvalidArgument("window parameters must be positive");
    const auto half = static_cast<std::size_t>(std::ceil(0.5 * span_fwhm * fwhm_nm / (step_pm * 1e-3)));
    return {center_nm - static_cast<double>(half) * step_pm * 1e-3, step_pm, 2 * half + 1};
}

} // namespace selfpump
