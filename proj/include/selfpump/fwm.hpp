#ifndef SELFPUMP_FWM_HPP
#define SELFPUMP_FWM_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "selfpump/laser.hpp"
#include "selfpump/ring.hpp"

namespace selfpump
{
// 1/lambda_i = 2/lambda_p - 1/lambda_s. Throws when the right-hand side is not
// positive (signal at or below half the pump wavelength).
double idler_wavelength(double pump_nm, double signal_nm);

// 2/lambda_p - 1/lambda_s - 1/lambda_i, in 1/nm.
double energy_residual(double idler_nm, double pump_nm, double signal_nm);

// Idler, pump and signal resonances of a ResonanceSet. Construction checks the
// indices are distinct, each wavelength sits within match_tolerance_nm of its
// resonance, and the idler is within energy_tolerance_nm of the
// energy-conserving wavelength.
class FwmTriplet
{
public:
    FwmTriplet(const ResonanceSet &resonances,
               double idler_nm,
               double pump_nm,
               double signal_nm,
               double energy_tolerance_nm = 0.05,
               double match_tolerance_nm = 0.15);

    // Exact triplet from a resonance grid: idler, pump, signal = indices.
    static FwmTriplet from_grid(const ResonanceSet &resonances,
                                std::size_t idler_index,
                                std::size_t pump_index,
                                std::size_t signal_index);

    double idler_nm() const { return idler_nm_; }
    double pump_nm() const { return pump_nm_; }
    double signal_nm() const { return signal_nm_; }
    std::size_t idler_index() const { return idler_index_; }
    std::size_t pump_index() const { return pump_index_; }
    std::size_t signal_index() const { return signal_index_; }

    // Measured idler minus the energy-conserving idler, nm.
    double energy_mismatch_nm() const;

    // Copy of the resonance set with the three roles assigned.
    ResonanceSet labelled(const ResonanceSet &resonances) const;

private:
    FwmTriplet() = default;

    double idler_nm_ = 0.0;
    double pump_nm_ = 0.0;
    double signal_nm_ = 0.0;
    std::size_t idler_index_ = 0;
    std::size_t pump_index_ = 0;
    std::size_t signal_index_ = 0;
};

struct FwmParameters
{
    double gamma_per_w_per_m = 300.0;
    double interaction_length_um = 0.0; // ring circumference when 0

    double effective_length_um(const RingGeometry &geom) const;
};

// Intensity enhancement at each resonance centre.
struct ResonantEnhancement
{
    double idler = 1.0;
    double pump = 1.0;
    double signal = 1.0;

    static ResonantEnhancement from_rings(const CouplingConfig &idler_ring,
                                          const CouplingConfig &pump_ring,
                                          const CouplingConfig &signal_ring);
};

// Stimulated idler power
//   P_i = (gamma L)^2 P_p^2 P_s F_p^2 F_s F_i
// with F the on-resonance intensity enhancement (field enhancement to the
// fourth power for the pump, squared for signal and idler). Pump in mW,
// signal in uW, result in mW. No pump depletion, unit phase matching.
double idler_power_mw(const ResonantEnhancement &enhancement,
                      double gamma_per_w_per_m,
                      double length_um,
                      double pump_mw,
                      double signal_uw);

enum class SweepAxis
{
    pump,
    signal,
};

std::string_view to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(std::string_view name);

struct ConversionRow
{
    double current_ma = 0.0; // drive current behind the pump power (pump axis)
    double pump_mw = 0.0;
    double signal_uw = 0.0;
    double idler_mw = 0.0;
};

struct ConversionSweep
{
    SweepAxis axis = SweepAxis::pump;
    std::vector<ConversionRow> rows;
    // ln(idler) against ln(swept power) over the rows where both are positive.
    double loglog_slope = 0.0;
};

struct FwmSetup
{
    ResonantEnhancement enhancement;
    double gamma_per_w_per_m = 300.0;
    double length_um = 0.0;
};

// Pump axis: the coupled pump power at each current comes from the loop laser
// (power delivered to the ring input bus) and signal power is fixed.
ConversionSweep sweep_pump_current(const FwmSetup &setup,
                                   const GainModel &gain,
                                   const LossBudget &budget,
                                   std::span<const double> currents_ma,
                                   double signal_uw);

// Pump axis with explicit pump powers.
ConversionSweep sweep_pump_power(const FwmSetup &setup, std::span<const double> pumps_mw, double signal_uw);

ConversionSweep sweep_signal(const FwmSetup &setup, double pump_mw, std::span<const double> signals_uw);

struct SpectrumWindow
{
    double start_nm;
    double step_pm;
    std::size_t count;

    double wavelength(std::size_t k) const { return start_nm + static_cast<double>(k) * step_pm * 1e-3; }
};

struct IdlerSpectrum
{
    std::vector<double> wavelength_nm;
    std::vector<double> bare;     // Lorentzian line, mW/nm
    std::vector<double> measured; // after the spectrometer kernel, mW/nm
};

// Idler line of the given centre and FWHM whose full area equals
// idler_power_mw, seen through a Gaussian spectrometer of the given FWHM.
IdlerSpectrum idler_spectrum(double idler_center_nm,
                             double idler_fwhm_nm,
                             double idler_power_mw,
                             double resolution_pm,
                             const SpectrumWindow &window);

// Window centred on the idler resonance, span_fwhm linewidths wide.
SpectrumWindow centred_window(double center_nm, double fwhm_nm, double span_fwhm, double step_pm);

} // namespace selfpump

#endif // SELFPUMP_FWM_HPP
