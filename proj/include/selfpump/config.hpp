#ifndef SELFPUMP_CONFIG_HPP
#define SELFPUMP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfpump/fwm.hpp"
#include "selfpump/joint_spectrum.hpp"
#include "selfpump/laser.hpp"
#include "selfpump/ring.hpp"

namespace selfpump
{
// Experiment description. Every default reproduces the bench setup: 10 um
// add-drop ring with FSR 7.5 nm at the 1555.87 nm lasing resonance, loaded Q
// 2750 and 4% through extinction, 18 dB loop plus 2 dB ring insertion,
// amplifier reaching 20 dB small-signal gain at 90 mA.
struct RingSection
{
    double radius_um = 10.0;
    std::optional<double> group_index; // derived from fsr_nm when absent
    double fsr_nm = 7.5;
    double reference_wavelength_nm = 1555.87;
    // Explicit coupling; otherwise calibrated from the targets below.
    std::optional<double> t1, t2, a;
    double target_loaded_q = 2750.0;
    double target_through_extinction = 0.04;
    std::size_t resonances_each_side = 2;

    double spectrum_start_nm = 1540.0;
    double spectrum_stop_nm = 1572.0;
    double spectrum_resolution_pm = 50.0;
    double spectrum_noise = 0.0; // additive Gaussian noise, absolute transmission units

    RingGeometry geometry() const;
    CouplingConfig coupling() const;
    RingDevice device() const;
};

struct LaserSection
{
    std::vector<LossElement> loss_elements = LossBudget::bench_default().elements();
    double ring_insertion_db = 2.0;
    std::size_t ring_position = 4;
    std::size_t tap_position = 6;
    double tap_fraction = 0.01;

    std::optional<double> k_np_per_ma; // otherwise from the calibration point
    double calibration_current_ma = 90.0;
    double calibration_gain_db = 20.0;
    double saturation_power_mw = 2.5;
    double max_small_signal_gain_db = 30.0;
    bool clamp_small_signal_gain = false;

    double sweep_start_ma = 0.0;
    double sweep_stop_ma = 300.0;
    double sweep_step_ma = 5.0;
    double tpa_db_per_mw = 0.01;
    double fit_cutoff_ma = 200.0;
    double noise_mw = 0.0; // additive Gaussian noise on the drop power

    LossBudget budget() const;
    GainModel gain() const;
};

struct FwmSection
{
    double gamma_per_w_per_m = 300.0;
    double interaction_length_um = 0.0; // ring circumference when 0
    double idler_nm = 1548.39;
    double pump_nm = 1555.87;
    double signal_nm = 1563.45;
    double energy_tolerance_nm = 0.05;
    double match_tolerance_nm = 0.15;

    // Conversion against drive current at fixed coupled signal.
    double pump_sweep_start_ma = 100.0;
    double pump_sweep_stop_ma = 300.0;
    std::size_t pump_sweep_points = 21;
    double pump_sweep_signal_uw = 130.0;
    // Conversion against coupled signal at fixed drive current.
    double signal_sweep_start_uw = 1.0;
    double signal_sweep_stop_uw = 1000.0;
    std::size_t signal_sweep_points = 31;
    double signal_sweep_current_ma = 250.0;

    // Idler spectrum operating point.
    double spectrum_pump_mw = 1.87;
    double spectrum_signal_uw = 130.0;
    double spectrometer_resolution_pm = 67.0;
    double spectrum_step_pm = 5.0;
    double spectrum_span_fwhm = 12.0;
};

struct JsdSection
{
    double signal_start_nm = 1560.0;
    double signal_stop_nm = 1566.0;
    double signal_step_pm = 10.0;
    double idler_step_pm = 10.0;
    double idler_margin_nm = 0.5;
    double spectrometer_resolution_pm = 67.0;
    double pump_current_ma = 200.0;
    double signal_power_uw = 250.0;
    // Pump linewidth as a fraction of the pump resonance linewidth, unless
    // pump_linewidth_ghz is set.
    double pump_linewidth_fraction = 0.05;
    std::optional<double> pump_linewidth_ghz;
    double schmidt_span_fwhm = 8.0;
    double schmidt_step_pm = 10.0;
};

struct ExperimentConfig
{
    std::uint64_t seed = 1;
    std::string output_directory = "out";
    RingSection ring;
    LaserSection laser;
    FwmSection fwm;
    JsdSection jsd;

    // Raw text the config was parsed from (empty for built-in defaults).
    std::string source_text;

    // Builds every domain object once; throws ConfigError naming the key.
    void validate() const;

    FwmTriplet triplet() const;
    ResonanceSet resonances() const;
    double pump_linewidth_ghz() const;
};

// Strict YAML parser: unknown keys are rejected and every invariant is
// checked before returning.
ExperimentConfig parse_config(std::string_view yaml_text);
ExperimentConfig load_config(const std::filesystem::path &path);

} // namespace selfpump

#endif // SELFPUMP_CONFIG_HPP
