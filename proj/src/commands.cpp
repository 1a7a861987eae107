#include "selfpump/commands.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <random>
#include <sstream>

#include "selfpump/csv.hpp"
#include "selfpump/error.hpp"
#include "selfpump/joint_spectrum.hpp"
#include "selfpump/laser.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
namespace
{
std::vector<double> arange(double start, double stop, double step, const char *what)
{
    if (!all_finite(start, stop, step) || !(step > 0.0))
        throw InvalidArgument(std::string(what) + ": step must be positive");
    if (!(stop > start))
        throw InvalidArgument(std::string(what) + ": empty range");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = start + static_cast<double>(k) * step;
    return out;
}

std::vector<double> linspace(double start, double stop, std::size_t n, const char *what)
{
    if (n < 2)
        throw InvalidArgument(std::string(what) + ": a sweep needs at least two points");
    if (!all_finite(start, stop) || !(stop > start))
        throw InvalidArgument(std::string(what) + ": empty range");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(n - 1);
    return out;
}

std::vector<double> logspace(double start, double stop, std::size_t n, const char *what)
{
    if (!(start > 0.0))
        throw InvalidArgument(std::string(what) + ": logarithmic sweep needs a positive start");
    auto out = linspace(std::log10(start), std::log10(stop), n, what);
    for (auto &v : out)
        v = std::pow(10.0, v);
    out.front() = start;
    out.back() = stop;
    return out;
}

std::string row(std::initializer_list<double> values)
{
    return csv_line(std::span<const double>(values.begin(), values.size()));
}

void emit(CommandResult &result, const std::filesystem::path &dir, const std::string &name, const std::string &text)
{
    write_text_file(dir / name, text);
    result.outputs.push_back(name);
}

std::string fmt(double v) { return format_number(v); }
} // namespace

FitModel fit_model_from_string(std::string_view name)
{
    if (name == "lorentzian")
        return FitModel::lorentzian;
    if (name == "lasing")
        return FitModel::lasing;
    throw InvalidArgument("unknown fit model '" + std::string(name) + "'");
}

CommandResult cmd_ring_spectrum(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                                const RingSpectrumOptions &opts)
{
    const auto &r = cfg.ring;
    const auto device = r.device();
    const auto samples = sample_ring_spectrum(device, opts.start_nm.value_or(r.spectrum_start_nm),
                                              opts.stop_nm.value_or(r.spectrum_stop_nm),
                                              opts.resolution_pm.value_or(r.spectrum_resolution_pm));

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::string spectrum = "wavelength_nm,through,drop\n";
    for (const auto &s : samples) {
        double through = s.through, drop = s.drop;
        if (r.spectrum_noise > 0.0) {
            through = std::clamp(through + r.spectrum_noise * noise(rng), 0.0, 1.0);
            drop = std::clamp(drop + r.spectrum_noise * noise(rng), 0.0, 1.0);
        }
        spectrum += row({s.wavelength_nm, through, drop});
    }

    const auto set = cfg.resonances();
    std::string res = "index,wavelength_nm,fwhm_nm,loaded_q,through_min,drop_max\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto &e = set[i];
        res += row({static_cast<double>(i), e.wavelength_nm, e.fwhm_nm, e.loaded_q, device.through(e.wavelength_nm),
                    device.drop(e.wavelength_nm)});
    }

    CommandResult result;
    emit(result, out_dir, "ring_spectrum.csv", spectrum);
    emit(result, out_dir, "resonances.csv", res);
    result.summary = std::to_string(samples.size()) + " samples; on-resonance through " +
                     fmt(device.through(r.reference_wavelength_nm)) + ", Q " +
                     fmt(loaded_q(device.coupling, device.geometry, r.reference_wavelength_nm));
    return result;
}

std::vector<LasingSample> laser_curve_samples(const ExperimentConfig &cfg, double start_ma, double stop_ma,
                                              double step_ma, bool tpa)
{
    const auto &l = cfg.laser;
    const auto gain = l.gain();
    const auto budget = l.budget();
    std::vector<LasingSample> out;
    for (double current : arange(start_ma, stop_ma, step_ma, "laser current range")) {
        double drop = 0.0;
        if (tpa) {
            const auto rt = tpa_rollover(gain, budget, current, l.tpa_db_per_mw);
            if (!rt.converged)
                throw NonConvergence("round-trip solver did not converge at " + fmt(current) + " mA");
            drop = rt.point.drop_port_power_mw;
        } else {
            drop = output_power_curve(gain, budget, current).drop_port_power_mw;
        }
        out.push_back({current, drop});
    }
    return out;
}

CommandResult cmd_laser_curve(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                              const LaserCurveOptions &opts)
{
    const auto &l = cfg.laser;
    const auto budget = l.budget();
    auto samples = laser_curve_samples(cfg, opts.start_ma.value_or(l.sweep_start_ma),
                                       opts.stop_ma.value_or(l.sweep_stop_ma), opts.step_ma.value_or(l.sweep_step_ma),
                                       opts.tpa);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::string curve = "current_mA,drop_power_mw,tap_power_uw\n";
    for (auto &s : samples) {
        if (l.noise_mw > 0.0)
            s.power_mw = std::max(0.0, s.power_mw + l.noise_mw * noise(rng));
        curve += row({s.current_ma, s.power_mw, tap_power_from_drop(s.power_mw, budget) * 1e3});
    }

    const auto report = fit_lasing_curve(samples, l.fit_cutoff_ma);
    const double configured = threshold_current(l.gain(), budget);

    CommandResult result;
    emit(result, out_dir, "laser_curve.csv", curve);
    emit(result, out_dir, "laser_fit.txt",
         report.to_text() + "configured_threshold_ma = " + fmt(configured) + "\ntpa = " + (opts.tpa ? "on" : "off") +
             "\n");
    emit(result, out_dir, "laser_fit.csv", report.csv_header() + "\n" + report.csv_row() + "\n");
    result.summary = "threshold " + fmt(report.value("threshold_ma")) + " mA (configured " + fmt(configured) + " mA)";
    return result;
}

CommandResult cmd_fwm_sweep(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                            const FwmSweepOptions &opts)
{
    const auto &f = cfg.fwm;
    const auto device = cfg.ring.device();
    const auto triplet = cfg.triplet();
    FwmSetup setup{ResonantEnhancement::from_rings(device.coupling, device.coupling, device.coupling),
                   f.gamma_per_w_per_m,
                   FwmParameters{f.gamma_per_w_per_m, f.interaction_length_um}.effective_length_um(device.geometry)};

    ConversionSweep sweep;
    std::string table = "current_mA,pump_mw,signal_uw,idler_power_pw\n";
    if (opts.axis == SweepAxis::pump) {
        const auto currents = linspace(opts.start.value_or(f.pump_sweep_start_ma),
                                       opts.stop.value_or(f.pump_sweep_stop_ma),
                                       opts.points.value_or(f.pump_sweep_points), "pump sweep");
        sweep = sweep_pump_current(setup, cfg.laser.gain(), cfg.laser.budget(), currents, f.pump_sweep_signal_uw);
    } else {
        const auto signals = logspace(opts.start.value_or(f.signal_sweep_start_uw),
                                      opts.stop.value_or(f.signal_sweep_stop_uw),
                                      opts.points.value_or(f.signal_sweep_points), "signal sweep");
        const double pump = ring_input_power(cfg.laser.gain(), cfg.laser.budget(), f.signal_sweep_current_ma);
        sweep = sweep_signal(setup, pump, signals);
        for (auto &r : sweep.rows)
            r.current_ma = f.signal_sweep_current_ma;
    }
    for (const auto &r : sweep.rows)
        table += row({r.current_ma, r.pump_mw, r.signal_uw, r.idler_mw * 1e9});

    std::string summary = "axis,points,loglog_slope\n";
    summary += std::string(to_string(sweep.axis)) + "," + std::to_string(sweep.rows.size()) + "," +
               fmt(sweep.loglog_slope) + "\n";

    const double fwhm = device.fwhm_nm(triplet.idler_nm());
    const double idler_mw = idler_power_mw(setup.enhancement, setup.gamma_per_w_per_m, setup.length_um,
                                           f.spectrum_pump_mw, f.spectrum_signal_uw);
    const auto window = centred_window(triplet.idler_nm(), fwhm, f.spectrum_span_fwhm, f.spectrum_step_pm);
    const auto spec = idler_spectrum(triplet.idler_nm(), fwhm, idler_mw, f.spectrometer_resolution_pm, window);
    // Densities in pW per nm.
    std::string spectrum = "wavelength_nm,bare_pw_per_nm,measured_pw_per_nm\n";
    for (std::size_t k = 0; k < spec.wavelength_nm.size(); ++k)
        spectrum += row({spec.wavelength_nm[k], spec.bare[k] * 1e9, spec.measured[k] * 1e9});

    CommandResult result;
    const std::string stem = opts.axis == SweepAxis::pump ? "fwm_pump_sweep" : "fwm_signal_sweep";
    emit(result, out_dir, stem + ".csv", table);
    emit(result, out_dir, stem + "_summary.csv", summary);
    emit(result, out_dir, "idler_spectrum.csv", spectrum);
    result.summary = std::string(to_string(sweep.axis)) + " axis log-log slope " + fmt(sweep.loglog_slope);
    return result;
}

CommandResult cmd_jsd(const ExperimentConfig &cfg, const std::filesystem::path &out_dir)
{
    const auto &j = cfg.jsd;
    const auto device = cfg.ring.device();
    const auto triplet = cfg.triplet();
    const double pump_lw = cfg.pump_linewidth_ghz();

    JsdScanSettings settings{j.signal_start_nm, j.signal_stop_nm, j.signal_step_pm, j.idler_step_pm,
                             j.idler_margin_nm};
    const auto scan = simulate_jsd_scan(triplet, device, pump_lw, settings, j.spectrometer_resolution_pm);
    const auto ridge = ridge_fit(scan);

    const double gs = linewidth_ghz_from_nm(device.fwhm_nm(triplet.signal_nm()), triplet.signal_nm());
    const double gi = linewidth_ghz_from_nm(device.fwhm_nm(triplet.idler_nm()), triplet.idler_nm());
    const auto grid = SpectralGrid::around(triplet.signal_nm(), gs, triplet.idler_nm(), gi, j.schmidt_span_fwhm,
                                           j.schmidt_step_pm);
    const auto sr = schmidt(jsa(grid, pump_lw, gs, gi));

    std::string csv;
    csv += "# signal_points=" + std::to_string(scan.signal_nm.size()) + "\n";
    csv += "# idler_points=" + std::to_string(scan.idler_nm.size()) + "\n";
    csv += "# signal_range_nm=" + fmt(scan.signal_nm.front()) + ":" + fmt(scan.signal_nm.back()) + "\n";
    csv += "# idler_range_nm=" + fmt(scan.idler_nm.front()) + ":" + fmt(scan.idler_nm.back()) + "\n";
    csv += "# resolution_pm=" + fmt(j.spectrometer_resolution_pm) + "\n";
    csv += "# pump_linewidth_ghz=" + fmt(pump_lw) + "\n";
    csv += "signal_nm,idler_nm,intensity\n";
    for (std::size_t r = 0; r < scan.signal_nm.size(); ++r)
        for (std::size_t c = 0; c < scan.idler_nm.size(); ++c)
            csv += row({scan.signal_nm[r], scan.idler_nm[c], scan.intensity(static_cast<Eigen::Index>(r),
                                                                            static_cast<Eigen::Index>(c))});

    std::ostringstream rep;
    rep.imbue(std::locale::classic());
    rep << "signal_nm = " << fmt(triplet.signal_nm()) << "\n"
        << "pump_nm = " << fmt(triplet.pump_nm()) << "\n"
        << "idler_nm = " << fmt(triplet.idler_nm()) << "\n"
        << "signal_linewidth_ghz = " << fmt(gs) << "\n"
        << "idler_linewidth_ghz = " << fmt(gi) << "\n"
        << "pump_linewidth_ghz = " << fmt(pump_lw) << "\n"
        << "grid = " << grid.signal.size() << " x " << grid.idler.size() << "\n"
        << "purity = " << fmt(sr.purity) << "\n"
        << "schmidt_number = " << fmt(sr.schmidt_number) << "\n";
    const std::size_t shown = std::min<std::size_t>(10, sr.coefficients.size());
    for (std::size_t k = 0; k < shown; ++k)
        rep << "lambda_" << k << " = " << fmt(sr.coefficients[k]) << "\n";
    rep << "ridge_slope = " << fmt(ridge.slope) << "\n";

    std::string ridge_csv = "slope,intercept_nm,rms_width_nm,columns_used\n";
    ridge_csv += row({ridge.slope, ridge.intercept, ridge.rms_width_nm, static_cast<double>(ridge.columns_used)});

    CommandResult result;
    emit(result, out_dir, "jsd_scan.csv", csv);
    emit(result, out_dir, "schmidt_report.txt", rep.str());
    emit(result, out_dir, "ridge_fit.csv", ridge_csv);
    result.summary = "ridge slope " + fmt(ridge.slope) + ", purity " + fmt(sr.purity);
    return result;
}

CommandResult cmd_fit(const FitOptions &opts, const std::filesystem::path &out_dir)
{
    const auto table = read_csv(opts.input);
    FitReport report;
    if (opts.model == FitModel::lorentzian) {
        const std::string column = opts.column.empty() ? "through" : opts.column;
        Spectrum s;
        s.wavelength_nm = table.values("wavelength_nm");
        s.value = table.values(column);
        s.resolution_pm = opts.resolution_pm;
        s.kind = column == "through" ? SpectrumKind::through
                 : column == "drop"  ? SpectrumKind::drop
                                     : SpectrumKind::idler;
        s.validate();
        const auto [lo, hi] = std::minmax_element(s.wavelength_nm.begin(), s.wavelength_nm.end());
        report = fit_lorentzian(s, {opts.window_min_nm.value_or(*lo), opts.window_max_nm.value_or(*hi)});
    } else {
        const std::string column = opts.column.empty() ? "drop_power_mw" : opts.column;
        const auto current = table.values("current_mA");
        const auto power = table.values(column);
        std::vector<LasingSample> points;
        for (std::size_t i = 0; i < current.size(); ++i)
            points.push_back({current[i], power[i]});
        report = fit_lasing_curve(points, opts.cutoff_ma.value_or(std::numeric_limits<double>::infinity()));
    }
    if (!report.converged)
        throw NonConvergence("fit did not converge");

    CommandResult result;
    result.inputs.push_back(opts.input.string());
    emit(result, out_dir, "fit_report.txt", report.to_text());
    emit(result, out_dir, "fit_report.csv", report.csv_header() + "\n" + report.csv_row() + "\n");
    result.summary = report.model + " fit converged after " + std::to_string(report.iterations) + " iterations";
    return result;
}

} // namespace selfpump
