#include "selfpump/config.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <utility>

#include <yaml-cpp/yaml.h>

#include "selfpump/csv.hpp"
#include "selfpump/error.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
namespace
{
// Reads one YAML mapping, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section
{
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping");
    }

    std::string key(std::string_view name) const
    {
        return path_.empty() ? std::string(name) : path_ + "." + std::string(name);
    }

    template <typename T> void read(std::string_view name, T &target)
    {
        seen_.emplace(name);
        if (!node_ || node_.IsNull())
            return;
        const YAML::Node child = std::as_const(node_)[std::string(name)];
        if (!child)
            return;
        try {
            target = child.as<T>();
        } catch (const YAML::Exception &) {
            throw ConfigError(key(name), "has the wrong type");
        }
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(target))
                throw ConfigError(key(name), "must be finite");
        }
    }

    template <typename T> void read(std::string_view name, std::optional<T> &target)
    {
        T value{};
        seen_.emplace(name);
        if (!node_ || node_.IsNull() || !std::as_const(node_)[std::string(name)])
            return;
        read(name, value);
        target = value;
    }

    Section child(std::string_view name)
    {
        seen_.emplace(name);
        YAML::Node sub;
        if (node_ && node_.IsMap() && std::as_const(node_)[std::string(name)])
            sub = std::as_const(node_)[std::string(name)];
        return Section(sub, key(name));
    }

    YAML::Node raw(std::string_view name)
    {
        seen_.emplace(name);
        if (node_ && node_.IsMap() && std::as_const(node_)[std::string(name)])
            return std::as_const(node_)[std::string(name)];
        return {};
    }

    void finish() const
    {
        if (!node_ || !node_.IsMap())
            return;
        for (const auto &entry : node_) {
            const auto name = entry.first.as<std::string>();
            if (!seen_.count(name))
                throw ConfigError(key(name), "unknown key");
        }
    }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

void check(bool ok, const std::string &key, const std::string &message)
{
    if (!ok)
        throw ConfigError(key, message);
}

// Re-raises domain invariant violations under the config key that caused them.
template <typename F> auto guarded(const std::string &key, F &&f)
{
    try {
        return f();
    } catch (const InvalidArgument &e) {
        throw ConfigError(key, e.what());
    } catch (const NoLasing &e) {
        throw ConfigError(key, e.what());
    }
}

void read_ring(Section s, RingSection &r)
{
    s.read("radius_um", r.radius_um);
    s.read("group_index", r.group_index);
    s.read("fsr_nm", r.fsr_nm);
    s.read("reference_wavelength_nm", r.reference_wavelength_nm);
    {
        auto c = s.child("coupling");
        c.read("t1", r.t1);
        c.read("t2", r.t2);
        c.read("a", r.a);
        c.finish();
    }
    {
        auto t = s.child("target");
        t.read("loaded_q", r.target_loaded_q);
        t.read("through_extinction", r.target_through_extinction);
        t.finish();
    }
    s.read("resonances_each_side", r.resonances_each_side);
    {
        auto sp = s.child("spectrum");
        sp.read("start_nm", r.spectrum_start_nm);
        sp.read("stop_nm", r.spectrum_stop_nm);
        sp.read("resolution_pm", r.spectrum_resolution_pm);
        sp.read("noise", r.spectrum_noise);
        sp.finish();
    }
    s.finish();
}

void read_laser(Section s, LaserSection &l)
{
    if (auto list = s.raw("loss_elements"); list && !list.IsNull()) {
        check(list.IsSequence() && list.size() > 0, s.key("loss_elements"), "must be a non-empty list");
        l.loss_elements.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            Section e(list[i], s.key("loss_elements") + "[" + std::to_string(i) + "]");
            LossElement element;
            e.read("name", element.name);
            e.read("loss_db", element.loss_db);
            e.finish();
            check(!element.name.empty(), e.key("name"), "is required");
            check(element.loss_db >= 0.0, e.key("loss_db"), "must be >= 0");
            l.loss_elements.push_back(element);
        }
    }
    s.read("ring_insertion_db", l.ring_insertion_db);
    s.read("ring_position", l.ring_position);
    s.read("tap_position", l.tap_position);
    s.read("tap_fraction", l.tap_fraction);
    {
        auto g = s.child("gain");
        g.read("k_np_per_ma", l.k_np_per_ma);
        g.read("calibration_current_ma", l.calibration_current_ma);
        g.read("calibration_gain_db", l.calibration_gain_db);
        g.read("saturation_power_mw", l.saturation_power_mw);
        g.read("max_small_signal_gain_db", l.max_small_signal_gain_db);
        g.read("clamp_small_signal_gain", l.clamp_small_signal_gain);
        g.finish();
    }
    {
        auto sw = s.child("sweep");
        sw.read("start_ma", l.sweep_start_ma);
        sw.read("stop_ma", l.sweep_stop_ma);
        sw.read("step_ma", l.sweep_step_ma);
        sw.read("tpa_db_per_mw", l.tpa_db_per_mw);
        sw.read("fit_cutoff_ma", l.fit_cutoff_ma);
        sw.read("noise_mw", l.noise_mw);
        sw.finish();
    }
    s.finish();
}

void read_fwm(Section s, FwmSection &f)
{
    s.read("gamma_per_w_per_m", f.gamma_per_w_per_m);
    s.read("interaction_length_um", f.interaction_length_um);
    {
        auto t = s.child("triplet");
        t.read("idler_nm", f.idler_nm);
        t.read("pump_nm", f.pump_nm);
        t.read("signal_nm", f.signal_nm);
        t.read("energy_tolerance_nm", f.energy_tolerance_nm);
        t.read("match_tolerance_nm", f.match_tolerance_nm);
        t.finish();
    }
    {
        auto p = s.child("pump_sweep");
        p.read("start_ma", f.pump_sweep_start_ma);
        p.read("stop_ma", f.pump_sweep_stop_ma);
        p.read("points", f.pump_sweep_points);
        p.read("signal_uw", f.pump_sweep_signal_uw);
        p.finish();
    }
    {
        auto p = s.child("signal_sweep");
        p.read("start_uw", f.signal_sweep_start_uw);
        p.read("stop_uw", f.signal_sweep_stop_uw);
        p.read("points", f.signal_sweep_points);
        p.read("current_ma", f.signal_sweep_current_ma);
        p.finish();
    }
    {
        auto p = s.child("spectrum");
        p.read("pump_mw", f.spectrum_pump_mw);
        p.read("signal_uw", f.spectrum_signal_uw);
        p.read("resolution_pm", f.spectrometer_resolution_pm);
        p.read("step_pm", f.spectrum_step_pm);
        p.read("span_fwhm", f.spectrum_span_fwhm);
        p.finish();
    }
    s.finish();
}

void read_jsd(Section s, JsdSection &j)
{
    s.read("signal_start_nm", j.signal_start_nm);
    s.read("signal_stop_nm", j.signal_stop_nm);
    s.read("signal_step_pm", j.signal_step_pm);
    s.read("idler_step_pm", j.idler_step_pm);
    s.read("idler_margin_nm", j.idler_margin_nm);
    s.read("resolution_pm", j.spectrometer_resolution_pm);
    s.read("pump_current_ma", j.pump_current_ma);
    s.read("signal_power_uw", j.signal_power_uw);
    s.read("pump_linewidth_fraction", j.pump_linewidth_fraction);
    s.read("pump_linewidth_ghz", j.pump_linewidth_ghz);
    {
        auto sc = s.child("schmidt");
        sc.read("span_fwhm", j.schmidt_span_fwhm);
        sc.read("step_pm", j.schmidt_step_pm);
        sc.finish();
    }
    s.finish();
}
} // namespace

RingGeometry RingSection::geometry() const
{
    if (group_index)
        return RingGeometry(radius_um, *group_index);
    return RingGeometry::from_fsr(radius_um, fsr_nm, reference_wavelength_nm);
}

CouplingConfig RingSection::coupling() const
{
    if (t1 && t2 && a)
        return CouplingConfig(*t1, *t2, *a);
    if (t1 || t2 || a)
        throw InvalidArgument("explicit coupling needs all of t1, t2 and a");
    return calibrate_symmetric(geometry(), reference_wavelength_nm, target_loaded_q, target_through_extinction);
}

RingDevice RingSection::device() const { return {geometry(), coupling(), reference_wavelength_nm}; }

LossBudget LaserSection::budget() const
{
    return LossBudget(loss_elements, ring_insertion_db, ring_position, tap_position, tap_fraction);
}

GainModel LaserSection::gain() const
{
    if (k_np_per_ma)
        return GainModel(*k_np_per_ma, saturation_power_mw, max_small_signal_gain_db, clamp_small_signal_gain);
    return GainModel::calibrated(calibration_current_ma, calibration_gain_db, saturation_power_mw,
                                 max_small_signal_gain_db, clamp_small_signal_gain);
}

ResonanceSet ExperimentConfig::resonances() const
{
    const auto dev = ring.device();
    return resonance_grid(dev.geometry, dev.coupling, ring.reference_wavelength_nm, ring.resonances_each_side);
}

FwmTriplet ExperimentConfig::triplet() const
{
    return FwmTriplet(resonances(), fwm.idler_nm, fwm.pump_nm, fwm.signal_nm, fwm.energy_tolerance_nm,
                      fwm.match_tolerance_nm);
}

double ExperimentConfig::pump_linewidth_ghz() const
{
    if (jsd.pump_linewidth_ghz)
        return *jsd.pump_linewidth_ghz;
    const auto dev = ring.device();
    return jsd.pump_linewidth_fraction * linewidth_ghz_from_nm(dev.fwhm_nm(fwm.pump_nm), fwm.pump_nm);
}

void ExperimentConfig::validate() const
{
    check(!output_directory.empty(), "output_directory", "must not be empty");

    guarded("ring", [&] { return ring.geometry(); });
    guarded("ring.coupling", [&] { return ring.coupling(); });
    check(ring.spectrum_stop_nm > ring.spectrum_start_nm, "ring.spectrum.stop_nm", "must exceed start_nm");
    check(ring.spectrum_resolution_pm > 0.0, "ring.spectrum.resolution_pm", "must be positive");
    check(ring.spectrum_noise >= 0.0, "ring.spectrum.noise", "must be >= 0");
    guarded("ring.resonances_each_side", [&] { return resonances(); });

    guarded("laser.loss_elements", [&] { return laser.budget(); });
    const auto gain = guarded("laser.gain", [&] { return laser.gain(); });
    guarded("laser.gain.max_small_signal_gain_db", [&] { return threshold_current(gain, laser.budget()); });
    check(laser.sweep_step_ma > 0.0, "laser.sweep.step_ma", "must be positive");
    check(laser.sweep_start_ma >= 0.0, "laser.sweep.start_ma", "must be >= 0");
    check(laser.sweep_stop_ma > laser.sweep_start_ma, "laser.sweep.stop_ma", "must exceed start_ma");
    check(laser.tpa_db_per_mw >= 0.0, "laser.sweep.tpa_db_per_mw", "must be >= 0");
    check(laser.noise_mw >= 0.0, "laser.sweep.noise_mw", "must be >= 0");

    check(fwm.gamma_per_w_per_m > 0.0, "fwm.gamma_per_w_per_m", "must be positive");
    check(fwm.interaction_length_um >= 0.0, "fwm.interaction_length_um", "must be >= 0");
    guarded("fwm.triplet", [&] { return triplet(); });
    check(fwm.pump_sweep_points >= 2, "fwm.pump_sweep.points", "must be at least 2");
    check(fwm.pump_sweep_stop_ma > fwm.pump_sweep_start_ma, "fwm.pump_sweep.stop_ma", "must exceed start_ma");
    check(fwm.pump_sweep_start_ma >= 0.0, "fwm.pump_sweep.start_ma", "must be >= 0");
    check(fwm.pump_sweep_signal_uw >= 0.0, "fwm.pump_sweep.signal_uw", "must be >= 0");
    check(fwm.signal_sweep_points >= 2, "fwm.signal_sweep.points", "must be at least 2");
    check(fwm.signal_sweep_start_uw > 0.0, "fwm.signal_sweep.start_uw", "must be positive");
    check(fwm.signal_sweep_stop_uw > fwm.signal_sweep_start_uw, "fwm.signal_sweep.stop_uw", "must exceed start_uw");
    check(fwm.signal_sweep_current_ma >= 0.0, "fwm.signal_sweep.current_ma", "must be >= 0");
    check(fwm.spectrum_pump_mw >= 0.0, "fwm.spectrum.pump_mw", "must be >= 0");
    check(fwm.spectrum_signal_uw >= 0.0, "fwm.spectrum.signal_uw", "must be >= 0");
    check(fwm.spectrometer_resolution_pm > 0.0, "fwm.spectrum.resolution_pm", "must be positive");
    check(fwm.spectrum_step_pm > 0.0, "fwm.spectrum.step_pm", "must be positive");
    check(fwm.spectrum_span_fwhm > 0.0, "fwm.spectrum.span_fwhm", "must be positive");

    check(jsd.signal_step_pm > 0.0, "jsd.signal_step_pm", "must be positive");
    check(jsd.idler_step_pm > 0.0, "jsd.idler_step_pm", "must be positive");
    check(jsd.idler_margin_nm >= 0.0, "jsd.idler_margin_nm", "must be >= 0");
    check(jsd.signal_stop_nm > jsd.signal_start_nm, "jsd.signal_stop_nm", "must exceed signal_start_nm");
    check(jsd.signal_start_nm <= fwm.signal_nm && fwm.signal_nm <= jsd.signal_stop_nm, "jsd.signal_start_nm",
          "scan must cover the signal resonance");
    check(jsd.spectrometer_resolution_pm >= 0.0, "jsd.resolution_pm", "must be >= 0");
    check(jsd.pump_current_ma >= 0.0, "jsd.pump_current_ma", "must be >= 0");
    check(jsd.signal_power_uw >= 0.0, "jsd.signal_power_uw", "must be >= 0");
    check(jsd.pump_linewidth_fraction > 0.0, "jsd.pump_linewidth_fraction", "must be positive");
    if (jsd.pump_linewidth_ghz)
        check(*jsd.pump_linewidth_ghz > 0.0, "jsd.pump_linewidth_ghz", "must be positive");
    check(jsd.schmidt_span_fwhm >= 4.0, "jsd.schmidt.span_fwhm", "must cover at least four linewidths");
    check(jsd.schmidt_step_pm > 0.0, "jsd.schmidt.step_pm", "must be positive");
}

ExperimentConfig parse_config(std::string_view yaml_text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception &e) {
        throw ConfigError("", std::string("malformed YAML: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.source_text = std::string(yaml_text);
    Section s(root, "");
    s.read("seed", cfg.seed);
    s.read("output_directory", cfg.output_directory);
    read_ring(s.child("ring"), cfg.ring);
    read_laser(s.child("laser"), cfg.laser);
    read_fwm(s.child("fwm"), cfg.fwm);
    read_jsd(s.child("jsd"), cfg.jsd);
    s.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) { return parse_config(read_text_file(path)); }

} // namespace selfpump
