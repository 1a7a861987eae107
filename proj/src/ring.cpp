#include "selfpump/ring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfpump/error.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
namespace
{
std::complex<double> round_trip(const CouplingConfig &cfg, double phase)
{
    return cfg.round_trip_factor() * std::polar(1.0, phase);
}

void require_finite_phase(double phase)
{
    if (!std::isfinite(phase))
        throw InvalidArgument("round-trip phase must be finite");
}
} // namespace

RingGeometry::RingGeometry(double radius_um, double group_index)
    : radius_um_(radius_um), group_index_(group_index), round_trip_length_um_(2.0 * kPi * radius_um)
{
    if (!all_finite(radius_um, group_index))
        throw InvalidArgument("ring geometry must be finite");
    if (radius_um <= 0.0)
        throw InvalidArgument("ring radius must be positive");
    if (group_index < 1.0 || group_index > 6.0)
        throw InvalidArgument("group index must lie in [1, 6]");
}

RingGeometry RingGeometry::from_fsr(double radius_um, double fsr_nm, double wavelength_nm)
{
    if (!all_finite(radius_um, fsr_nm, wavelength_nm) || fsr_nm <= 0.0 || wavelength_nm <= 0.0 ||
        radius_um <= 0.0)
        throw InvalidArgument("FSR, wavelength and radius must be positive and finite");
    const double length_nm = 2.0 * kPi * radius_um * 1e3;
    return RingGeometry(radius_um, wavelength_nm * wavelength_nm / (fsr_nm * length_nm));
}

CouplingConfig::CouplingConfig(double t1, double t2, double a) : t1_(t1), t2_(t2), a_(a)
{
    if (!all_finite(t1, t2, a))
        throw InvalidArgument("coupling coefficients must be finite");
    if (t1 <= 0.0 || t1 >= 1.0)
        throw InvalidArgument("t1 must lie in (0, 1)");
    if (t2 <= 0.0 || t2 >= 1.0)
        throw InvalidArgument("t2 must lie in (0, 1)");
    if (a <= 0.0 || a > 1.0)
        throw InvalidArgument("round-trip amplitude a must lie in (0, 1]");
}

double CouplingConfig::kappa1() const { return std::sqrt(1.0 - t1_ * t1_); }
double CouplingConfig::kappa2() const { return std::sqrt(1.0 - t2_ * t2_); }

bool CouplingConfig::critically_coupled(double tolerance) const
{
    return std::abs(t1_ - t2_ * a_) <= tolerance;
}

std::complex<double> through_field(const CouplingConfig &cfg, double phase)
{
    require_finite_phase(phase);
    const auto e = std::polar(1.0, phase);
    return (cfg.t1() - cfg.t2() * cfg.a() * e) / (1.0 - round_trip(cfg, phase));
}

std::complex<double> drop_field(const CouplingConfig &cfg, double phase)
{
    require_finite_phase(phase);
    return cfg.kappa1() * cfg.kappa2() * std::sqrt(cfg.a()) / (1.0 - round_trip(cfg, phase));
}

double through_transmission(const CouplingConfig &cfg, double phase)
{
    return std::norm(through_field(cfg, phase));
}

double drop_transmission(const CouplingConfig &cfg, double phase)
{
    return std::norm(drop_field(cfg, phase));
}

double field_enhancement(const CouplingConfig &cfg, double phase)
{
    require_finite_phase(phase);
    return std::norm(cfg.kappa1() / (1.0 - round_trip(cfg, phase)));
}

double fsr(const RingGeometry &geom, double wavelength_nm)
{
    if (!std::isfinite(wavelength_nm) || wavelength_nm <= 0.0)
        throw InvalidArgument("wavelength must be positive and finite");
    return wavelength_nm * wavelength_nm / geom.optical_length_nm();
}

double linewidth_phase(const CouplingConfig &cfg)
{
    // |1 - x e^{i phi}|^2 = 2 (1 - x)^2 at half maximum.
    const double x = cfg.round_trip_factor();
    const double c = (4.0 * x - 1.0 - x * x) / (2.0 * x);
    if (c < -1.0)
        throw InvalidArgument("resonance too broad: half maximum is never reached within one FSR");
    return 2.0 * std::acos(c);
}

double loaded_q(const CouplingConfig &cfg, const RingGeometry &geom, double wavelength_nm)
{
    // d(phi)/d(lambda) = -2 pi n_g L / lambda^2
    const double width_nm = linewidth_phase(cfg) * fsr(geom, wavelength_nm) / (2.0 * kPi);
    return wavelength_nm / width_nm;
}

CouplingConfig calibrate_symmetric(const RingGeometry &geom,
                                   double wavelength_nm,
                                   double target_q,
                                   double through_extinction)
{
    if (!all_finite(target_q, through_extinction) || target_q <= 0.0)
        throw InvalidArgument("target Q must be positive and finite");
    if (through_extinction <= 0.0 || through_extinction >= 1.0)
        throw InvalidArgument("through extinction must lie in (0, 1)");
    const double width_phase = 2.0 * kPi * (wavelength_nm / target_q) / fsr(geom, wavelength_nm);
    if (width_phase >= kPi)
        throw InvalidArgument("target Q is below the half-FSR linewidth limit");

    // Invert the half-maximum condition for x = t^2 a (root below one).
    const double c = std::cos(0.5 * width_phase);
    const double x = (2.0 - c) - std::sqrt((2.0 - c) * (2.0 - c) - 1.0);

    // Through amplitude on resonance: t (1 - a) / (1 - x) = sqrt(extinction).
    const double r = std::sqrt(through_extinction) * (1.0 - x);
    const double t = 0.5 * (r + std::sqrt(r * r + 4.0 * x));
    const double a = x / (t * t);
    if (t >= 1.0 || a > 1.0)
        throw InvalidArgument("no lossy symmetric coupling reproduces the requested Q and extinction");
    return CouplingConfig(t, t, a);
}

std::string_view to_string(ResonanceRole role)
{
    switch (role) {
    case ResonanceRole::idler:
        return "idler";
    case ResonanceRole::pump:
        return "pump";
    case ResonanceRole::signal:
        return "signal";
    case ResonanceRole::unassigned:
        break;
    }
    return "unassigned";
}

ResonanceSet::ResonanceSet(std::vector<Resonance> entries) : entries_(std::move(entries)) {}

void ResonanceSet::assign_role(std::size_t index, ResonanceRole role)
{
    if (index >= entries_.size())
        throw InvalidArgument("resonance index out of range");
    if (role != ResonanceRole::unassigned) {
        for (auto &entry : entries_)
            if (entry.role == role)
                entry.role = ResonanceRole::unassigned;
    }
    entries_[index].role = role;
}

std::size_t ResonanceSet::nearest(double wavelength_nm) const
{
    if (entries_.empty())
        throw InvalidArgument("empty resonance set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (std::abs(entries_[i].wavelength_nm - wavelength_nm) <
            std::abs(entries_[best].wavelength_nm - wavelength_nm))
            best = i;
    return best;
}

void ResonanceSet::validate(const RingGeometry &geom) const
{
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto &r = entries_[i];
        if (!all_finite(r.wavelength_nm, r.loaded_q, r.fwhm_nm) || r.wavelength_nm <= 0.0 || r.loaded_q <= 0.0)
            throw InvalidArgument("resonance entries must be positive and finite");
        if (std::abs(r.fwhm_nm - r.wavelength_nm / r.loaded_q) > 1e-9 * r.fwhm_nm)
            throw InvalidArgument("resonance fwhm inconsistent with wavelength / Q");
        if (i == 0)
            continue;
        const auto &prev = entries_[i - 1];
        if (r.wavelength_nm <= prev.wavelength_nm)
            throw InvalidArgument("resonance wavelengths must increase strictly");
        const double local_fsr = fsr(geom, 0.5 * (prev.wavelength_nm + r.wavelength_nm));
        if (std::abs((r.wavelength_nm - prev.wavelength_nm) - local_fsr) > 0.1 * local_fsr)
            throw InvalidArgument("resonance spacing deviates from the local FSR by more than 10%");
    }
}

ResonanceSet resonance_grid(const RingGeometry &geom,
                            const CouplingConfig &cfg,
                            double reference_nm,
                            std::size_t n_each_side)
{
    if (!std::isfinite(reference_nm) || reference_nm <= 0.0)
        throw InvalidArgument("reference wavelength must be positive and finite");
    const double inv_length = 1.0 / geom.optical_length_nm();
    const auto n = static_cast<long>(n_each_side);
    if (static_cast<double>(n) * inv_length * reference_nm >= 1.0)
        throw InvalidArgument("resonance grid extends past the longest resonance order");

    std::vector<Resonance> entries;
    entries.reserve(2 * n_each_side + 1);
    for (long k = -n; k <= n; ++k) {
        Resonance r;
        r.wavelength_nm = 1.0 / (1.0 / reference_nm - static_cast<double>(k) * inv_length);
        r.loaded_q = loaded_q(cfg, geom, r.wavelength_nm);
        r.fwhm_nm = r.wavelength_nm / r.loaded_q;
        entries.push_back(r);
    }
    ResonanceSet set(std::move(entries));
    set.validate(geom);
    return set;
}

double detuning_phase(const RingGeometry &geom, double wavelength_nm, double center_nm)
{
    return 2.0 * kPi * geom.optical_length_nm() * (1.0 / wavelength_nm - 1.0 / center_nm);
}

double RingDevice::phase(double wavelength_nm) const
{
    return detuning_phase(geometry, wavelength_nm, reference_nm);
}

double RingDevice::through(double wavelength_nm) const
{
    return through_transmission(coupling, phase(wavelength_nm));
}

double RingDevice::drop(double wavelength_nm) const
{
    return drop_transmission(coupling, phase(wavelength_nm));
}

double RingDevice::fwhm_nm(double wavelength_nm) const
{
    return wavelength_nm / loaded_q(coupling, geometry, wavelength_nm);
}

std::vector<RingSample> sample_ring_spectrum(const RingDevice &ring,
                                             double start_nm,
                                             double stop_nm,
                                             double resolution_pm)
{
    if (!all_finite(start_nm, stop_nm, resolution_pm) || start_nm <= 0.0)
        throw InvalidArgument("spectrum range must be positive and finite");
    if (stop_nm <= start_nm)
        throw InvalidArgument("spectrum range must have positive span");
    if (resolution_pm <= 0.0)
        throw InvalidArgument("spectrum resolution must be positive");
    const double step_nm = resolution_pm * 1e-3;
    const auto count = static_cast<std::size_t>(std::floor((stop_nm - start_nm) / step_nm + 1e-9)) + 1;

    std::vector<RingSample> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double wl = start_nm + static_cast<double>(k) * step_nm;
        out.push_back({wl, ring.through(wl), ring.drop(wl)});
    }
    return out;
}

} // namespace selfpump
