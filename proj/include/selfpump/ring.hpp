#ifndef SELFPUMP_RING_HPP
#define SELFPUMP_RING_HPP

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace selfpump
{
// Microring geometry. The group index is a constant scalar (no dispersion).
class RingGeometry
{
public:
    RingGeometry(double radius_um, double group_index);

    // Group index implied by a measured FSR at the given wavelength.
    static RingGeometry from_fsr(double radius_um, double fsr_nm, double wavelength_nm);

    double radius_um() const { return radius_um_; }
    double group_index() const { return group_index_; }
    double round_trip_length_um() const { return round_trip_length_um_; }

    // n_g * L expressed in nm.
    double optical_length_nm() const { return group_index_ * round_trip_length_um_ * 1e3; }

private:
    double radius_um_;
    double group_index_;
    double round_trip_length_um_;
};

// Add-drop coupling: self-coupling amplitudes t1 (input bus) and t2 (drop bus),
// single round-trip field transmission a. Cross-coupling follows kappa^2 = 1 - t^2.
class CouplingConfig
{
public:
    CouplingConfig(double t1, double t2, double a);

    double t1() const { return t1_; }
    double t2() const { return t2_; }
    double a() const { return a_; }
    double kappa1() const;
    double kappa2() const;

    // t1*t2*a, the magnitude of the Airy denominator's round-trip term.
    double round_trip_factor() const { return t1_ * t2_ * a_; }

    bool critically_coupled(double tolerance = 1e-10) const;

private:
    double t1_;
    double t2_;
    double a_;
};

// Closed-form port responses versus round-trip phase phi (phi = 0 on resonance).
std::complex<double> through_field(const CouplingConfig &cfg, double phase);
std::complex<double> drop_field(const CouplingConfig &cfg, double phase);
double through_transmission(const CouplingConfig &cfg, double phase);
double drop_transmission(const CouplingConfig &cfg, double phase);
double field_enhancement(const CouplingConfig &cfg, double phase);

// Free spectral range lambda^2 / (n_g L) in nm.
double fsr(const RingGeometry &geom, double wavelength_nm);

// Full width at half maximum of the drop resonance, in radians of round-trip
// phase. Exact for the Airy lineshape.
double linewidth_phase(const CouplingConfig &cfg);

double loaded_q(const CouplingConfig &cfg, const RingGeometry &geom, double wavelength_nm);

// Symmetric coupling (t1 = t2) reproducing a target loaded Q and on-resonance
// through-port transmission at the given wavelength. The solution is the
// under-coupled branch (t1 > t2*a).
CouplingConfig calibrate_symmetric(const RingGeometry &geom,
                                   double wavelength_nm,
                                   double target_q,
                                   double through_extinction);

enum class ResonanceRole
{
    unassigned,
    idler,
    pump,
    signal,
};

std::string_view to_string(ResonanceRole role);

struct Resonance
{
    double wavelength_nm = 0.0;
    double loaded_q = 0.0;
    double fwhm_nm = 0.0;
    ResonanceRole role = ResonanceRole::unassigned;
};

class ResonanceSet
{
public:
    ResonanceSet() = default;
    explicit ResonanceSet(std::vector<Resonance> entries);

    const std::vector<Resonance> &entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    const Resonance &operator[](std::size_t i) const { return entries_.at(i); }

    // A role moves: any resonance already holding it becomes unassigned.
    void assign_role(std::size_t index, ResonanceRole role);
    std::size_t nearest(double wavelength_nm) const;

    // Throws InvalidArgument unless wavelengths increase strictly, every
    // fwhm equals wavelength/Q, and spacings lie within 10% of the local FSR.
    void validate(const RingGeometry &geom) const;

private:
    std::vector<Resonance> entries_;
};

// Resonances at lambda_ref and n_each_side neighbours on each side. Adjacent
// resonances satisfy 1/lambda_k - 1/lambda_{k+1} = 1/(n_g L), so each spacing
// equals the FSR evaluated at the pair's geometric-mean wavelength.
ResonanceSet resonance_grid(const RingGeometry &geom,
                            const CouplingConfig &cfg,
                            double reference_nm,
                            std::size_t n_each_side);

// Geometry, coupling and one known resonance wavelength.
struct RingDevice
{
    RingGeometry geometry;
    CouplingConfig coupling;
    double reference_nm;

    // Round-trip phase, zero at every resonance: 2*pi*n_g*L*(1/lambda - 1/lambda_ref).
    double phase(double wavelength_nm) const;
    double through(double wavelength_nm) const;
    double drop(double wavelength_nm) const;
    double fwhm_nm(double wavelength_nm) const;
};

// Phase relative to an arbitrary resonance centre.
double detuning_phase(const RingGeometry &geom, double wavelength_nm, double center_nm);

struct RingSample
{
    double wavelength_nm;
    double through;
    double drop;
};

// Samples on start + k*resolution for all k with start + k*resolution <= stop.
std::vector<RingSample> sample_ring_spectrum(const RingDevice &ring,
                                             double start_nm,
                                             double stop_nm,
                                             double resolution_pm);

} // namespace selfpump

#endif // SELFPUMP_RING_HPP
