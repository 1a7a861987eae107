#ifndef SELFPUMP_UNITS_HPP
#define SELFPUMP_UNITS_HPP

#include <cmath>
#include <numbers>

namespace selfpump
{
inline constexpr double kPi = std::numbers::pi;

// nu[GHz] = kLightSpeedNmGHz / lambda[nm]
inline constexpr double kLightSpeedNmGHz = 299792458.0;

// 10*log10(e): dB per neper of power gain.
inline constexpr double kDbPerNeper = 10.0 * std::numbers::log10e;

inline double transmission_from_loss_db(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }
inline double loss_db_from_transmission(double t) { return -10.0 * std::log10(t); }

inline double db_from_nepers(double g) { return kDbPerNeper * g; }
inline double nepers_from_db(double db) { return db / kDbPerNeper; }

inline double frequency_ghz(double wavelength_nm) { return kLightSpeedNmGHz / wavelength_nm; }
inline double wavelength_nm(double frequency_ghz) { return kLightSpeedNmGHz / frequency_ghz; }

// Wavelength width around lambda corresponding to a frequency width (first order).
inline double linewidth_nm_from_ghz(double linewidth_ghz, double wavelength_nm)
{
    return linewidth_ghz * wavelength_nm * wavelength_nm / kLightSpeedNmGHz;
}
inline double linewidth_ghz_from_nm(double linewidth_nm, double wavelength_nm)
{
    return linewidth_nm * kLightSpeedNmGHz / (wavelength_nm * wavelength_nm);
}

inline bool all_finite() { return true; }
template <typename... Rest> bool all_finite(double x, Rest... rest)
{
    return std::isfinite(x) && all_finite(rest...);
}

} // namespace selfpump

#endif // SELFPUMP_UNITS_HPP
