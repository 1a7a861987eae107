#ifndef SELFPUMP_INSTRUMENT_HPP
#define SELFPUMP_INSTRUMENT_HPP

#include <span>
#include <vector>

namespace selfpump
{
// Gaussian instrument kernel integrated over uniform bins of width step,
// centred on bin 0 and truncated at six standard deviations. Entry k of the
// result is the weight of offset k - half_width. Sums to one.
std::vector<double> gaussian_bin_kernel(double step, double fwhm);

// Convolves uniformly sampled values with a Gaussian of the given FWHM (same
// unit as step). Each input sample's mass is scattered over the output bins
// that exist, renormalised near the edges, so sum(out) == sum(in) to rounding.
// fwhm == 0 returns the input unchanged.
std::vector<double> convolve_gaussian(std::span<const double> values, double step, double fwhm);

// FWHM of a sampled single-peaked profile by linear interpolation of the
// half-maximum crossings. Returns 0 if either crossing is missing.
double measured_fwhm(std::span<const double> x, std::span<const double> y);

} // namespace selfpump

#endif // SELFPUMP_INSTRUMENT_HPP
