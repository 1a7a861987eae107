#include "selfpump/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "selfpump/error.hpp"

namespace selfpump
{
std::vector<double> gaussian_bin_kernel(double step, double fwhm)
{
    if (!std::isfinite(step) || step <= 0.0)
        throw InvalidArgument("kernel step must be positive");
    if (!std::isfinite(fwhm) || fwhm < 0.0)
        throw InvalidArgument("kernel FWHM must be non-negative");
    if (fwhm == 0.0)
        return {1.0};

    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const auto half = static_cast<std::size_t>(std::ceil(6.0 * sigma / step));
    const double scale = 1.0 / (sigma * std::numbers::sqrt2);

    std::vector<double> kernel(2 * half + 1);
    double total = 0.0;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        const double offset = static_cast<double>(k) - static_cast<double>(half);
        kernel[k] = 0.5 * (std::erf((offset + 0.5) * step * scale) - std::erf((offset - 0.5) * step * scale));
        total += kernel[k];
    }
    for (auto &w : kernel)
        w /= total;
    return kernel;
}

std::vector<double> convolve_gaussian(std::span<const double> values, double step, double fwhm)
{
    const auto kernel = gaussian_bin_kernel(step, fwhm);
    if (kernel.size() == 1)
        return {values.begin(), values.end()};

    const auto n = static_cast<std::ptrdiff_t>(values.size());
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    std::vector<double> out(values.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double mass = values[static_cast<std::size_t>(i)];
        if (mass == 0.0)
            continue;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        double inside = 0.0;
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            inside += kernel[static_cast<std::size_t>(j - i + half)];
        const double scale = mass / inside;
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            out[static_cast<std::size_t>(j)] += scale * kernel[static_cast<std::size_t>(j - i + half)];
    }
    return out;
}

double measured_fwhm(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 3)
        throw InvalidArgument("profile needs at least three matching samples");
    const auto peak_it = std::max_element(y.begin(), y.end());
    const auto peak = static_cast<std::size_t>(peak_it - y.begin());
    const double half = 0.5 * *peak_it;

    std::size_t lo = peak;
    while (lo > 0 && y[lo - 1] > half)
        --lo;
    std::size_t hi = peak;
    while (hi + 1 < y.size() && y[hi + 1] > half)
        ++hi;
    if (lo == 0 || hi + 1 == y.size())
        return 0.0;

    auto cross = [&](std::size_t inside, std::size_t outside) {
        const double f = (y[inside] - half) / (y[inside] - y[outside]);
        return x[inside] + f * (x[outside] - x[inside]);
    };
    return cross(hi, hi + 1) - cross(lo, lo - 1);
}

} // namespace selfpump
