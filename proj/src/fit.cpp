#include "selfpump/fit.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <sstream>

#include <Eigen/Dense>

#include "selfpump/error.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
namespace
{
struct LineFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double var_slope = 0.0;
    double var_intercept = 0.0;
    double cov = 0.0;
    double residual_rms = 0.0;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys, std::span<const double> ws)
{
    const std::size_t n = xs.size();
    if (ys.size() != n || (!ws.empty() && ws.size() != n))
        throw InvalidArgument("x, y and weight arrays must have equal length");
    if (n < 2)
        throw InvalidArgument("a line fit needs at least two points");

    auto weight = [&](std::size_t i) { return ws.empty() ? 1.0 : ws[i]; };
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight(i);
        if (!all_finite(xs[i], ys[i], w) || w <= 0.0)
            throw InvalidArgument("fit inputs must be finite with positive weights");
        sw += w;
        sx += w * xs[i];
        sy += w * ys[i];
    }
    const double xm = sx / sw;
    const double ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - xm;
        sxx += weight(i) * dx * dx;
        sxy += weight(i) * dx * (ys[i] - ym);
    }
    if (sxx <= 0.0)
        throw InvalidArgument("a line fit needs at least two distinct x values");

    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ym - f.slope * xm;
    double chi2 = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (f.slope * xs[i] + f.intercept);
        chi2 += weight(i) * r * r;
        ss += r * r;
    }
    const double s2 = n > 2 ? chi2 / static_cast<double>(n - 2) : 0.0;
    f.var_slope = s2 / sxx;
    f.var_intercept = s2 * (1.0 / sw + xm * xm / sxx);
    f.cov = -xm * s2 / sxx;
    f.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return f;
}

std::vector<std::size_t> window_indices(const Spectrum &s, WavelengthWindow window)
{
    if (!(window.max_nm > window.min_nm))
        throw InvalidArgument("fit window must have positive width");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < s.wavelength_nm.size(); ++i)
        if (s.wavelength_nm[i] >= window.min_nm && s.wavelength_nm[i] <= window.max_nm)
            idx.push_back(i);
    if (idx.size() < 8)
        throw InvalidArgument("fit window holds fewer than 8 samples");
    return idx;
}

bool is_dip(SpectrumKind kind) { return kind == SpectrumKind::through; }

struct Residuals
{
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double ssr;
};

Residuals evaluate(const LorentzianParameters &p, const std::vector<double> &x, const std::vector<double> &y)
{
    const auto n = static_cast<Eigen::Index>(x.size());
    Residuals out{Eigen::VectorXd(n), Eigen::MatrixXd(n, 4), 0.0};
    const double c = p[0], w = p[1], a = p[2];
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = 2.0 * (x[static_cast<std::size_t>(i)] - c) / w;
        const double d = 1.0 / (1.0 + u * u);
        out.r(i) = y[static_cast<std::size_t>(i)] - lorentzian(p, x[static_cast<std::size_t>(i)]);
        out.jac(i, 0) = a * 4.0 * u * d * d / w;
        out.jac(i, 1) = a * 2.0 * u * u * d * d / w;
        out.jac(i, 2) = d;
        out.jac(i, 3) = 1.0;
    }
    out.ssr = out.r.squaredNorm();
    return out;
}
} // namespace

std::string_view to_string(SpectrumKind kind)
{
    switch (kind) {
    case SpectrumKind::through:
        return "through";
    case SpectrumKind::drop:
        return "drop";
    case SpectrumKind::idler:
        return "idler";
    }
    return "through";
}

SpectrumKind spectrum_kind_from_string(std::string_view name)
{
    if (name == "through")
        return SpectrumKind::through;
    if (name == "drop")
        return SpectrumKind::drop;
    if (name == "idler")
        return SpectrumKind::idler;
    throw InvalidArgument("unknown spectrum kind '" + std::string(name) + "'");
}

void Spectrum::validate() const
{
    if (wavelength_nm.size() != value.size())
        throw InvalidArgument("spectrum wavelength and value columns differ in length");
    if (!std::isfinite(resolution_pm) || resolution_pm <= 0.0)
        throw InvalidArgument("spectrum resolution must be positive");
    const bool transmission = kind != SpectrumKind::idler;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!all_finite(wavelength_nm[i], value[i]))
            throw InvalidArgument("spectrum samples must be finite");
        if (i > 0 && wavelength_nm[i] <= wavelength_nm[i - 1])
            throw InvalidArgument("spectrum wavelengths must increase strictly");
        if (transmission && (value[i] < 0.0 || value[i] > 1.05))
            throw InvalidArgument("transmission sample outside [0, 1.05]");
    }
}

const FitParameter &FitReport::parameter(std::string_view name) const
{
    for (const auto &p : parameters)
        if (p.name == name)
            return p;
    throw InvalidArgument("fit report has no parameter '" + std::string(name) + "'");
}

std::string FitReport::to_text() const
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(10);
    os << "model: " << model << '\n';
    for (const auto &p : parameters)
        os << p.name << " = " << p.value << " +/- " << p.sigma << '\n';
    os << "residual_rms = " << residual_rms << '\n';
    os << "points_used = " << points_used << '\n';
    os << "points_excluded = " << points_excluded << '\n';
    os << "iterations = " << iterations << '\n';
    os << "converged = " << (converged ? "true" : "false") << '\n';
    return os.str();
}

std::string FitReport::csv_header() const
{
    std::string h = "model";
    for (const auto &p : parameters)
        h += "," + p.name + "," + p.name + "_sigma";
    h += ",residual_rms,points_used,points_excluded,converged";
    return h;
}

std::string FitReport::csv_row() const
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << model;
    for (const auto &p : parameters)
        os << ',' << p.value << ',' << p.sigma;
    os << ',' << residual_rms << ',' << points_used << ',' << points_excluded << ',' << (converged ? 1 : 0);
    return os.str();
}

FitReport linear_least_squares(std::span<const double> xs, std::span<const double> ys, std::span<const double> weights)
{
    const auto f = fit_line(xs, ys, weights);
    FitReport report;
    report.model = "linear";
    report.parameters = {
        {"slope", f.slope, std::sqrt(f.var_slope)},
        {"intercept", f.intercept, std::sqrt(f.var_intercept)},
    };
    report.residual_rms = f.residual_rms;
    report.points_used = xs.size();
    return report;
}

double lorentzian(const LorentzianParameters &p, double wavelength_nm)
{
    const double u = 2.0 * (wavelength_nm - p[0]) / p[1];
    return p[3] + p[2] / (1.0 + u * u);
}

LorentzianParameters lorentzian_initial_guess(const Spectrum &s, WavelengthWindow window)
{
    const auto idx = window_indices(s, window);
    const auto &x = s.wavelength_nm;
    const auto &y = s.value;

    const std::size_t edge = std::min<std::size_t>(3, idx.size() / 4);
    double baseline = 0.0;
    for (std::size_t k = 0; k < edge; ++k)
        baseline += y[idx[k]] + y[idx[idx.size() - 1 - k]];
    baseline /= static_cast<double>(2 * edge);

    // Strict comparison keeps the smallest wavelength on ties.
    std::size_t ext = 0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const bool better = is_dip(s.kind) ? y[idx[k]] < y[idx[ext]] : y[idx[k]] > y[idx[ext]];
        if (better)
            ext = k;
    }
    const double depth = y[idx[ext]] - baseline;
    const double half = baseline + 0.5 * depth;
    auto beyond_half = [&](std::size_t k) { return (y[idx[k]] - half) * depth > 0.0; };

    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double f = (y[idx[inside]] - half) / (y[idx[inside]] - y[idx[outside]]);
        return x[idx[inside]] + f * (x[idx[outside]] - x[idx[inside]]);
    };
    std::size_t lo = ext;
    while (lo > 0 && beyond_half(lo - 1))
        --lo;
    std::size_t hi = ext;
    while (hi + 1 < idx.size() && beyond_half(hi + 1))
        ++hi;
    const double left = lo > 0 ? crossing(lo, lo - 1) : x[idx.front()];
    const double right = hi + 1 < idx.size() ? crossing(hi, hi + 1) : x[idx.back()];

    return {x[idx[ext]], std::max(right - left, 1e-12), depth, baseline};
}

FitReport fit_lorentzian(const Spectrum &s, WavelengthWindow window, const LorentzianFitOptions &options)
{
    s.validate();
    const auto idx = window_indices(s, window);
    std::vector<double> x, y;
    for (auto i : idx) {
        x.push_back(s.wavelength_nm[i]);
        y.push_back(s.value[i]);
    }

    const auto guess = lorentzian_initial_guess(s, window);
    const double depth = guess[2];
    if (depth == 0.0)
        throw InvalidArgument("fit window holds no resonance");

    // Separate excursions past half depth (hysteresis down to a quarter).
    std::size_t runs = 0;
    bool in_run = false;
    for (double v : y) {
        const double d = (v - guess[3]) / depth;
        if (!in_run && d > 0.5) {
            in_run = true;
            ++runs;
        } else if (in_run && d < 0.25) {
            in_run = false;
        }
    }
    if (runs > 1)
        throw InvalidArgument("fit window contains multiple resonances");

    const auto across = std::count_if(x.begin(), x.end(),
                                      [&](double v) { return std::abs(v - guess[0]) <= 0.5 * guess[1]; });
    if (across < 10)
        throw InvalidArgument("fewer than 10 samples across the resonance FWHM");

    LorentzianParameters p = options.initial.value_or(guess);
    if (!(p[1] > 0.0))
        throw InvalidArgument("initial FWHM must be positive");

    auto current = evaluate(p, x, y);
    double lambda = 1e-3;
    bool converged = false;
    std::size_t iteration = 0;
    while (iteration < options.max_iterations) {
        ++iteration;
        if (current.ssr == 0.0) {
            converged = true;
            break;
        }
        const Eigen::Matrix4d jtj = current.jac.transpose() * current.jac;
        const Eigen::Vector4d jtr = current.jac.transpose() * current.r;

        bool accepted = false;
        Eigen::Vector4d step = Eigen::Vector4d::Zero();
        while (lambda < 1e16) {
            Eigen::Matrix4d damped = jtj;
            for (int k = 0; k < 4; ++k)
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
            step = damped.ldlt().solve(jtr);
            LorentzianParameters trial = p;
            for (int k = 0; k < 4; ++k)
                trial[static_cast<std::size_t>(k)] += step(k);
            if (trial[1] > 0.0 && std::isfinite(trial[0])) {
                auto next = evaluate(trial, x, y);
                if (next.ssr < current.ssr) {
                    p = trial;
                    current = std::move(next);
                    lambda = std::max(lambda * 0.1, 1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No descent direction left at any damping: at the optimum.
            converged = true;
            break;
        }
        bool small = true;
        for (int k = 0; k < 4; ++k)
            small = small && std::abs(step(k)) <= 1e-13 * (std::abs(p[static_cast<std::size_t>(k)]) + 1e-9);
        if (small) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NonConvergence("Lorentzian fit did not converge in " + std::to_string(options.max_iterations) +
                             " iterations");

    const auto n = x.size();
    const double s2 = n > 4 ? current.ssr / static_cast<double>(n - 4) : 0.0;
    const Eigen::Matrix4d jtj = current.jac.transpose() * current.jac;
    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    if (s2 > 0.0)
        cov = s2 * jtj.inverse();
    auto sd = [&](int k) { return std::sqrt(std::max(cov(k, k), 0.0)); };

    const double c = p[0], w = p[1], a = p[2], b = p[3];
    const double q = c / w;
    const double var_q = cov(0, 0) / (w * w) + c * c * cov(1, 1) / (w * w * w * w) - 2.0 * c * cov(0, 1) / (w * w * w);

    FitReport report;
    report.model = "lorentzian";
    report.parameters = {
        {"center_nm", c, sd(0)},
        {"fwhm_nm", w, sd(1)},
        {"amplitude", a, sd(2)},
        {"baseline", b, sd(3)},
        {"q", q, std::sqrt(std::max(var_q, 0.0))},
    };
    if (is_dip(s.kind)) {
        const double ext = (b + a) / b;
        const double var_ext = (cov(2, 2) + (a * a / (b * b)) * cov(3, 3) - 2.0 * (a / b) * cov(2, 3)) / (b * b);
        report.parameters.push_back({"extinction", ext, std::sqrt(std::max(var_ext, 0.0))});
    } else {
        const double var_peak = cov(2, 2) + cov(3, 3) + 2.0 * cov(2, 3);
        report.parameters.push_back({"peak", b + a, std::sqrt(std::max(var_peak, 0.0))});
    }
    report.residual_rms = std::sqrt(current.ssr / static_cast<double>(n));
    report.points_used = n;
    report.points_excluded = s.wavelength_nm.size() - n;
    report.iterations = iteration;
    report.converged = true;
    return report;
}

FitReport fit_lasing_curve(std::span<const LasingSample> points, double cutoff_ma, std::span<const double> weights)
{
    if (!weights.empty() && weights.size() != points.size())
        throw InvalidArgument("weights must match the number of points");

    std::vector<std::size_t> included;
    double max_power = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!all_finite(points[i].current_ma, points[i].power_mw))
            throw InvalidArgument("lasing samples must be finite");
        if (points[i].current_ma <= cutoff_ma)
            max_power = std::max(max_power, points[i].power_mw);
    }
    if (max_power <= 0.0)
        throw InvalidArgument("no lasing: every sample is at or below zero power");
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].current_ma <= cutoff_ma && points[i].power_mw > 0.05 * max_power)
            included.push_back(i);

    LineFit line;
    std::size_t iteration = 0;
    for (;;) {
        if (included.size() < 4)
            throw InvalidArgument("fewer than four above-threshold points after exclusion");
        ++iteration;
        std::vector<double> xs, ys, ws;
        for (auto i : included) {
            xs.push_back(points[i].current_ma);
            ys.push_back(points[i].power_mw);
            ws.push_back(weights.empty() ? 1.0 : weights[i]);
        }
        line = fit_line(xs, ys, ws);
        if (line.slope <= 0.0)
            throw InvalidArgument("lasing branch has non-positive slope");

        double max_pred = 0.0;
        for (auto i : included)
            max_pred = std::max(max_pred, line.slope * points[i].current_ma + line.intercept);
        std::vector<std::size_t> kept;
        for (auto i : included)
            if (line.slope * points[i].current_ma + line.intercept > 0.05 * max_pred)
                kept.push_back(i);
        if (kept.size() == included.size())
            break;
        included = std::move(kept);
    }

    const double m = line.slope, b = line.intercept;
    const double threshold = -b / m;
    const double var_th =
        line.var_intercept / (m * m) + b * b * line.var_slope / (m * m * m * m) - 2.0 * b * line.cov / (m * m * m);

    FitReport report;
    report.model = "lasing";
    report.parameters = {
        {"slope_mw_per_ma", m, std::sqrt(line.var_slope)},
        {"intercept_mw", b, std::sqrt(line.var_intercept)},
        {"threshold_ma", threshold, std::sqrt(std::max(var_th, 0.0))},
    };
    report.residual_rms = line.residual_rms;
    report.points_used = included.size();
    report.points_excluded = points.size() - included.size();
    report.iterations = iteration;
    return report;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw InvalidArgument("x and y arrays must have equal length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > 0.0 && ys[i] > 0.0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    return fit_line(lx, ly, {}).slope;
}

} // namespace selfpump
