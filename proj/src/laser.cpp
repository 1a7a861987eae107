#include "selfpump/laser.hpp"

#include <algorithm>
#include <cmath>

#include "selfpump/error.hpp"
#include "selfpump/units.hpp"

namespace selfpump
{
LossBudget::LossBudget(std::vector<LossElement> elements,
                       double ring_insertion_db,
                       std::size_t ring_position,
                       std::size_t tap_position,
                       double tap_fraction)
    : elements_(std::move(elements)),
      ring_insertion_db_(ring_insertion_db),
      ring_position_(ring_position),
      tap_position_(tap_position),
      tap_fraction_(tap_fraction)
{
    if (elements_.empty())
        throw InvalidArgument("loss budget needs at least one element");
    for (const auto &e : elements_)
        if (!std::isfinite(e.loss_db) || e.loss_db < 0.0)
            throw InvalidArgument("loss of '" + e.name + "' must be finite and >= 0 dB");
    if (!std::isfinite(ring_insertion_db) || ring_insertion_db < 0.0)
        throw InvalidArgument("ring insertion loss must be finite and >= 0 dB");
    if (ring_position_ > elements_.size())
        throw InvalidArgument("ring position past the end of the loop");
    if (tap_position_ >= elements_.size() || tap_position_ < ring_position_)
        throw InvalidArgument("monitor tap must be an element downstream of the ring");
    if (!std::isfinite(tap_fraction) || tap_fraction <= 0.0 || tap_fraction >= 1.0)
        throw InvalidArgument("tap fraction must lie in (0, 1)");
}

LossBudget LossBudget::bench_default()
{
    return LossBudget(
        {
            {"bpf_amplifier", 3.5},
            {"isolator", 0.3},
            {"bs_50_50", 3.0},
            {"grating_in", 3.6},
            {"grating_out", 3.6},
            {"bpf_sample", 3.5},
            {"bs_99_1", 0.5},
        },
        2.0, 4, 6, 0.01);
}

double LossBudget::total_loop_loss_db() const
{
    double total = 0.0;
    for (const auto &e : elements_)
        total += e.loss_db;
    return total;
}

double LossBudget::threshold_gain_db() const { return total_loop_loss_db() + ring_insertion_db_; }

double LossBudget::transmission(std::size_t first, std::size_t last) const
{
    last = std::min(last, elements_.size());
    double loss = 0.0;
    for (std::size_t i = first; i < last; ++i)
        loss += elements_[i].loss_db;
    return transmission_from_loss_db(loss);
}

double LossBudget::amplifier_to_ring_transmission() const { return transmission(0, ring_position_); }

double LossBudget::drop_to_tap_transmission() const { return transmission(ring_position_, tap_position_); }

LossBudget LossBudget::without(std::string_view name) const
{
    auto it = std::find_if(elements_.begin(), elements_.end(), [&](const auto &e) { return e.name == name; });
    if (it == elements_.end())
        throw InvalidArgument("no loss element named '" + std::string(name) + "'");
    const auto index = static_cast<std::size_t>(it - elements_.begin());
    if (index == tap_position_)
        throw InvalidArgument("cannot remove the monitor tap");
    auto rest = elements_;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(index));
    const auto ring = ring_position_ - (index < ring_position_ ? 1 : 0);
    const auto tap = tap_position_ - (index < tap_position_ ? 1 : 0);
    return LossBudget(std::move(rest), ring_insertion_db_, ring, tap, tap_fraction_);
}

GainModel::GainModel(double k_np_per_ma,
                     double saturation_power_mw,
                     double max_small_signal_gain_db,
                     bool clamp_small_signal_gain)
    : k_(k_np_per_ma),
      saturation_power_mw_(saturation_power_mw),
      max_gain_db_(max_small_signal_gain_db),
      clamp_(clamp_small_signal_gain)
{
    if (!std::isfinite(k_) || k_ <= 0.0)
        throw InvalidArgument("gain coefficient k must be positive");
    if (!std::isfinite(saturation_power_mw_) || saturation_power_mw_ <= 0.0)
        throw InvalidArgument("saturation power must be positive");
    if (!std::isfinite(max_gain_db_) || max_gain_db_ <= 0.0 || max_gain_db_ > 30.0)
        throw InvalidArgument("maximum small-signal gain must lie in (0, 30] dB");
}

GainModel GainModel::calibrated(double current_ma,
                                double gain_db,
                                double saturation_power_mw,
                                double max_small_signal_gain_db,
                                bool clamp_small_signal_gain)
{
    if (!all_finite(current_ma, gain_db) || current_ma <= 0.0 || gain_db <= 0.0)
        throw InvalidArgument("gain calibration point must be positive");
    return GainModel(nepers_from_db(gain_db) / current_ma, saturation_power_mw, max_small_signal_gain_db,
                     clamp_small_signal_gain);
}

double GainModel::small_signal_gain_np(double current_ma) const
{
    if (!std::isfinite(current_ma) || current_ma < 0.0)
        throw InvalidArgument("drive current must be finite and >= 0");
    const double g0 = k_ * current_ma;
    return clamp_ ? std::min(g0, nepers_from_db(max_gain_db_)) : g0;
}

double GainModel::small_signal_gain_db(double current_ma) const
{
    return db_from_nepers(small_signal_gain_np(current_ma));
}

double GainModel::saturated_gain_np(double input_power_mw, double current_ma) const
{
    const double g0 = small_signal_gain_np(current_ma);
    if (!std::isfinite(input_power_mw) || input_power_mw < 0.0)
        throw InvalidArgument("amplifier input power must be finite and >= 0");
    const double s = input_power_mw / saturation_power_mw_;
    if (s == 0.0 || g0 == 0.0)
        return g0;

    // h(g) = g + s (e^g - 1) - g0 is increasing and convex with h(0) < 0 <= h(g0).
    double lo = 0.0;
    double hi = g0;
    double g = std::min(g0, g0 / (1.0 + s));
    for (int i = 0; i < 200; ++i) {
        const double eg = std::exp(g);
        const double h = g + s * (eg - 1.0) - g0;
        if (h > 0.0)
            hi = g;
        else
            lo = g;
        double next = g - h / (1.0 + s * eg);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - g) <= 1e-15 * std::max(1.0, g))
            return next;
        g = next;
    }
    return g;
}

double total_loop_loss_db(const LossBudget &budget) { return budget.total_loop_loss_db(); }

double threshold_current(const GainModel &gain, const LossBudget &budget)
{
    const double g_th_db = budget.threshold_gain_db();
    if (g_th_db > gain.max_small_signal_gain_db())
        throw NoLasing("threshold gain " + std::to_string(g_th_db) + " dB exceeds the amplifier's " +
                       std::to_string(gain.max_small_signal_gain_db()) + " dB small-signal gain");
    return nepers_from_db(g_th_db) / gain.k_np_per_ma();
}

double amplifier_output_power(const GainModel &gain, const LossBudget &budget, double current_ma)
{
    const double g0 = gain.small_signal_gain_np(current_ma);
    const double g_th = nepers_from_db(budget.threshold_gain_db());
    if (g0 <= g_th)
        return 0.0;
    if (g_th == 0.0)
        throw InvalidArgument("lossless loop has no finite steady state");
    const double G_th = std::exp(g_th);
    return gain.saturation_power_mw() * (g0 - g_th) * G_th / (G_th - 1.0);
}

double ring_input_power(const GainModel &gain, const LossBudget &budget, double current_ma)
{
    return amplifier_output_power(gain, budget, current_ma) * budget.amplifier_to_ring_transmission();
}

LaserOutput output_power_curve(const GainModel &gain, const LossBudget &budget, double current_ma)
{
    // T_tot: every loop element up to the monitor splitter, ring included.
    const double to_tap = budget.amplifier_to_ring_transmission() *
                          transmission_from_loss_db(budget.ring_insertion_db()) *
                          budget.drop_to_tap_transmission();
    const double tap = amplifier_output_power(gain, budget, current_ma) * to_tap * budget.tap_fraction();
    return {drop_power_from_tap(tap, budget), tap};
}

double drop_power_from_tap(double tap_mw, const LossBudget &budget)
{
    if (!std::isfinite(tap_mw) || tap_mw < 0.0)
        throw InvalidArgument("tap power must be finite and >= 0");
    return tap_mw / budget.tap_fraction() / budget.drop_to_tap_transmission();
}

double tap_power_from_drop(double drop_mw, const LossBudget &budget)
{
    if (!std::isfinite(drop_mw) || drop_mw < 0.0)
        throw InvalidArgument("drop power must be finite and >= 0");
    return drop_mw * budget.drop_to_tap_transmission() * budget.tap_fraction();
}

namespace
{
LaserOperatingPoint describe(const GainModel &gain,
                             const LossBudget &budget,
                             double current_ma,
                             double input_mw,
                             double tpa_db_per_mw)
{
    LaserOperatingPoint p;
    p.current_ma = current_ma;
    p.small_signal_gain_db = gain.small_signal_gain_db(current_ma);
    const double g = gain.saturated_gain_np(input_mw, current_ma);
    p.saturated_gain_db = db_from_nepers(g);
    p.circulating_power_mw = input_mw * std::exp(g);
    const double ring_loss_db = budget.ring_insertion_db() + tpa_db_per_mw * p.circulating_power_mw;
    p.drop_port_power_mw = p.circulating_power_mw * budget.amplifier_to_ring_transmission() *
                           transmission_from_loss_db(ring_loss_db);
    p.tap_power_mw = tap_power_from_drop(p.drop_port_power_mw, budget);
    p.above_threshold = p.small_signal_gain_db >= budget.threshold_gain_db();
    return p;
}

RoundTripResult iterate_loop(const GainModel &gain,
                             const LossBudget &budget,
                             double current_ma,
                             double seed_power_mw,
                             double tpa_db_per_mw,
                             const RoundTripOptions &options)
{
    if (!std::isfinite(seed_power_mw) || seed_power_mw <= 0.0)
        throw InvalidArgument("seed power must be positive");
    const double passive_db = budget.threshold_gain_db();

    RoundTripResult result;
    double power = seed_power_mw;
    // Net small-signal round trip <= 1: the only fixed point is the dark one,
    // and plain iteration would creep towards it algebraically at threshold.
    if (gain.small_signal_gain_np(current_ma) <= nepers_from_db(passive_db)) {
        result.converged = true;
        result.point = describe(gain, budget, current_ma, 0.0, tpa_db_per_mw);
        return result;
    }
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        const double out = power * std::exp(gain.saturated_gain_np(power, current_ma));
        const double next = out * transmission_from_loss_db(passive_db + tpa_db_per_mw * out);
        result.iterations = it;
        if (next < options.dark_floor_mw) {
            power = 0.0;
            result.converged = true;
            break;
        }
        const double change = std::abs(next - power) / power;
        power = next;
        if (change < options.relative_tolerance) {
            result.converged = true;
            break;
        }
    }
    result.point = describe(gain, budget, current_ma, power, tpa_db_per_mw);
    return result;
}
} // namespace

RoundTripResult steady_state_roundtrip(const GainModel &gain,
                                       const LossBudget &budget,
                                       double current_ma,
                                       double seed_power_mw,
                                       const RoundTripOptions &options)
{
    return iterate_loop(gain, budget, current_ma, seed_power_mw, 0.0, options);
}

RoundTripResult tpa_rollover(const GainModel &gain,
                             const LossBudget &budget,
                             double current_ma,
                             double tpa_db_per_mw,
                             double seed_power_mw,
                             const RoundTripOptions &options)
{
    if (!std::isfinite(tpa_db_per_mw) || tpa_db_per_mw < 0.0)
        throw InvalidArgument("TPA coefficient must be finite and >= 0");
    return iterate_loop(gain, budget, current_ma, seed_power_mw, tpa_db_per_mw, options);
}

} // namespace selfpump
