#ifndef SELFPUMP_LASER_HPP
#define SELFPUMP_LASER_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace selfpump
{
struct LossElement
{
    std::string name;
    double loss_db = 0.0;
};

// Passive loop elements in propagation order, starting at the amplifier output.
//
// The ring sits in front of elements[ring_position]; its add->drop insertion
// loss on resonance is kept separate from the element list. The 99:1 monitor
// splitter is elements[tap_position]; the tap port reads tap_fraction of the
// power arriving at that splitter, and the element's loss_db is its through
// loss back into the loop.
class LossBudget
{
public:
    LossBudget(std::vector<LossElement> elements,
               double ring_insertion_db,
               std::size_t ring_position,
               std::size_t tap_position,
               double tap_fraction = 0.01);

    // Bench loop: band-pass filters, isolator, 50:50 injection splitter,
    // grating couplers and the 99:1 monitor tap, 18.0 dB in total, plus 2 dB
    // of ring insertion.
    static LossBudget bench_default();

    const std::vector<LossElement> &elements() const { return elements_; }
    double ring_insertion_db() const { return ring_insertion_db_; }
    std::size_t ring_position() const { return ring_position_; }
    std::size_t tap_position() const { return tap_position_; }
    double tap_fraction() const { return tap_fraction_; }

    // Sum of the element losses, excluding the ring insertion.
    double total_loop_loss_db() const;

    // Gain the amplifier must supply at threshold: elements plus ring insertion.
    double threshold_gain_db() const;

    // Linear transmission of elements[first, last).
    double transmission(std::size_t first, std::size_t last) const;

    double amplifier_to_ring_transmission() const;
    double drop_to_tap_transmission() const;

    LossBudget without(std::string_view name) const;

private:
    std::vector<LossElement> elements_;
    double ring_insertion_db_;
    std::size_t ring_position_;
    std::size_t tap_position_;
    double tap_fraction_;
};

// Amplifier model: small-signal gain g0 = k I in nepers of power (G = e^g),
// homogeneous saturation with saturation power P_sat.
class GainModel
{
public:
    GainModel(double k_np_per_ma,
              double saturation_power_mw,
              double max_small_signal_gain_db = 30.0,
              bool clamp_small_signal_gain = false);

    // k chosen so that g0(current) equals gain_db.
    static GainModel calibrated(double current_ma,
                                double gain_db,
                                double saturation_power_mw,
                                double max_small_signal_gain_db = 30.0,
                                bool clamp_small_signal_gain = false);

    double k_np_per_ma() const { return k_; }
    double saturation_power_mw() const { return saturation_power_mw_; }
    double max_small_signal_gain_db() const { return max_gain_db_; }
    bool clamps_small_signal_gain() const { return clamp_; }

    double small_signal_gain_np(double current_ma) const;
    double small_signal_gain_db(double current_ma) const;

    // Single-pass gain of the saturated amplifier for a given input power.
    // Solves g + (P_in / P_sat)(e^g - 1) = g0, which is g = g0 / (1 + P/P_sat)
    // with P the mean power inside the amplifier, (P_out - P_in) / g.
    double saturated_gain_np(double input_power_mw, double current_ma) const;

private:
    double k_;
    double saturation_power_mw_;
    double max_gain_db_;
    bool clamp_;
};

struct LaserOperatingPoint
{
    double current_ma = 0.0;
    double small_signal_gain_db = 0.0;
    double saturated_gain_db = 0.0;
    double circulating_power_mw = 0.0; // amplifier output
    double drop_port_power_mw = 0.0;
    double tap_power_mw = 0.0; // 99:1 monitor port
    bool above_threshold = false;
};

struct RoundTripResult
{
    LaserOperatingPoint point;
    bool converged = false;
    std::size_t iterations = 0;
};

struct LaserOutput
{
    double drop_port_power_mw = 0.0;
    double tap_power_mw = 0.0;
};

double total_loop_loss_db(const LossBudget &budget);

// Throws NoLasing when the threshold gain exceeds the amplifier's rating.
double threshold_current(const GainModel &gain, const LossBudget &budget);

// Power leaving the amplifier in steady state (Rigrod-type closed form):
// P_sat (kI - g_th) G_th / (G_th - 1), zero at or below threshold.
double amplifier_output_power(const GainModel &gain, const LossBudget &budget, double current_ma);

// Pump power delivered to the ring input bus.
double ring_input_power(const GainModel &gain, const LossBudget &budget, double current_ma);

// Closed-form lasing curve. The tap power is amplifier output times the
// transmission up to the monitor splitter times the tap fraction; the drop
// port power is back-computed from it.
LaserOutput output_power_curve(const GainModel &gain, const LossBudget &budget, double current_ma);

double drop_power_from_tap(double tap_mw, const LossBudget &budget);
double tap_power_from_drop(double drop_mw, const LossBudget &budget);

struct RoundTripOptions
{
    double relative_tolerance = 1e-9;
    std::size_t max_iterations = 100000;
    // Below this amplifier input power (mW) the loop is treated as dark.
    double dark_floor_mw = 1e-30;
};

// Iterates P <- P * G_sat(P) * T_loop from a seed amplifier-input power until
// the relative change drops below tolerance. Non-convergence is reported in
// the result together with the last iterate.
RoundTripResult steady_state_roundtrip(const GainModel &gain,
                                       const LossBudget &budget,
                                       double current_ma,
                                       double seed_power_mw,
                                       const RoundTripOptions &options = {});

// Same solver with an extra ring loss of tpa_db_per_mw times the circulating
// (amplifier output) power.
RoundTripResult tpa_rollover(const GainModel &gain,
                             const LossBudget &budget,
                             double current_ma,
                             double tpa_db_per_mw,
                             double seed_power_mw = 1.0,
                             const RoundTripOptions &options = {});

} // namespace selfpump

#endif // SELFPUMP_LASER_HPP
