#ifndef SELFPUMP_COMMANDS_HPP
#define SELFPUMP_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "selfpump/config.hpp"
#include "selfpump/fit.hpp"
#include "selfpump/fwm.hpp"

namespace selfpump
{
struct CommandResult
{
    std::vector<std::string> outputs; // file names inside the output directory
    std::vector<std::string> inputs;
    std::string summary; // one or two lines for the terminal
};

struct RingSpectrumOptions
{
    std::optional<double> start_nm, stop_nm, resolution_pm;
};

struct LaserCurveOptions
{
    std::optional<double> start_ma, stop_ma, step_ma;
    bool tpa = false;
};

struct FwmSweepOptions
{
    SweepAxis axis = SweepAxis::pump;
    std::optional<double> start, stop; // mA for the pump axis, uW for the signal axis
    std::optional<std::size_t> points;
};

enum class FitModel
{
    lorentzian,
    lasing
};

FitModel fit_model_from_string(std::string_view name);

struct FitOptions
{
    std::filesystem::path input;
    FitModel model = FitModel::lorentzian;
    std::string column; // default: through / drop_power_mw
    std::optional<double> window_min_nm, window_max_nm;
    std::optional<double> cutoff_ma;
    double resolution_pm = 50.0;
};

// Each command writes its files into out_dir and returns their names. None
// of them writes the manifest; run_command does.
CommandResult cmd_ring_spectrum(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                                const RingSpectrumOptions &opts = {});
CommandResult cmd_laser_curve(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                              const LaserCurveOptions &opts = {});
CommandResult cmd_fwm_sweep(const ExperimentConfig &cfg, const std::filesystem::path &out_dir,
                            const FwmSweepOptions &opts = {});
CommandResult cmd_jsd(const ExperimentConfig &cfg, const std::filesystem::path &out_dir);
CommandResult cmd_fit(const FitOptions &opts, const std::filesystem::path &out_dir);

// Laser curve rows shared by the command and its tests.
std::vector<LasingSample> laser_curve_samples(const ExperimentConfig &cfg, double start_ma, double stop_ma,
                                              double step_ma, bool tpa);

} // namespace selfpump

#endif // SELFPUMP_COMMANDS_HPP
