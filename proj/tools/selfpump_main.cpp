#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "selfpump/commands.hpp"
#include "selfpump/config.hpp"
#include "selfpump/error.hpp"
#include "selfpump/manifest.hpp"

namespace
{
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNonConvergence = 3;
constexpr int kIoError = 4;

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}
} // namespace

int main(int argc, char **argv)
{
    using namespace selfpump;

    CLI::App app{"Self-pumped ring FWM simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "YAML experiment config (built-in defaults when omitted)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--seed", seed, "random seed (overrides the config)");

    RingSpectrumOptions ring_opts;
    auto *ring = app.add_subcommand("ring-spectrum", "through/drop spectra and resonance table");
    ring->add_option("--start-nm", ring_opts.start_nm);
    ring->add_option("--stop-nm", ring_opts.stop_nm);
    ring->add_option("--resolution-pm", ring_opts.resolution_pm);

    LaserCurveOptions laser_opts;
    auto *laser = app.add_subcommand("laser-curve", "lasing curve and threshold fit");
    laser->add_option("--start-ma", laser_opts.start_ma);
    laser->add_option("--stop-ma", laser_opts.stop_ma);
    laser->add_option("--step-ma", laser_opts.step_ma);
    laser->add_flag("--tpa", laser_opts.tpa, "include two-photon absorption rollover");

    FwmSweepOptions fwm_opts;
    std::string axis = "pump";
    auto *fwm = app.add_subcommand("fwm-sweep", "idler power against pump or signal power");
    fwm->add_option("--axis", axis)->check(CLI::IsMember({"pump", "signal"}));
    fwm->add_option("--start", fwm_opts.start, "mA (pump axis) or uW (signal axis)");
    fwm->add_option("--stop", fwm_opts.stop);
    fwm->add_option("--points", fwm_opts.points);

    auto *jsd = app.add_subcommand("jsd", "stimulated joint spectral density scan and Schmidt purity");

    FitOptions fit_opts;
    std::string model = "lorentzian";
    std::string input;
    auto *fit = app.add_subcommand("fit", "fit a Lorentzian or a lasing curve to a CSV file");
    fit->add_option("--input", input)->required();
    fit->add_option("--model", model)->check(CLI::IsMember({"lorentzian", "lasing"}));
    fit->add_option("--column", fit_opts.column);
    fit->add_option("--window-min-nm", fit_opts.window_min_nm);
    fit->add_option("--window-max-nm", fit_opts.window_max_nm);
    fit->add_option("--cutoff-ma", fit_opts.cutoff_ma);
    fit->add_option("--resolution-pm", fit_opts.resolution_pm);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const auto started = std::chrono::steady_clock::now();
        const auto started_utc = utc_now();
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (config_path.empty())
            cfg.validate();
        if (seed)
            cfg.seed = *seed;
        const std::filesystem::path out = out_dir.empty() ? std::filesystem::path(cfg.output_directory) : std::filesystem::path(out_dir);

        CommandResult result;
        std::string command;
        if (*ring) {
            command = "ring-spectrum";
            result = cmd_ring_spectrum(cfg, out, ring_opts);
        } else if (*laser) {
            command = "laser-curve";
            result = cmd_laser_curve(cfg, out, laser_opts);
        } else if (*fwm) {
            command = "fwm-sweep";
            fwm_opts.axis = sweep_axis_from_string(axis);
            result = cmd_fwm_sweep(cfg, out, fwm_opts);
        } else if (*jsd) {
            command = "jsd";
            result = cmd_jsd(cfg, out);
        } else {
            command = "fit";
            fit_opts.input = input;
            fit_opts.model = fit_model_from_string(model);
            result = cmd_fit(fit_opts, out);
        }

        RunManifest manifest;
        manifest.config_sha256 = sha256_hex(cfg.source_text);
        manifest.tool_version = std::string(tool_version());
        manifest.command = command;
        manifest.seed = cfg.seed;
        manifest.inputs = result.inputs;
        if (!config_path.empty())
            manifest.inputs.insert(manifest.inputs.begin(), config_path);
        manifest.outputs = result.outputs;
        manifest.started_utc = started_utc;
        manifest.wall_clock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_manifest(out, manifest);

        std::cout << command << ": " << result.summary << "\n";
        return kOk;
    } catch (const ConfigError &e) {
        std::cerr << "config error [" << e.key() << "]: " << e.what() << "\n";
        return kConfigError;
    } catch (const NoLasing &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NonConvergence &e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kIoError;
    } catch (const IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const InvalidArgument &e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIoError;
    }
}
