#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selfpump/error.hpp"
#include "selfpump/fit.hpp"
#include "selfpump/fwm.hpp"
#include "selfpump/joint_spectrum.hpp"
#include "selfpump/laser.hpp"
#include "selfpump/ring.hpp"

namespace py = pybind11;
using namespace selfpump;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Self-pumped microring four-wave-mixing models";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NoLasing>(m, "NoLasing", PyExc_RuntimeError);
    py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

    // ring
    py::class_<RingGeometry>(m, "RingGeometry")
        .def(py::init<double, double>(), py::arg("radius_um"), py::arg("group_index"))
        .def_static("from_fsr", &RingGeometry::from_fsr, py::arg("radius_um"), py::arg("fsr_nm"),
                    py::arg("wavelength_nm"))
        .def_property_readonly("radius_um", &RingGeometry::radius_um)
        .def_property_readonly("group_index", &RingGeometry::group_index)
        .def_property_readonly("round_trip_length_um", &RingGeometry::round_trip_length_um);

    py::class_<CouplingConfig>(m, "CouplingConfig")
        .def(py::init<double, double, double>(), py::arg("t1"), py::arg("t2"), py::arg("a"))
        .def_property_readonly("t1", &CouplingConfig::t1)
        .def_property_readonly("t2", &CouplingConfig::t2)
        .def_property_readonly("a", &CouplingConfig::a)
        .def("critically_coupled", &CouplingConfig::critically_coupled, py::arg("tolerance") = 1e-10);

    m.def("through_transmission", &through_transmission, py::arg("coupling"), py::arg("phase"));
    m.def("drop_transmission", &drop_transmission, py::arg("coupling"), py::arg("phase"));
    m.def("field_enhancement", &field_enhancement, py::arg("coupling"), py::arg("phase"));
    m.def("fsr", &fsr, py::arg("geometry"), py::arg("wavelength_nm"));
    m.def("loaded_q", &loaded_q, py::arg("coupling"), py::arg("geometry"), py::arg("wavelength_nm"));
    m.def("calibrate_symmetric", &calibrate_symmetric, py::arg("geometry"), py::arg("wavelength_nm"),
          py::arg("loaded_q"), py::arg("through_extinction"));

    py::class_<RingDevice>(m, "RingDevice")
        .def(py::init([](const RingGeometry &g, const CouplingConfig &c, double ref) {
                 return RingDevice{g, c, ref};
             }),
             py::arg("geometry"), py::arg("coupling"), py::arg("reference_nm"))
        .def("through", &RingDevice::through)
        .def("drop", &RingDevice::drop)
        .def("fwhm_nm", &RingDevice::fwhm_nm);

    m.def(
        "sample_ring_spectrum",
        [](const RingDevice &ring, double start, double stop, double resolution_pm) {
            const auto s = sample_ring_spectrum(ring, start, stop, resolution_pm);
            std::vector<double> wl, th, dr;
            for (const auto &x : s) {
                wl.push_back(x.wavelength_nm);
                th.push_back(x.through);
                dr.push_back(x.drop);
            }
            return py::make_tuple(wl, th, dr);
        },
        py::arg("ring"), py::arg("start_nm"), py::arg("stop_nm"), py::arg("resolution_pm") = 50.0);

    // laser
    py::class_<LossBudget>(m, "LossBudget")
        .def_static("bench_default", &LossBudget::bench_default)
        .def("total_loop_loss_db", &LossBudget::total_loop_loss_db)
        .def("threshold_gain_db", &LossBudget::threshold_gain_db);

    py::class_<GainModel>(m, "GainModel")
        .def(py::init<double, double, double, bool>(), py::arg("k_np_per_ma"), py::arg("saturation_power_mw"),
             py::arg("max_small_signal_gain_db") = 30.0, py::arg("clamp") = false)
        .def_static("calibrated", &GainModel::calibrated, py::arg("current_ma"), py::arg("gain_db"),
                    py::arg("saturation_power_mw"), py::arg("max_small_signal_gain_db") = 30.0,
                    py::arg("clamp") = false)
        .def("small_signal_gain_db", &GainModel::small_signal_gain_db);

    m.def("threshold_current", &threshold_current, py::arg("gain"), py::arg("budget"));
    m.def("amplifier_output_power", &amplifier_output_power, py::arg("gain"), py::arg("budget"),
          py::arg("current_ma"));
    m.def("ring_input_power", &ring_input_power, py::arg("gain"), py::arg("budget"), py::arg("current_ma"));
    m.def(
        "output_power_curve",
        [](const GainModel &g, const LossBudget &b, double i) {
            const auto o = output_power_curve(g, b, i);
            return py::make_tuple(o.drop_port_power_mw, o.tap_power_mw);
        },
        py::arg("gain"), py::arg("budget"), py::arg("current_ma"));
    m.def(
        "steady_state_roundtrip",
        [](const GainModel &g, const LossBudget &b, double i, double seed) {
            const auto r = steady_state_roundtrip(g, b, i, seed);
            return py::dict(py::arg("drop_port_power_mw") = r.point.drop_port_power_mw,
                            py::arg("circulating_power_mw") = r.point.circulating_power_mw,
                            py::arg("converged") = r.converged, py::arg("iterations") = r.iterations);
        },
        py::arg("gain"), py::arg("budget"), py::arg("current_ma"), py::arg("seed_power_mw") = 1.0);

    // fwm
    m.def("idler_wavelength", &idler_wavelength, py::arg("pump_nm"), py::arg("signal_nm"));
    m.def(
        "idler_power_mw",
        [](double fe_i, double fe_p, double fe_s, double gamma, double length_um, double pump_mw, double signal_uw) {
            return idler_power_mw({fe_i, fe_p, fe_s}, gamma, length_um, pump_mw, signal_uw);
        },
        py::arg("enhancement_idler"), py::arg("enhancement_pump"), py::arg("enhancement_signal"),
        py::arg("gamma_per_w_per_m"), py::arg("length_um"), py::arg("pump_mw"), py::arg("signal_uw"));
    m.def("loglog_slope", [](std::vector<double> x, std::vector<double> y) { return loglog_slope(x, y); });

    // joint spectrum
    py::class_<SchmidtResult>(m, "SchmidtResult")
        .def_readonly("singular_values", &SchmidtResult::singular_values)
        .def_readonly("coefficients", &SchmidtResult::coefficients)
        .def_readonly("purity", &SchmidtResult::purity)
        .def_readonly("schmidt_number", &SchmidtResult::schmidt_number);

    m.def("schmidt", py::overload_cast<const Eigen::MatrixXcd &>(&schmidt), py::arg("amplitude"));
    m.def(
        "schmidt_purity",
        [](double signal_nm, double signal_lw, double idler_nm, double idler_lw, double pump_lw, double span_fwhm,
           double step_pm) {
            const auto grid = SpectralGrid::around(signal_nm, signal_lw, idler_nm, idler_lw, span_fwhm, step_pm);
            return schmidt(jsa(grid, pump_lw, signal_lw, idler_lw));
        },
        py::arg("signal_nm"), py::arg("signal_linewidth_ghz"), py::arg("idler_nm"), py::arg("idler_linewidth_ghz"),
        py::arg("pump_linewidth_ghz"), py::arg("span_fwhm") = 8.0, py::arg("step_pm") = 10.0);

    // fitting
    m.def(
        "fit_lorentzian",
        [](std::vector<double> wl, std::vector<double> values, double lo, double hi, const std::string &kind) {
            Spectrum s{std::move(wl), std::move(values), 50.0, spectrum_kind_from_string(kind)};
            const auto r = fit_lorentzian(s, {lo, hi});
            py::dict d;
            for (const auto &p : r.parameters)
                d[py::str(p.name)] = p.value;
            return d;
        },
        py::arg("wavelength_nm"), py::arg("value"), py::arg("window_min_nm"), py::arg("window_max_nm"),
        py::arg("kind") = "through");
    m.def(
        "fit_lasing_curve",
        [](std::vector<double> current, std::vector<double> power, double cutoff) {
            if (current.size() != power.size())
                throw InvalidArgument("current and power lengths differ");
            std::vector<LasingSample> pts;
            for (std::size_t i = 0; i < current.size(); ++i)
                pts.push_back({current[i], power[i]});
            const auto r = fit_lasing_curve(pts, cutoff);
            py::dict d;
            for (const auto &p : r.parameters)
                d[py::str(p.name)] = p.value;
            return d;
        },
        py::arg("current_ma"), py::arg("power_mw"), py::arg("cutoff_ma") = std::numeric_limits<double>::infinity());
}
