#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdms/dynamics.hpp"
#include "cdms/indexing.hpp"
#include "cdms/observables.hpp"
#include "cdms/params.hpp"
#include "cdms/runner.hpp"
#include "cdms/state.hpp"

namespace py = pybind11;
using namespace cdms;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::array_t<std::complex<double>> amplitudes_array(const CollectiveState& s) {
  py::array_t<std::complex<double>> a(static_cast<py::ssize_t>(s.amp.size()));
  std::copy(s.amp.begin(), s.amp.end(), a.mutable_data());
  return a;
}

py::dict record_to_dict(const TrajectoryRecord& rec) {
  py::dict d;
  d["t"] = to_array(rec.times);
  d["jx"] = to_array(rec.jx);
  d["jy"] = to_array(rec.jy);
  d["jz"] = to_array(rec.jz);
  d["djx"] = to_array(rec.dx);
  d["djy"] = to_array(rec.dy);
  d["djz"] = to_array(rec.dz);
  d["xi2z"] = to_array(rec.xi2z);
  d["photocurrent"] = to_array(rec.photocurrent);
  d["trace_err"] = to_array(rec.trace_err);
  d["herm_err"] = to_array(rec.herm_err);
  py::list snaps;
  for (const DistributionSnapshot& s : rec.snapshots) {
    py::dict sd;
    sd["time"] = s.time;
    sd["weight1"] = to_array(s.w1);
    sd["weightL"] = to_array(s.wl);
    sd["weightL2"] = to_array(s.wl2);
    snaps.append(sd);
  }
  d["snapshots"] = snaps;
  d["steps_done"] = rec.steps_done;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conditional spin squeezing simulator (collective density matrix)";

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_static("defaults", &PhysicalParams::defaults)
      .def_readwrite("omega_ud", &PhysicalParams::omega_ud)
      .def_readwrite("delta_up", &PhysicalParams::delta_up)
      .def_readwrite("delta_dn", &PhysicalParams::delta_dn)
      .def_readwrite("kappa", &PhysicalParams::kappa)
      .def_readwrite("g", &PhysicalParams::g)
      .def_readwrite("gamma", &PhysicalParams::gamma)
      .def_readwrite("eta", &PhysicalParams::eta)
      .def_readwrite("beta_in", &PhysicalParams::beta_in)
      .def_readwrite("vartheta", &PhysicalParams::vartheta)
      .def_readwrite("n_atoms", &PhysicalParams::n_atoms)
      .def_readwrite("theta", &PhysicalParams::theta)
      .def_readwrite("phi", &PhysicalParams::phi);

  py::class_<DerivedParams>(m, "DerivedParams")
      .def_readonly("beta_up", &DerivedParams::beta_up)
      .def_readonly("beta_dn", &DerivedParams::beta_dn)
      .def_readonly("chi_up", &DerivedParams::chi_up)
      .def_readonly("chi_dn", &DerivedParams::chi_dn)
      .def_readonly("xi_up", &DerivedParams::xi_up)
      .def_readonly("xi_dn", &DerivedParams::xi_dn)
      .def_readonly("rate_pump", &DerivedParams::rate_pump)
      .def_readonly("rate_decay", &DerivedParams::rate_decay)
      .def_readonly("coop", &DerivedParams::coop)
      .def_readonly("n_coop", &DerivedParams::n_coop)
      .def_readonly("frame_shift", &DerivedParams::frame_shift)
      .def_readonly("warnings", &DerivedParams::warnings);

  py::class_<StepConfig>(m, "StepConfig")
      .def(py::init<>())
      .def_readwrite("dt", &StepConfig::dt)
      .def_readwrite("t_end", &StepConfig::t_end)
      .def_readwrite("renormalize_every", &StepConfig::renormalize_every)
      .def_readwrite("record_every", &StepConfig::record_every)
      .def_readwrite("frame_shift_override", &StepConfig::frame_shift_override)
      .def_readwrite("snapshot_times", &StepConfig::snapshot_times)
      .def_readwrite("measurement_on", &StepConfig::measurement_on);

  py::class_<CollectiveState>(m, "CollectiveState")
      .def_readonly("n_atoms", &CollectiveState::n_atoms)
      .def_property_readonly("amplitudes", &amplitudes_array);

  m.def("state_count", &state_count, py::arg("n_atoms"));
  m.def(
      "flat_index",
      [](int n_atoms, int n_uu, int n_ud, int n_du, int n_dd) {
        return flat_index(MultiIndex{n_uu, n_ud, n_du, n_dd}, n_atoms);
      },
      py::arg("n_atoms"), py::arg("n_uu"), py::arg("n_ud"), py::arg("n_du"),
      py::arg("n_dd"));
  m.def(
      "multi_index",
      [](int n_atoms, std::int64_t flat) {
        const MultiIndex mi = multi_index(flat, n_atoms);
        return py::make_tuple(mi.n_uu, mi.n_ud, mi.n_du, mi.n_dd);
      },
      py::arg("n_atoms"), py::arg("flat"));

  m.def("derive_params", &derive_params, py::arg("physical"));
  m.def("css_init", &css_init, py::arg("theta"), py::arg("phi"),
        py::arg("n_atoms"));
  m.def("trace", [](const CollectiveState& s) { return trace(s); });
  m.def("hermitian_residual", &hermitian_residual);

  m.def(
      "spin_moments",
      [](const CollectiveState& s) {
        const SpinMoments mo = spin_moments(s);
        py::dict d;
        d["jx"] = mo.jx;
        d["jy"] = mo.jy;
        d["jz"] = mo.jz;
        d["jx2"] = mo.jx2;
        d["jy2"] = mo.jy2;
        d["jz2"] = mo.jz2;
        d["djx"] = mo.dx;
        d["djy"] = mo.dy;
        d["djz"] = mo.dz;
        return d;
      },
      py::arg("state"));

  m.def(
      "squeezing_parameter",
      [](const CollectiveState& s) {
        const SqueezingResult r = squeezing_parameter(s);
        return py::make_tuple(r.value, r.defined);
      },
      py::arg("state"),
      "Returns (value, defined) for the z-squeezing parameter");

  m.def(
      "run_trajectory",
      [](const PhysicalParams& p, const StepConfig& cfg, std::uint64_t seed,
         bool keep_final_state) {
        TrajectoryRecord rec;
        {
          py::gil_scoped_release release;
          const auto steps =
              static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
          const WienerPath noise = WienerPath::seeded(seed, steps);
          rec = run_trajectory(p, cfg, noise);
        }
        py::dict d = record_to_dict(rec);
        if (keep_final_state)
          d["final_amplitudes"] = amplitudes_array(rec.final_state);
        return d;
      },
      py::arg("physical"), py::arg("step"), py::arg("seed"),
      py::arg("keep_final_state") = false);

  m.def(
      "oracle_equivalence",
      [](const PhysicalParams& p, const StepConfig& cfg, std::uint64_t seed) {
        const auto steps =
            static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
        const WienerPath noise = WienerPath::seeded(seed, steps);
        const OracleCheckReport rep = oracle_equivalence_run(p, cfg, noise);
        py::dict d;
        d["n_atoms"] = rep.n_atoms;
        d["steps"] = rep.steps;
        d["max_abs_diff"] = rep.max_abs_diff;
        d["pass"] = rep.pass;
        return d;
      },
      py::arg("physical"), py::arg("step"), py::arg("seed"));

  m.attr("__version__") = kCodeVersion;
}
