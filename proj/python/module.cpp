#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

#include "regcrit/cli.hpp"
#include "regcrit/config.hpp"
#include "regcrit/criteria.hpp"
#include "regcrit/errors.hpp"
#include "regcrit/norms.hpp"
#include "regcrit/run.hpp"
#include "regcrit/snapshot.hpp"
#include "regcrit/solver.hpp"

namespace py = pybind11;
using namespace regcrit;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are (3, n, n, n) indexed [component, z, y, x], matching the x-fastest storage.
VelocityField to_field(const Array& a, double length) {
  if (a.ndim() != 4 || a.shape(0) != 3 || a.shape(1) != a.shape(2) || a.shape(2) != a.shape(3)) {
    throw InvalidArgument("velocity array must have shape (3, n, n, n)");
  }
  const Grid grid(static_cast<int>(a.shape(1)), length);
  const double* p = a.data();
  const std::size_t m = grid.size();
  return VelocityField(grid, std::vector<double>(p, p + m), std::vector<double>(p + m, p + 2 * m),
                       std::vector<double>(p + 2 * m, p + 3 * m));
}

Array to_array(const VelocityField& u) {
  const auto n = static_cast<py::ssize_t>(u.grid().n());
  Array out({py::ssize_t{3}, n, n, n});
  double* p = out.mutable_data();
  for (int c = 0; c < 3; ++c) {
    const auto v = u.component(c).values();
    std::copy(v.begin(), v.end(), p + c * v.size());
  }
  return out;
}

SpectralVelocityField spectral(const Array& a, double length) { return fft_forward(to_field(a, length)); }

py::dict series_to_dict(const MonitorSeries& series) {
  std::vector<double> t, energy, linf, bkm, cv, residual, bound;
  std::vector<std::vector<double>> sobolev(4);
  py::dict pairs;
  for (const auto& s : series.samples) {
    t.push_back(s.t);
    energy.push_back(s.energy);
    linf.push_back(s.linf);
    bkm.push_back(s.bkm);
    cv.push_back(s.chan_vasseur);
    residual.push_back(s.identity_residual);
    bound.push_back(s.gronwall_bound);
    for (int m = 0; m < 4; ++m) sobolev[m].push_back(s.sobolev[m]);
  }
  for (std::size_t i = 0; i < series.pairs.size(); ++i) {
    std::vector<double> lp, serrin, log_serrin;
    for (const auto& s : series.samples) {
      lp.push_back(s.pairs[i].lp);
      serrin.push_back(s.pairs[i].serrin);
      log_serrin.push_back(s.pairs[i].log_serrin);
    }
    py::dict d;
    d["lp"] = py::array(py::cast(lp));
    d["serrin"] = py::array(py::cast(serrin));
    d["log_serrin"] = py::array(py::cast(log_serrin));
    pairs[py::str(series.pairs[i].label())] = d;
  }
  py::dict out;
  out["t"] = py::array(py::cast(t));
  out["energy"] = py::array(py::cast(energy));
  out["linf"] = py::array(py::cast(linf));
  out["sobolev"] = py::array(py::cast(sobolev));
  out["bkm"] = py::array(py::cast(bkm));
  out["chan_vasseur"] = py::array(py::cast(cv));
  out["identity_residual"] = py::array(py::cast(residual));
  out["gronwall_bound"] = py::array(py::cast(bound));
  out["pairs"] = pairs;
  return out;
}

// CLI entry points return (exit code, stdout, stderr).
template <class F>
py::tuple command(F f, const std::string& path) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = f(path, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudo-spectral Navier-Stokes solver with regularity-criterion monitors";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", m.attr("Error"));
  py::register_exception<DegenerateField>(m, "DegenerateField", m.attr("Error"));

  constexpr double two_pi = 2.0 * std::numbers::pi;

  m.def("init_field", [](const std::string& kind, int n, double amplitude, std::uint64_t seed, double slope,
                         double length) {
    const InitSpec spec{parse_init_kind(kind), amplitude, seed, slope};
    return to_array(fft_inverse(initial_field(Grid(n, length), spec)));
  }, py::arg("kind"), py::arg("n"), py::arg("amplitude") = 1.0, py::arg("seed") = 0, py::arg("slope") = -2.0,
     py::arg("length") = two_pi);

  m.def("lp_norm", [](const Array& u, const std::string& p, double length) {
    return lp_norm(to_field(u, length), LebesgueExponent::parse(p));
  }, py::arg("u"), py::arg("p"), py::arg("length") = two_pi);

  m.def("sobolev_seminorm", [](const Array& u, int order, double length) {
    return sobolev_seminorm(spectral(u, length), order);
  }, py::arg("u"), py::arg("order"), py::arg("length") = two_pi);

  m.def("gn_ratio", [](const Array& u, const std::string& p, double length) {
    return gn_ratio(spectral(u, length), LebesgueExponent::parse(p));
  }, py::arg("u"), py::arg("p"), py::arg("length") = two_pi);

  m.def("h2_identity_residual", [](const Array& u, double mu, double length) {
    const auto r = h2_identity_residual(spectral(u, length), mu);
    return py::make_tuple(r.lhs, r.rhs, r.residual);
  }, py::arg("u"), py::arg("mu"), py::arg("length") = two_pi, "Returns (lhs, rhs, residual).");

  m.def("holder_check", [](const Array& u, const std::string& p, double length) {
    const auto h = holder_check(spectral(u, length), LebesgueExponent::parse(p));
    return py::make_tuple(h.satisfied, h.actual, h.bound);
  }, py::arg("u"), py::arg("p"), py::arg("length") = two_pi, "Returns (satisfied, actual, bound).");

  m.def("serrin_integrand", [](const Array& u, const std::string& pair, double length) {
    return serrin_integrand(to_field(u, length), SerrinPair::parse(pair));
  }, py::arg("u"), py::arg("pair"), py::arg("length") = two_pi);

  m.def("log_serrin_integrand", [](const Array& u, const std::string& pair, double length) {
    return log_serrin_integrand(to_field(u, length), SerrinPair::parse(pair));
  }, py::arg("u"), py::arg("pair"), py::arg("length") = two_pi);

  m.def("chan_vasseur_integrand", [](const Array& u, double length) {
    return chan_vasseur_integrand(to_field(u, length));
  }, py::arg("u"), py::arg("length") = two_pi);

  m.def("young_constant", [](double c_gn, const std::string& p, double mu) {
    return young_constant(c_gn, LebesgueExponent::parse(p), mu);
  }, py::arg("c_gn"), py::arg("p"), py::arg("mu"));

  m.def("run", [](const std::string& kind, int n, double mu, double dt, double t_end,
                  const std::vector<std::string>& pairs, double amplitude, std::uint64_t seed, int stride,
                  double c_cal) {
    const SolverConfig config(Grid(n), mu, dt, t_end, InitSpec{parse_init_kind(kind), amplitude, seed},
                              stride);
    CriterionConfig monitors;
    for (const auto& p : pairs) monitors.pairs.push_back(SerrinPair::parse(p));
    monitors.mu = mu;
    monitors.c_cal = c_cal;
    monitors.gronwall = c_cal > 0.0;
    MonitorSeries series;
    {
      py::gil_scoped_release release;
      series = run(config, monitors);
    }
    return series_to_dict(series);
  }, py::arg("kind"), py::arg("n"), py::arg("mu"), py::arg("dt"), py::arg("t_end"),
     py::arg("pairs") = std::vector<std::string>{"6:4", "inf:2"}, py::arg("amplitude") = 1.0, py::arg("seed") = 0,
     py::arg("stride") = 1, py::arg("c_cal") = 0.0,
     "Monitored run; the Gronwall bound is tracked only when c_cal > 0.");

  m.def("read_snapshot", [](const std::string& path) {
    const auto s = read_snapshot(path);
    return py::make_tuple(s.time, to_array(s.u));
  }, py::arg("path"), "Returns (time, u).");

  m.def("simulate", [](const std::string& path) { return command(cmd_simulate, path); }, py::arg("config"));
  m.def("calibrate", [](const std::string& path) { return command(cmd_calibrate, path); }, py::arg("config"));
  m.def("verify", [](const std::string& path) { return command(cmd_verify, path); }, py::arg("run_dir"));
  m.def("report", [](const std::string& path) { return command(cmd_report, path); }, py::arg("run_dir"));
}
