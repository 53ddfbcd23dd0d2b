#include "swarmstab/analyze.hpp"
#include "swarmstab/lyapunov.hpp"
#include "swarmstab/replicate.hpp"
#include "swarmstab/scenario.hpp"
#include "swarmstab/watched.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace swarmstab;

namespace {

std::string rational_str(const Rational& r) {
  std::ostringstream ss;
  ss << r;
  return ss.str();
}

py::dict verdict_dict(const StabilityVerdict& v) {
  py::list margins;
  for (const auto& m : v.margins) {
    py::dict d;
    d["label"] = m.label;
    d["piece"] = m.piece;
    d["exact"] = rational_str(m.exact);
    d["value"] = m.value;
    d["binding"] = m.binding;
    margins.append(d);
  }
  py::dict out;
  out["verdict"] = std::string(verdict_name(v.verdict));
  out["binding"] = v.binding;
  out["reason"] = v.reason;
  out["margins"] = margins;
  return out;
}

py::dict summary_dict(const RunSummary& r) {
  py::dict d;
  d["seed"] = r.seed;
  d["horizon"] = r.horizon;
  d["initial_n"] = r.initial_n;
  d["final_n"] = r.final_n;
  d["mean_n"] = r.mean_n;
  d["late_mean_n"] = r.late_mean_n;
  d["growth_slope"] = r.growth_slope;
  d["late_min_n"] = r.late_min_n;
  d["one_club_frac"] = r.final_one_club_frac;
  d["arrivals"] = r.arrivals;
  d["departures"] = r.departures;
  d["events"] = r.events;
  return d;
}

py::dict consts_dict(const lyapunov::LyapConsts& c) {
  py::dict d;
  d["r"] = c.r;
  d["d"] = c.d;
  d["beta"] = c.beta;
  d["alpha"] = c.alpha;
  d["eps"] = c.eps;
  d["n_o"] = c.n_o;
  d["xi"] = c.xi;
  d["p"] = c.p;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stability analysis and simulation of P2P swarms";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_static("from_yaml", &parse_scenario_text, py::arg("text"))
      .def_static("from_file", &parse_scenario, py::arg("path"))
      .def("to_yaml", &format_scenario)
      .def_property_readonly("K", [](const Scenario& s) { return s.params.K; })
      .def_property_readonly("coded", [](const Scenario& s) { return s.params.coded; })
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("replications", &Scenario::replications)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("threads", &Scenario::threads)
      .def_readwrite("designated_piece", &Scenario::designated_piece)
      .def_readwrite("out", &Scenario::out)
      .def("with_sweep_value",
           [](const Scenario& s, const std::string& param, const std::string& value) {
             Scenario t = s;
             t.params = apply_sweep(s.params, param, Rational(value));
             t.sweep.reset();
             return t;
           },
           py::arg("param"), py::arg("value"), "Copy with one parameter set to an exact value such as '3/2'.");

  m.def("analyze",
        [](const Scenario& s) { return verdict_dict(s.params.coded ? classify_coded(s.params) : classify(s.params)); },
        py::arg("scenario"), "Exact stability verdict with per-set margins.");

  m.def("delta",
        [](const Scenario& s, const std::vector<int>& pieces) {
          const auto d = delta_S(s.params, PieceSet::of(s.params.K, std::span<const int>(pieces)));
          return py::make_tuple(rational_str(d), static_cast<double>(d));
        },
        py::arg("scenario"), py::arg("pieces"), "Margin of the piece set as (exact string, float).");

  m.def("simulate",
        [](const Scenario& s) {
          RunOptions o;
          o.horizon = s.horizon;
          o.policy = s.policy;
          o.designated_piece = s.designated_piece;
          o.record_trajectory = false;
          ReplicationReport rep;
          {
            py::gil_scoped_release release;
            rep = replicate(s.params, o, replication_seeds(s.seed, s.replications), s.threads);
          }
          py::list runs;
          for (const auto& r : rep.runs) runs.append(summary_dict(r));
          return runs;
        },
        py::arg("scenario"), "Replicated runs; one summary dict per replication.");

  m.def("find_consts",
        [](const Scenario& s, int samples, std::uint64_t seed) {
          lyapunov::SearchOptions o;
          o.samples = samples;
          o.seed = seed;
          o.threads = s.threads;
          lyapunov::SearchResult r;
          {
            py::gil_scoped_release release;
            r = lyapunov::find_consts(s.params, o);
          }
          py::dict d;
          d["found"] = r.found;
          d["consts"] = consts_dict(r.found ? r.consts : r.best);
          d["max_ratio"] = r.found ? r.certificate.max_ratio : r.best_ratio;
          d["samples"] = r.certificate.samples;
          d["tried"] = r.tried;
          d["reason"] = r.reason;
          return d;
        },
        py::arg("scenario"), py::arg("samples") = 10000, py::arg("seed") = 7,
        "Search and certify Lyapunov constants.");

  m.def("branching_moments",
        [](int K, double mu, double gamma, double xi) {
          const auto b = branching_moments(K, mu, gamma, xi);
          py::dict d;
          d["finite"] = b.finite;
          d["m_b"] = b.m_b;
          d["m_f"] = b.m_f;
          d["s"] = b.s;
          py::list g;
          for (int c = 0; c < K; ++c) g.append(b.finite ? b.m_g(c) : std::numeric_limits<double>::infinity());
          d["m_g"] = g;
          return d;
        },
        py::arg("K"), py::arg("mu"), py::arg("gamma"), py::arg("xi"));

  m.def("kingman_bound", &kingman_bound, py::arg("alpha"), py::arg("m1"), py::arg("m2"), py::arg("B"),
        py::arg("eps"));
  m.def("mginfty_bound", &mginfty_bound, py::arg("lam"), py::arg("m"), py::arg("B"), py::arg("eps"));

  m.def("sample_top_layer_z", &sample_top_layer_z, py::arg("K"), py::arg("n"), py::arg("count"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
}
