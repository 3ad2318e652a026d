#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nterm/asymptotics.hpp"
#include "nterm/lattice.hpp"
#include "nterm/oracle.hpp"
#include "nterm/widths.hpp"

namespace py = pybind11;
using namespace nterm;

namespace {

py::tuple as_tuple(const CertifiedValue& v) { return py::make_tuple(v.lo, v.hi); }

}  // namespace

PYBIND11_MODULE(_nterm, m) {
  m.doc() = "Best n-term widths of diagonal operators";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<ToleranceUnreachable>(m, "ToleranceUnreachable", PyExc_ArithmeticError);
  py::register_exception<ScanBudgetExceeded>(m, "ScanBudgetExceeded", PyExc_RuntimeError);

  py::class_<SequenceSource, std::shared_ptr<SequenceSource>>(m, "Sequence")
      .def("term", &SequenceSource::term, py::arg("n"))
      .def("log_term", &SequenceSource::log_term, py::arg("n"))
      .def("tail_pow_sum",
           [](const SequenceSource& s, Index n, double e, double tol) { return as_tuple(s.tail_pow_sum(n, e, tol)); },
           py::arg("n"), py::arg("e"), py::arg("tol") = 1e-10)
      .def_property_readonly("name", &SequenceSource::name)
      .def("__repr__", [](const SequenceSource& s) { return "<Sequence " + s.name() + ">"; });

  auto unconst = [](SourcePtr p) { return std::const_pointer_cast<SequenceSource>(p); };
  m.def("power_log", [=](double s, double beta, double c) { return unconst(make_power_log(s, beta, c)); },
        py::arg("s"), py::arg("beta") = 0.0, py::arg("c") = 1.0);
  m.def("geometric", [=](double ratio, double c) { return unconst(make_geometric(ratio, c)); }, py::arg("ratio"),
        py::arg("c") = 1.0);
  m.def("finite", [=](std::vector<double> values, double tail) { return unconst(make_finite(std::move(values), tail)); },
        py::arg("values"), py::arg("tail"));

  py::class_<WeightFamily>(m, "WeightFamily")
      .def_static("mixed", &WeightFamily::mixed, py::arg("s"), py::arg("r"), py::arg("d"))
      .def_static("energy", &WeightFamily::energy, py::arg("s"), py::arg("d"))
      .def("weight", [](const WeightFamily& f, const std::vector<Index>& k) { return f.weight(k); })
      .def("count_leq", &WeightFamily::count_leq)
      .def("nth_smallest_weight", &WeightFamily::nth_smallest_weight)
      .def("stream",
           [](const WeightFamily& f, Index count) {
             RearrangementStream st(f);
             std::vector<std::pair<double, Point>> out;
             for (Index i = 0; i < count; ++i) {
               auto e = st.next();
               out.emplace_back(e.weight, std::move(e.point));
             }
             return out;
           },
           py::arg("count"))
      .def_property_readonly("name", &WeightFamily::name);
  m.def("rearranged", [=](const WeightFamily& f) { return unconst(rearranged_source(f)); });

  m.def("sigma",
        [](double p, double q, std::shared_ptr<SequenceSource> src, Index n, double tol) {
          const WidthResult r = sigma_exact({p, q, src}, n, tol);
          py::dict d;
          d["lo"] = r.value.lo;
          d["hi"] = r.value.hi;
          d["regime"] = regime_tag(r.regime);
          d["achiever"] = r.achiever ? py::cast(*r.achiever) : py::none();
          return d;
        },
        py::arg("p"), py::arg("q"), py::arg("source"), py::arg("n"), py::arg("tol") = 1e-10);
  m.def("sigma_finite", &sigma_finite, py::arg("p"), py::arg("q"), py::arg("prefix"), py::arg("n"));
  m.def("find_nstar", [](double p, double q, std::shared_ptr<SequenceSource> s, Index n) {
    return find_nstar({p, q, s}, n);
  });
  m.def("find_nlowerstar", [](double p, double q, std::shared_ptr<SequenceSource> s, Index n) {
    return find_nlowerstar({p, q, s}, n);
  });

  m.def("predicted_constant",
        [](double p, double q, double s, double beta, double c) { return predicted_constant(p, q, {s, beta, c}); },
        py::arg("p"), py::arg("q"), py::arg("s"), py::arg("beta") = 0.0, py::arg("c") = 1.0);
  m.def("mix_reference_constant", &mix_reference_constant);
  m.def("energy_S", [](double s, double tol) { return as_tuple(energy_S(s, tol)); }, py::arg("s"),
        py::arg("tol") = 1e-10);
  m.def("specialized_constant",
        [](const std::string& tag, double s, int d, double tol) {
          return as_tuple(specialized_constant(parse_tag(tag), s, d, tol));
        },
        py::arg("tag"), py::arg("s"), py::arg("d"), py::arg("tol") = 1e-10);

  m.def("best_n_term_error", &best_n_term_error, py::arg("lam"), py::arg("xi"), py::arg("n"), py::arg("q"));
  m.def("extremal_vector", [](const std::vector<double>& lam, Index k, double p) { return extremal_vector(lam, k, p).xi; });
  m.def("sample_ball",
        [](Index size, double p, Index count, std::uint64_t seed) {
          std::vector<std::vector<double>> out;
          for (auto& b : sample_ball(size, p, count, seed)) out.push_back(std::move(b.xi));
          return out;
        },
        py::arg("m"), py::arg("p"), py::arg("count"), py::arg("seed"));
  m.def("maximize_small",
        [](double p, double q, const std::vector<double>& lam, Index n, int restarts, std::uint64_t seed) {
          const OptimizerResult r = maximize_small(p, q, lam, n, restarts, seed);
          return py::make_tuple(r.value, r.witness.xi);
        },
        py::arg("p"), py::arg("q"), py::arg("lam"), py::arg("n"), py::arg("restarts") = 64, py::arg("seed") = 7);
}
