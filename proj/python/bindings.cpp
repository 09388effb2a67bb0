#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qalloc/allocation.hpp"
#include "qalloc/bell.hpp"
#include "qalloc/equitability.hpp"
#include "qalloc/incompatibility.hpp"

namespace py = pybind11;
using namespace qalloc;

namespace {

using EdgeValues = std::vector<std::pair<Edge, double>>;

AllocationList to_allocation(const EdgeValues& items) {
  std::vector<AllocationEntry> entries;
  for (const auto& [e, v] : items) entries.push_back({e, v});
  return AllocationList(std::move(entries));
}

EdgeValues from_allocation(const AllocationList& alloc) {
  EdgeValues out;
  for (const auto& e : alloc.entries()) out.emplace_back(e.edge, e.value);
  return out;
}

Assembly assembly_from_lists(const std::vector<std::vector<Matrix>>& povms) {
  std::vector<Povm> members;
  for (const auto& els : povms) members.emplace_back(els);
  return Assembly(std::move(members));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qalloc C++ core";

  static py::exception<Error> error(m, "QallocError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Hypergraph>(m, "Hypergraph")
      .def(py::init<>())
      .def(py::init([](std::vector<std::string> v, std::vector<Edge> e) {
             return Hypergraph{std::move(v), std::move(e)};
           }),
           py::arg("vertices"), py::arg("edges"))
      .def_readwrite("vertices", &Hypergraph::vertices)
      .def_readwrite("edges", &Hypergraph::edges);

  m.def(
      "hypergraph",
      [](const std::string& name) {
        if (name == "H1") return hypergraph_h1();
        if (name == "H2") return hypergraph_h2();
        if (name == "H3") return hypergraph_h3();
        throw py::value_error("expected H1, H2 or H3");
      },
      py::arg("name"));

  m.def(
      "theorem1_allocation",
      [](const Hypergraph& h, std::size_t d) { return from_allocation(theorem1_allocation(h, d)); },
      py::arg("hypergraph"), py::arg("d"), "Per-edge optimal product-MUB robustness as (edge, value) pairs.");
  m.def(
      "performance_fairness", [](const EdgeValues& a) { return performance_fairness(to_allocation(a)); },
      py::arg("allocation"));
  m.def(
      "performance_reliability",
      [](const EdgeValues& a, const Priors& p) { return performance_reliability(to_allocation(a), p); },
      py::arg("allocation"), py::arg("priors"));
  m.def("edge_prior", &edge_prior, py::arg("priors"), py::arg("edge"), py::arg("vertices"));

  py::class_<Assembly>(m, "Assembly")
      .def(py::init(&assembly_from_lists), py::arg("povms"))
      .def_property_readonly("dim", &Assembly::dim)
      .def_property_readonly("settings", &Assembly::settings)
      .def("povms", [](const Assembly& a) {
        std::vector<std::vector<Matrix>> out;
        for (const auto& p : a.povms()) out.push_back(p.elements());
        return out;
      });

  m.def("mub_pair_assembly", &mub_pair_assembly, py::arg("d"));
  m.def(
      "product_mub_assembly",
      [](std::size_t sites, std::size_t d, std::optional<std::vector<std::size_t>> keep) {
        ProductAssembly pa = product_assembly(sites, d);
        if (keep) pa = reduce_assembly(pa, *keep);
        return pa.expand();
      },
      py::arg("sites"), py::arg("d"), py::arg("keep") = py::none());
  m.def(
      "fourier_basis",
      [](std::size_t d) {
        std::vector<CVector> out;
        for (const auto& k : fourier_basis(d)) out.push_back(k.amplitudes());
        return out;
      },
      py::arg("d"));
  m.def("depolarize", &depolarize, py::arg("assembly"), py::arg("eta"));

  py::class_<RobustnessResult>(m, "RobustnessResult")
      .def_readonly("value", &RobustnessResult::value)
      .def_readonly("lo", &RobustnessResult::lo)
      .def_readonly("hi", &RobustnessResult::hi)
      .def_readonly("probes", &RobustnessResult::probes)
      .def_property_readonly("certificate_residual",
                             [](const RobustnessResult& r) { return r.certificate.residual; });

  m.def(
      "generalized_robustness",
      [](const Assembly& a, double bracket_tol, double tol, double s_max) {
        RobustnessOptions o;
        o.bracket_tol = bracket_tol;
        o.feasibility.tol = tol;
        o.s_max = s_max;
        py::gil_scoped_release release;
        return generalized_robustness(a, o);
      },
      py::arg("assembly"), py::arg("bracket_tol") = 1e-6, py::arg("tol") = 1e-8, py::arg("s_max") = 4.0);
  m.def(
      "joint_measurability_feasible",
      [](const Assembly& a, double tol) {
        FeasibilityOptions o;
        o.tol = tol;
        py::gil_scoped_release release;
        return joint_measurability_feasible(a, o).feasible;
      },
      py::arg("assembly"), py::arg("tol") = 1e-8);
  m.def("closed_form_mub_robustness", &closed_form_mub_robustness, py::arg("D"));

  py::class_<KnapsackProblem>(m, "KnapsackProblem")
      .def(py::init([](const std::vector<std::tuple<std::string, double, double>>& vars,
                       const std::vector<std::tuple<std::map<std::string, double>, double, std::string>>& cons,
                       std::vector<std::vector<std::string>> groups) {
             KnapsackProblem p;
             for (const auto& [id, lo, hi] : vars) p.variables.push_back({id, lo, hi});
             for (const auto& [coef, budget, label] : cons) p.constraints.push_back({coef, budget, label});
             p.exclusivity_groups = std::move(groups);
             p.validate();
             return p;
           }),
           py::arg("variables"), py::arg("constraints") = py::list(),
           py::arg("exclusivity_groups") = py::list(),
           "variables: (id, lower, upper); constraints: (coefficients, budget, label).")
      .def_property_readonly("variable_ids", [](const KnapsackProblem& p) {
        std::vector<std::string> ids;
        for (const auto& v : p.variables) ids.push_back(v.id);
        return ids;
      });

  py::class_<EquitableSolution>(m, "EquitableSolution")
      .def_property_readonly("values",
                             [](const EquitableSolution& s) {
                               return std::map<std::string, double>(s.values.begin(), s.values.end());
                             })
      .def_readonly("elimination_order", &EquitableSolution::elimination_order)
      .def_readonly("stage_values", &EquitableSolution::stage_values)
      .def_readonly("active", &EquitableSolution::active);

  m.def(
      "lexicographic_maxmin", [](const KnapsackProblem& p) { return lexicographic_maxmin(p).solutions; },
      py::arg("problem"), "All lexicographically optimal solutions; the first is preferred.");
  m.def("monogamy_problem", &monogamy_problem, py::arg("lam"), py::arg("nu1") = kDefaultNu1,
        py::arg("nu2") = kDefaultNu2);
  m.def("exclusivity_problem", &exclusivity_problem, py::arg("gap_n"), py::arg("gap_m"));

  m.def("operator_identity_residual", &operator_identity_residual, py::arg("a1"), py::arg("a2"),
        py::arg("a3"), py::arg("b1"), py::arg("b4"), py::arg("b6"));
  m.def(
      "verify_operator_identity",
      [](std::uint64_t seed, std::size_t trials) {
        const IdentityReport r = verify_operator_identity(seed, trials);
        return py::dict(py::arg("max_residual") = r.max_residual,
                        py::arg("mean_residual") = r.mean_residual, py::arg("residuals") = r.residuals);
      },
      py::arg("seed") = 0, py::arg("trials") = 100);
}
