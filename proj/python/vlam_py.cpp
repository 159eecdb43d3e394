#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "vlam/deduction.hpp"
#include "vlam/error.hpp"
#include "vlam/models.hpp"
#include "vlam/typecheck.hpp"
#include "vlam/vcat.hpp"

namespace py = pybind11;
using namespace vlam;

namespace {

SearchBudget budget(int depth, std::size_t steps) {
  SearchBudget b;
  b.max_depth = depth;
  b.max_rewrite_steps = steps;
  return b;
}

Derivation judgement(const Theory& t, const std::string& text) {
  ParsedJudgement j = parse_judgement(text, t.parse_options());
  return j.type ? check(t.signature, j.context, j.term, *j.type) : infer(t.signature, j.context, j.term);
}

py::dict check_result(const CheckResult& r) {
  py::dict d;
  d["proved"] = r.proved;
  d["nodes"] = r.nodes;
  d["trace"] = r.trace ? py::cast(trace_to_string(*r.trace)) : py::none();
  return d;
}

py::dict bound_result(const BoundResult& r) {
  py::dict d;
  d["label"] = r.label;
  d["nodes"] = r.nodes;
  d["truncated"] = r.truncated;
  d["trace"] = r.trace ? py::cast(trace_to_string(*r.trace)) : py::none();
  return d;
}

std::vector<std::vector<std::string>> rows_of(const FinVCat& c) {
  std::vector<std::vector<std::string>> rows(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) rows[i].push_back(c.at(i, j).to_string());
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_vlam, m) {
  m.doc() = "Quantitative equational reasoning for the linear lambda calculus";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SyntaxError>(m, "ParseError", error.ptr());
  py::register_exception<vlam::TypeError>(m, "TypingError", error.ptr());
  py::register_exception<TheoryError>(m, "TheoryError", error.ptr());
  py::register_exception<ReplayError>(m, "ReplayError", error.ptr());
  py::register_exception<LimitExceeded>(m, "LimitExceeded", error.ptr());
  py::register_exception<ModelError>(m, "ModelError", error.ptr());

  py::class_<QuantaleValue>(m, "Value")
      .def_property_readonly("quantale", [](const QuantaleValue& q) { return q.spec().name(); })
      .def("is_top", &QuantaleValue::is_top)
      .def("is_bottom", &QuantaleValue::is_bottom)
      .def("is_infinite", &QuantaleValue::is_infinite)
      .def("__str__", &QuantaleValue::to_string)
      .def("__repr__", [](const QuantaleValue& q) { return "Value(" + q.spec().name() + ", " + q.to_string() + ")"; })
      .def("__eq__", [](const QuantaleValue& a, const QuantaleValue& b) { return a == b; })
      .def("__hash__", [](const QuantaleValue& q) { return py::hash(py::str(q.spec().name() + q.to_string())); });

  py::class_<QuantaleSpec>(m, "Quantale")
      .def(py::init([](const std::string& name) { return QuantaleSpec::from_name(name); }), py::arg("name"))
      .def_property_readonly("name", &QuantaleSpec::name)
      .def_property_readonly("reversed", &QuantaleSpec::reversed)
      .def("top", &QuantaleSpec::top)
      .def("bottom", &QuantaleSpec::bottom)
      .def("unit", &QuantaleSpec::unit)
      .def("value", [](const QuantaleSpec& s, const std::string& text) { return s.parse(text); }, py::arg("text"))
      .def("__eq__", [](const QuantaleSpec& a, const QuantaleSpec& b) { return a == b; })
      .def("__repr__", [](const QuantaleSpec& s) { return "Quantale(" + s.name() + ")"; });

  m.def("tensor", [](const QuantaleValue& a, const QuantaleValue& b) { return tensor(a, b); });
  m.def("join", [](const QuantaleValue& a, const QuantaleValue& b) { return join(a, b); });
  m.def("meet", [](const QuantaleValue& a, const QuantaleValue& b) { return meet(a, b); });
  m.def("implies", &implies);
  m.def("leq", &leq);
  m.def("way_below", &way_below);

  py::class_<Theory>(m, "Theory")
      .def_property_readonly("quantale", [](const Theory& t) { return t.quantale; })
      .def_property_readonly("symmetric", [](const Theory& t) { return t.symmetric; })
      .def_property_readonly("ground_types", [](const Theory& t) { return t.signature.ground_types; })
      .def_property_readonly("operations",
                             [](const Theory& t) {
                               std::vector<std::string> ops;
                               for (const auto& [name, sig] : t.signature.operations) ops.push_back(name);
                               return ops;
                             })
      .def_property_readonly("axioms",
                             [](const Theory& t) {
                               std::vector<std::string> out;
                               for (const auto& a : t.axioms) out.push_back(to_string(a.equation));
                               return out;
                             })
      .def("save", &save_theory);

  m.def("load_theory", py::overload_cast<std::string_view>(&load_theory), py::arg("text"));
  m.def("load_theory_file", &load_theory_file, py::arg("path"));

  m.def(
      "typecheck", [](const Theory& t, const std::string& text) { return judgement(t, text).type.to_string(); },
      py::arg("theory"), py::arg("judgement"), "Type of 'ctx |- term'.");
  m.def(
      "derivation", [](const Theory& t, const std::string& text) { return derivation_to_string(judgement(t, text)); },
      py::arg("theory"), py::arg("judgement"));
  m.def(
      "normalize",
      [](const Theory& t, const std::string& text, std::size_t steps) {
        NormalForm nf = normalize(judgement(t, text).term, steps);
        return py::make_tuple(print_term(nf.term), nf.steps.size(), nf.exhausted);
      },
      py::arg("theory"), py::arg("judgement"), py::arg("steps") = 10000,
      "(normal form, steps taken, budget exhausted) for 'ctx |- term'.");

  py::class_<Prover>(m, "Prover")
      .def(py::init([](const Theory& t, std::size_t steps) { return std::make_unique<Prover>(t, steps); }),
           py::arg("theory"), py::arg("steps") = 10000)
      .def(
          "check",
          [](const Prover& p, const std::string& goal, int depth, std::size_t steps) {
            Goal g = parse_goal(p.theory(), goal);
            if (g.kind == GoalKind::Pair) throw Error("check needs a labelled goal; use bound for '~'");
            if (g.kind == GoalKind::Classical) {
              auto [a, b] = classical_equation(p.theory(), g.context, g.lhs, g.rhs);
              CheckResult r = p.check_eq(a, budget(depth, steps));
              if (!r.proved) return check_result(r);
              CheckResult back = p.check_eq(b, budget(depth, steps));
              back.nodes += r.nodes;
              return check_result(back);
            }
            return check_result(p.check_eq(g.equation(), budget(depth, steps)));
          },
          py::arg("goal"), py::arg("depth") = 6, py::arg("steps") = 10000,
          "Searches for a proof of 'ctx |- v ={q} w', 'v <= w' or 'v = w'.")
      .def(
          "bound",
          [](const Prover& p, const std::string& pair, int depth, std::size_t steps) {
            Goal g = parse_goal(p.theory(), pair);
            return bound_result(p.best_bound(g.context, g.lhs, g.rhs, budget(depth, steps)));
          },
          py::arg("pair"), py::arg("depth") = 6, py::arg("steps") = 10000,
          "Best label found for 'ctx |- v ~ w'.");

  py::class_<Model>(m, "Model")
      .def_property_readonly("backend", [](const Model& mo) { return backend_name(mo.backend()); })
      .def_property_readonly("quantale", &Model::quantale)
      .def(
          "check",
          [](const Model& mo, const Theory& t) {
            ModelReport rep = check_model(mo, t);
            py::list failures;
            for (const auto& c : rep.checks) {
              if (!c.satisfied) failures.append(py::make_tuple(to_string(t.axioms[c.axiom].equation), c.computed));
            }
            py::dict d;
            d["satisfied"] = rep.satisfied();
            d["checked"] = rep.checks.size();
            d["failures"] = failures;
            d["skipped"] = rep.skipped.size();
            d["uninterpreted"] = rep.uninterpreted;
            return d;
          },
          py::arg("theory"), "Checks every axiom the model interprets.")
      .def(
          "distance",
          [](const Model& mo, const Theory& t, const std::string& context, const std::string& v, const std::string& w) {
            auto o = t.parse_options();
            Context c = parse_context(context, o);
            Morphism f = denote(mo, t.signature, c, parse_term(v, o));
            Morphism g = denote(mo, t.signature, c, parse_term(w, o));
            Distance d = mo.backend() == Backend::FinMeas ? Distance::EventSup : Distance::Operator;
            return semantic_distance(mo, f, g, d);
          },
          py::arg("theory"), py::arg("context"), py::arg("v"), py::arg("w"),
          "Distance between the denotations of two terms in a context.")
      .def(
          "eval",
          [](const Model& mo, const Theory& t, const std::string& text) {
            return morphism_to_string(mo, denote(mo, judgement(t, text)));
          },
          py::arg("theory"), py::arg("judgement"));

  m.def("load_model", &load_model, py::arg("text"), py::arg("theory"));
  m.def("load_model_file", &load_model_file, py::arg("path"), py::arg("theory"));

  py::class_<FinVCat, std::shared_ptr<FinVCat>>(m, "VCat")
      .def(py::init([](const QuantaleSpec& q, std::vector<std::string> points,
                       const std::vector<std::vector<std::string>>& rows) {
             if (rows.size() != points.size()) throw Error("one row per point expected");
             std::vector<QuantaleValue> table;
             for (const auto& row : rows) {
               if (row.size() != points.size()) throw Error("one entry per point expected in every row");
               for (const auto& cell : row) table.push_back(q.parse(cell));
             }
             return std::make_shared<FinVCat>(q, std::move(points), std::move(table));
           }),
           py::arg("quantale"), py::arg("points"), py::arg("rows"))
      .def_property_readonly("quantale", &FinVCat::spec)
      .def_property_readonly("points", &FinVCat::carrier)
      .def_property_readonly("rows", &rows_of)
      .def("__len__", &FinVCat::size)
      .def("distance", [](const FinVCat& c, std::size_t x, std::size_t y) { return c.at(x, y); })
      .def("is_separated", [](const FinVCat& c) { return is_separated(c); })
      .def("is_symmetric", [](const FinVCat& c) { return is_symmetric(c); });

  m.def(
      "separated_quotient",
      [](const std::shared_ptr<FinVCat>& c) {
        Quotient q = separated_quotient(c);
        auto out = std::make_shared<FinVCat>(*q.category);
        return py::make_tuple(out, q.classes);
      },
      py::arg("vcat"), "(quotient, classes of original point indices).");
}
