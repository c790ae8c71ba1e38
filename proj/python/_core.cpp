#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "bench/connect4.hpp"
#include "plb/bench.hpp"
#include "plb/bridge.hpp"
#include "plb/error.hpp"
#include "plb/reader.hpp"

namespace py = pybind11;
using namespace plb;

namespace {

// Owns a Python object stored in an OpaqueObject. The deleter type also marks
// the pointer as ours when converting back.
struct PyObjectDeleter {
  void operator()(const void* p) const {
    py::gil_scoped_acquire gil;
    delete static_cast<const py::object*>(p);
  }
};

// A foreign host object that did not come from Python.
struct HostObject {
  OpaqueObject obj;
};

py::handle g_record_type;

HostValue to_host(py::handle h);

HostValue seq_to_host(py::handle h) {
  Sequence out;
  for (py::handle item : h) out.push_back(to_host(item));
  return out;
}

HostValue to_host(py::handle h) {
  if (py::isinstance<py::bool_>(h)) return symbol(h.cast<bool>() ? "true" : "false");
  if (py::isinstance<py::int_>(h)) return HostValue(h.cast<std::int64_t>());
  if (py::isinstance<py::float_>(h)) return HostValue(h.cast<double>());
  if (py::isinstance<py::str>(h)) return symbol(h.cast<std::string>());
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) return seq_to_host(h);
  if (py::isinstance<OpaqueTerm>(h)) return HostValue(h.cast<OpaqueTerm>());
  if (py::isinstance<HostObject>(h)) return HostValue(h.cast<HostObject>().obj);
  if (g_record_type && py::isinstance(h, g_record_type)) {
    std::vector<HostValue> fields;
    for (py::handle f : h.attr("fields")) fields.push_back(to_host(f));
    return record(h.attr("name").cast<std::string>(), std::move(fields));
  }
  auto* held = new py::object(py::reinterpret_borrow<py::object>(h));
  return HostValue(OpaqueObject{std::shared_ptr<const void>(held, PyObjectDeleter{})});
}

py::object to_py(const HostValue& v) {
  return std::visit(
      [](const auto& x) -> py::object {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return py::int_(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return py::float_(x);
        } else if constexpr (std::is_same_v<T, Symbol>) {
          return py::str(x.name);
        } else if constexpr (std::is_same_v<T, Sequence>) {
          py::list out;
          for (const auto& e : x) out.append(to_py(e));
          return std::move(out);
        } else if constexpr (std::is_same_v<T, Record>) {
          py::tuple fields(x.fields.size());
          for (std::size_t i = 0; i < x.fields.size(); ++i) fields[i] = to_py(x.fields[i]);
          return g_record_type(x.name, *fields);
        } else if constexpr (std::is_same_v<T, OpaqueObject>) {
          if (std::get_deleter<PyObjectDeleter>(x.ptr)) return *static_cast<const py::object*>(x.ptr.get());
          return py::cast(HostObject{x});
        } else {
          return py::cast(x);
        }
      },
      v.storage());
}

Bindings to_bindings(const py::dict& d) {
  Bindings out;
  for (auto [k, v] : d) out.emplace_back(k.cast<std::string>(), to_host(v));
  return out;
}

py::dict to_dict(const Solution& s) {
  py::dict d;
  for (const auto& [name, value] : s.bindings) d[py::str(name)] = to_py(value);
  return d;
}

std::optional<ConversionPolicy> policy_arg(std::optional<bool> nc) {
  if (!nc) return std::nullopt;
  return *nc ? ConversionPolicy::nc() : ConversionPolicy::deep();
}

py::dict result_dict(const BenchResult& r) {
  py::dict d;
  d["name"] = std::string(to_string(r.spec.name));
  d["variant"] = std::string(to_string(r.spec.variant));
  d["scale"] = r.spec.scale;
  d["samples"] = r.samples;
  d["mean"] = r.summary.mean;
  d["ci"] = r.summary.ci;
  d["result"] = to_py(r.result);
  py::list steps, crossings;
  for (const auto& s : r.stats) {
    steps.append(s.steps);
    crossings.append(s.crossings);
  }
  d["steps"] = steps;
  d["crossings"] = crossings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Embeddable Prolog engine with a host bridge and benchmark harness";

  static py::exception<PrologError> prolog_error(m, "PrologError");
  static py::exception<BoundaryError> boundary_error(m, "BoundaryError", prolog_error.ptr());
  static py::exception<BenchmarkError> benchmark_error(m, "BenchmarkError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    auto raise = [](py::handle type, const PrologError& e, const char* goal) {
      py::object exc = type(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("line") = e.pos().line;
      exc.attr("column") = e.pos().column;
      exc.attr("goal") = goal ? py::object(py::str(goal)) : py::object(py::none());
      PyErr_SetObject(type.ptr(), exc.ptr());
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const BoundaryError& e) {
      raise(boundary_error, e, e.goal().c_str());
    } catch (const PrologError& e) {
      raise(prolog_error, e, nullptr);
    } catch (const BenchmarkError& e) {
      py::set_error(benchmark_error, e.what());
    }
  });

  py::class_<HostObject>(m, "HostObject", "A host object created outside Python");

  py::class_<OpaqueTerm>(m, "OpaqueTerm", "Reference to an engine term; equality is identity")
      .def_property_readonly("is_var", &OpaqueTerm::is_var)
      .def_property_readonly("is_compound", &OpaqueTerm::is_compound)
      .def_property_readonly("functor", &OpaqueTerm::functor)
      .def_property_readonly("arity", &OpaqueTerm::arity)
      .def("arg", [](const OpaqueTerm& t, std::size_t i) { return to_py(t.arg(i)); })
      .def("materialize", [](const OpaqueTerm& t) { return to_py(t.materialize()); })
      .def("__str__", &OpaqueTerm::to_string)
      .def("__repr__", [](const OpaqueTerm& t) { return "<OpaqueTerm " + t.to_string() + ">"; })
      .def("__eq__", [](const OpaqueTerm& a, py::object b) {
        return py::isinstance<OpaqueTerm>(b) && a == b.cast<OpaqueTerm>();
      })
      .def("__hash__", [](const OpaqueTerm& t) { return std::hash<const void*>{}(t.source().get()); });

  py::class_<SolutionCursor>(m, "Cursor", "Lazy answers of one query; one crossing per pull")
      .def("__iter__", [](SolutionCursor& c) -> SolutionCursor& { return c; })
      .def("__next__",
           [](SolutionCursor& c) {
             auto s = c.next();
             if (!s) throw py::stop_iteration();
             return to_dict(*s);
           })
      .def("next",
           [](SolutionCursor& c) -> py::object {
             auto s = c.next();
             return s ? py::object(to_dict(*s)) : py::object(py::none());
           })
      .def_property_readonly("variables", &SolutionCursor::variables)
      .def_property_readonly("state", [](const SolutionCursor& c) {
        switch (c.state()) {
          case SolutionCursor::State::Fresh: return "fresh";
          case SolutionCursor::State::Yielded: return "yielded";
          case SolutionCursor::State::Done: return "done";
        }
        return "?";
      });

  py::class_<Engine>(m, "Engine", "A consulted program with its handle registry and crossing counter")
      .def(py::init([](const std::string& program, bool nc, bool indexing, bool unknown_fails,
                       std::uint64_t step_budget) {
             EngineOptions o;
             o.indexing = indexing;
             o.unknown_fails = unknown_fails;
             o.step_budget = step_budget;
             return Engine(program, nc ? ConversionPolicy::nc() : ConversionPolicy::deep(), o);
           }),
           py::arg("program"), py::kw_only(), py::arg("nc") = false, py::arg("indexing") = true,
           py::arg("unknown_fails") = false, py::arg("step_budget") = EngineOptions{}.step_budget)
      .def(
          "query",
          [](const Engine& e, const std::string& goal, const py::dict& inputs, std::optional<bool> nc) {
            return e.query(goal, to_bindings(inputs), policy_arg(nc));
          },
          py::arg("goal"), py::arg("inputs") = py::dict(), py::kw_only(), py::arg("nc") = py::none())
      .def(
          "query_once",
          [](const Engine& e, const std::string& goal, const py::dict& inputs, std::optional<bool> nc) -> py::object {
            auto s = e.query_once(goal, to_bindings(inputs), policy_arg(nc));
            return s ? py::object(to_dict(*s)) : py::object(py::none());
          },
          py::arg("goal"), py::arg("inputs") = py::dict(), py::kw_only(), py::arg("nc") = py::none())
      .def("make_term", [](const Engine& e, py::handle v) { return e.make_term(to_host(v)); })
      .def_property_readonly("crossings", &Engine::crossings)
      .def("reset_crossings", &Engine::reset_crossings)
      .def_property_readonly("live_handles", &Engine::live_handles)
      .def_property_readonly("handle_capacity", &Engine::handle_capacity)
      .def_property_readonly("nc", [](const Engine& e) { return e.default_policy() == ConversionPolicy::nc(); });

  m.def("quote_atom", [](const std::string& s) { return quote_atom_if_needed(s); });
  m.def("_set_record_type", [](py::object t) {
    t.inc_ref();  // lives for the interpreter's lifetime
    g_record_type = t;
  });

  // Benchmark harness, in process.
  m.def("fixture", [](const std::string& name) { return std::string(fixture(name)); });
  m.def(
      "run_benchmark",
      [](const std::string& name, const std::string& variant, std::optional<std::int64_t> scale, int iterations,
         int warmups, bool indexing) {
        Benchmark b = parse_benchmark(name);
        BenchmarkSpec spec{b, parse_variant(variant), scale.value_or(default_scale(b)), iterations, warmups,
                           indexing};
        BenchResult r;
        {
          py::gil_scoped_release release;
          r = run_benchmark(spec);
        }
        return result_dict(r);
      },
      py::arg("name"), py::arg("variant"), py::arg("scale") = py::none(), py::arg("iterations") = 30,
      py::arg("warmups") = 3, py::arg("indexing") = true);
  m.def(
      "bench",
      [](const std::string& suite, std::vector<std::string> variants, std::optional<std::int64_t> scale,
         int iterations, int warmups, bool indexing, const std::string& format) {
        SuiteOptions o;
        o.suite = parse_suite(suite);
        for (const auto& v : variants) o.variants.push_back(parse_variant(v));
        o.scale = scale;
        o.iterations = iterations;
        o.warmups = warmups;
        o.indexing = indexing;
        if (format != "plain" && format != "latex") throw std::invalid_argument("format must be plain or latex");
        std::string out;
        py::gil_scoped_release release;
        auto results = run_suite(o);
        for (const auto& t : build_tables(o.suite, {{indexing ? "plb" : "plb no-index", std::move(results)}})) {
          out += emit_table(t, format == "latex" ? TableFormat::Latex : TableFormat::Plain) + "\n";
        }
        return out;
      },
      py::arg("suite") = "micro", py::arg("variants") = std::vector<std::string>{}, py::arg("scale") = py::none(),
      py::arg("iterations") = 30, py::arg("warmups") = 3, py::arg("indexing") = true, py::arg("format") = "plain");
  m.def("check_kernels", [](std::optional<std::int64_t> scale) {
    py::list out;
    for (const auto& c : check_kernels(scale)) {
      out.append(py::make_tuple(std::string(to_string(c.name)), std::string(to_string(c.variant)), c.ok, c.message));
    }
    return out;
  }, py::arg("scale") = py::none());
  m.def("connect4_checksum", [](int plies, int depth) { return c4::self_play(plies, depth).checksum; });
  m.attr("CONNECT4_DEPTH") = kConnect4Depth;
  m.attr("LIST_SIZE") = kListSize;

  m.def("format_absolute", [](double mean, double ci) { return format_absolute({mean, ci}); });
  m.def("format_ratio", [](double value, double ci) { return format_ratio({value, ci, false}); });
  m.def("summarize", [](std::vector<double> samples, double confidence) {
    Summary s = summarize(samples, confidence);
    return py::make_tuple(s.mean, s.ci);
  }, py::arg("samples"), py::arg("confidence") = 0.99);
}
