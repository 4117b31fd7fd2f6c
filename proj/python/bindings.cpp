#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/evaluate.hpp"

namespace py = pybind11;
using namespace rkhawkes;

namespace {

GridSpec make_spec(double omega, std::size_t m, const std::string& criterion, double support, std::size_t basis_size,
                   std::size_t max_iters) {
  GridSpec s;
  s.omega = omega;
  s.m = m;
  s.criterion = parse_criterion(criterion);
  s.support = support;
  s.basis_size = basis_size;
  if (max_iters) s.optim.max_iters = max_iters;
  s.validate();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "ReLU Hawkes process estimation in a Gaussian RKHS";

  static py::exception<Error> base(mod, "Error");
  static py::exception<ConfigError> config(mod, "ConfigError", base.ptr());
  static py::exception<ValidationError> validation(mod, "ValidationError", base.ptr());
  static py::exception<NumericalError> numerical(mod, "NumericalError", base.ptr());
  static py::exception<IoError> io(mod, "IoError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config(e.what());
    } catch (const ValidationError& e) {
      validation(e.what());
    } catch (const NumericalError& e) {
      numerical(e.what());
    } catch (const IoError& e) {
      io(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  py::class_<EventData, std::shared_ptr<EventData>>(mod, "EventData")
      .def(py::init<double, std::vector<std::vector<double>>>(), py::arg("horizon"), py::arg("times"))
      .def_property_readonly("horizon", &EventData::horizon)
      .def_property_readonly("dims", &EventData::dims)
      .def_property_readonly("times", &EventData::all_times)
      .def("count", &EventData::count)
      .def("to_csv", [](const EventData& e) { return events_to_csv(e); })
      .def_static(
          "from_csv",
          [](const std::string& text, std::optional<double> horizon, std::optional<std::size_t> dims) {
            LoadOptions o;
            o.horizon = horizon;
            o.dims = dims;
            return parse_events_csv(text, o);
          },
          py::arg("text"), py::arg("horizon") = py::none(), py::arg("dims") = py::none())
      .def("__eq__", [](const EventData& a, const EventData& b) { return a == b; })
      .def("__repr__", [](const EventData& e) {
        return "EventData(dims=" + std::to_string(e.dims()) + ", horizon=" + std::to_string(e.horizon()) +
               ", events=" + std::to_string(e.total_count()) + ")";
      });

  py::class_<FittedModel>(mod, "FittedModel")
      .def_property_readonly("method", [](const FittedModel& f) { return to_string(f.method); })
      .def_readonly("gamma", &FittedModel::gamma)
      .def_readonly("eta", &FittedModel::eta)
      .def_readonly("objective", &FittedModel::objective)
      .def_readonly("iterations", &FittedModel::iterations)
      .def_readonly("json", &FittedModel::json)
      .def_property_readonly("dims", [](const FittedModel& f) { return f.model->dims(); })
      .def_property_readonly("support", [](const FittedModel& f) { return f.model->support(); })
      .def("baseline", [](const FittedModel& f, std::size_t j) { return f.model->baseline(j); })
      .def("interaction",
           [](const FittedModel& f, std::size_t j, std::size_t l, double lag) { return f.model->interaction(j, l, lag); });

  mod.def("builtin_model_names", &builtin_model_names);

  mod.def(
      "simulate",
      [](const std::string& model, double horizon, std::uint64_t seed, double burn_in) {
        const GroundTruthModel truth = resolve_ground_truth(model);
        py::gil_scoped_release nogil;
        return simulate_thinning(truth, SimulationOptions{horizon, burn_in, seed});
      },
      py::arg("model"), py::arg("horizon"), py::arg("seed") = 0, py::arg("burn_in") = -1.0);

  mod.def(
      "fit",
      [](const EventData& events, const std::string& method, double gamma, double eta, double omega, std::size_t m,
         const std::string& criterion, double support, std::size_t basis_size, std::size_t max_iters) {
        const GridSpec spec = make_spec(omega, m, criterion, support, basis_size, max_iters);
        const Method meth = parse_method(method);
        auto ev = std::make_shared<const EventData>(events);
        py::gil_scoped_release nogil;
        return fit_method(meth, ev, gamma, eta, spec);
      },
      py::arg("events"), py::arg("method") = "rkhs", py::arg("gamma") = 10.0, py::arg("eta") = 1.0,
      py::arg("omega") = 100.0, py::arg("m") = 0, py::arg("criterion") = "mle", py::arg("support") = 5.0,
      py::arg("basis_size") = 10, py::arg("max_iters") = 0);

  mod.def("load_model", &load_fitted_model, py::arg("json_text"));

  mod.def(
      "score",
      [](const FittedModel& model, const EventData& events, std::size_t m_score) {
        const Score s = score_model(model, events, m_score);
        return py::make_tuple(s.log_likelihood, s.floored);
      },
      py::arg("model"), py::arg("events"), py::arg("m_score") = 0);

  mod.def(
      "l1_error_matrix",
      [](const std::string& truth, const FittedModel& model, std::size_t points) {
        return l1_error_matrix(resolve_ground_truth(truth), *model.model, points);
      },
      py::arg("truth"), py::arg("model"), py::arg("points") = 2001);
}
