// Python bindings for the structure-weighted conformal pipeline: synthetic
// generators, dataset and prior I/O, single and multi-seed pipeline runs,
// the experiment drivers, and the core conformal primitives. Reports cross
// the boundary as plain dicts/lists mirroring the JSON report schema.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swconformal/conformal.hpp"
#include "swconformal/dataset.hpp"
#include "swconformal/experiments.hpp"
#include "swconformal/pipeline.hpp"
#include "swconformal/prior.hpp"

namespace py = pybind11;
using namespace swc;

namespace {

py::object json_to_py(const nlohmann::ordered_json& j) {
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::null:
      return py::none();
    case nlohmann::ordered_json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::ordered_json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::ordered_json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::ordered_json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::ordered_json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::ordered_json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::ordered_json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

nlohmann::json py_to_json(const py::handle& h) {
  if (h.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
  if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
  if (py::isinstance<py::float_>(h)) return h.cast<double>();
  if (py::isinstance<py::str>(h)) return h.cast<std::string>();
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& item : h) out.push_back(py_to_json(item));
    return out;
  }
  if (py::isinstance<py::dict>(h)) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& item : h.cast<py::dict>()) {
      out[item.first.cast<std::string>()] = py_to_json(item.second);
    }
    return out;
  }
  throw std::invalid_argument("config values must be None, bool, int, float, str, list, or dict");
}

RunConfig config_from_obj(const py::object& obj) {
  if (obj.is_none()) return RunConfig{};
  return RunConfig::from_json(py_to_json(obj));
}

std::string status_name(TemporalStatus s) {
  switch (s) {
    case TemporalStatus::pre_treatment:
      return "pre_treatment";
    case TemporalStatus::treatment:
      return "treatment";
    case TemporalStatus::outcome:
      return "outcome";
    default:
      return "post_treatment";
  }
}

std::vector<std::string> dataset_names(const Dataset& data) {
  std::vector<std::string> out;
  for (const auto& m : data.meta) out.push_back(m.name);
  return out;
}

}  // namespace

PYBIND11_MODULE(_swconformal, m) {
  m.doc() =
      "Structure-weighted conformal treatment-effect intervals: synthetic "
      "generators, pipeline runs, experiment drivers, and conformal primitives";

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readonly("x", &Dataset::x)
      .def_readonly("t", &Dataset::t)
      .def_readonly("y", &Dataset::y)
      .def_readonly("true_cate", &Dataset::true_cate)
      .def_readonly("description", &Dataset::description)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("d", &Dataset::d)
      .def_property_readonly("names", &dataset_names)
      .def_property_readonly("statuses",
                             [](const Dataset& data) {
                               std::vector<std::string> out;
                               for (const auto& meta : data.meta) out.push_back(status_name(meta.status));
                               return out;
                             })
      .def("__repr__", [](const Dataset& data) {
        return "<Dataset n=" + std::to_string(data.n()) + " d=" + std::to_string(data.d()) + ">";
      });

  py::class_<EdgePrior>(m, "EdgePrior")
      .def(py::init<>())
      .def("set", &EdgePrior::set, py::arg("u"), py::arg("v"), py::arg("p"))
      .def("get", &EdgePrior::get, py::arg("u"), py::arg("v"))
      .def_property_readonly("edges",
                             [](const EdgePrior& prior) {
                               py::dict out;
                               for (const auto& [pair, p] : prior.probs) {
                                 out[py::str(pair.first + "->" + pair.second)] = p;
                               }
                               return out;
                             })
      .def("__repr__", [](const EdgePrior& prior) {
        return "<EdgePrior " + std::to_string(prior.probs.size()) + " listed pairs>";
      });

  m.def("uniform_prior", [] { return EdgePrior{}; },
        "Prior that returns 0.5 for every directed pair");

  m.def("gen_synthetic_scm", &gen_synthetic_scm, py::arg("n"), py::arg("seed"),
        "Synthetic confounded dataset with known true CATE");
  m.def("inject_collider", &inject_collider, py::arg("data"), py::arg("seed"),
        "Copy of a dataset with an added post-treatment collider column X_col");
  m.def("load_dataset", &load_dataset, py::arg("csv_path"), py::arg("meta_path"));
  m.def("save_dataset", &save_dataset, py::arg("data"), py::arg("csv_path"), py::arg("meta_path"));

  m.def("load_prior",
        [](const std::string& path, const Dataset& data) {
          return load_edge_prior(path, dataset_names(data));
        },
        py::arg("path"), py::arg("data"));
  m.def("save_prior", &save_edge_prior, py::arg("prior"), py::arg("path"));
  m.def("scm_oracle_prior",
        [](const Dataset& data, bool inverted, double p_true, double p_false) {
          return scm_oracle_prior(data.meta, inverted, p_true, p_false);
        },
        py::arg("data"), py::arg("inverted") = false, py::arg("p_true") = 0.98,
        py::arg("p_false") = 0.02,
        "Edge prior encoding the synthetic generator's true structure");

  m.def("run_pipeline",
        [](const py::object& config, const Dataset& data, const EdgePrior& prior) {
          return json_to_py(run_pipeline(config_from_obj(config), data, prior).to_json());
        },
        py::arg("config"), py::arg("data"), py::arg("prior"),
        "Run the full pipeline; config is a dict of overrides (or None for defaults)");
  m.def("multi_seed_report",
        [](const py::object& config, const Dataset& data, const EdgePrior& prior,
           const std::vector<std::uint64_t>& seeds) {
          return json_to_py(multi_seed_report(config_from_obj(config), data, prior, seeds));
        },
        py::arg("config"), py::arg("data"), py::arg("prior"), py::arg("seeds"));
  m.def("dump_ensemble",
        [](const py::object& config, const Dataset& data, const EdgePrior& prior) {
          return json_to_py(dump_ensemble(config_from_obj(config), data, prior));
        },
        py::arg("config"), py::arg("data"), py::arg("prior"));

  m.def("run_collider_stress",
        [](const py::object& config, int n, const std::vector<std::uint64_t>& seeds) {
          return json_to_py(run_collider_stress(config_from_obj(config), n, seeds));
        },
        py::arg("config"), py::arg("n"), py::arg("seeds"));
  m.def("run_washout",
        [](const py::object& config, const std::vector<int>& n_list,
           const std::vector<std::uint64_t>& seeds) {
          return json_to_py(run_washout(config_from_obj(config), n_list, seeds));
        },
        py::arg("config"), py::arg("n_list"), py::arg("seeds"));
  m.def("run_calibration_sweep",
        [](const py::object& config, int n, const std::vector<double>& alphas) {
          return json_to_py(run_calibration_sweep(config_from_obj(config), n, alphas));
        },
        py::arg("config"), py::arg("n"), py::arg("alphas"));
  m.def("run_k_sweep",
        [](const py::object& config, int n, const std::vector<int>& k_list,
           const std::vector<std::uint64_t>& seeds) {
          return json_to_py(run_k_sweep(config_from_obj(config), n, k_list, seeds));
        },
        py::arg("config"), py::arg("n"), py::arg("k_list"), py::arg("seeds"));

  m.def("composite_score", &composite_score, py::arg("gamma"), py::arg("q_low"), py::arg("q_high"),
        "max(q_low - gamma, gamma - q_high)");
  m.def("conformal_quantile",
        [](std::vector<double> scores, double alpha, const std::string& rule) {
          QuantileRule qr;
          if (rule == "sentinel") {
            qr = QuantileRule::sentinel;
          } else if (rule == "capped") {
            qr = QuantileRule::capped;
          } else {
            throw std::invalid_argument("rule must be sentinel or capped");
          }
          const ConformalQuantile q = conformal_quantile(std::move(scores), alpha, qr);
          py::dict out;
          out["value"] = q.infinite ? py::object(py::none()) : py::object(py::float_(q.value));
          out["infinite"] = q.infinite;
          out["m"] = q.m;
          out["n_cal"] = q.n_cal;
          return out;
        },
        py::arg("scores"), py::arg("alpha"), py::arg("rule") = "sentinel",
        "Finite-sample calibration quantile; value is None for the +infinity sentinel");

  m.attr("__version__") = "0.1.0";
}
