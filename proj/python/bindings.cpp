#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "levy/attack.hpp"
#include "levy/data.hpp"
#include "levy/dump.hpp"
#include "levy/metrics.hpp"
#include "levy/oracle.hpp"
#include "levy/stable.hpp"
#include "levy/stats.hpp"
#include "levy/sweep.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision-based adversarial attack with alpha-stable proposals";

  py::register_exception<levy::Error>(m, "LevyError", PyExc_RuntimeError);
  py::register_exception<levy::IoError>(m, "IoError", PyExc_IOError);
  py::register_exception<levy::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<levy::DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<levy::Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform_open", &levy::Rng::uniform_open)
      .def("gaussian", &levy::Rng::gaussian);

  m.def("derive_seed",
        py::overload_cast<std::uint64_t, std::uint64_t>(&levy::derive_seed),
        py::arg("master"), py::arg("index"));

  py::class_<levy::Bounds>(m, "Bounds")
      .def(py::init([](double low, double high) {
             return levy::Bounds{low, high};
           }),
           py::arg("low") = 0.0, py::arg("high") = 1.0)
      .def_readwrite("low", &levy::Bounds::low)
      .def_readwrite("high", &levy::Bounds::high);

  py::class_<levy::Label>(m, "Label")
      .def(py::init([](std::int32_t index) { return levy::Label{index}; }),
           py::arg("class_index"))
      .def_readwrite("class_index", &levy::Label::class_index)
      .def("__int__",
           [](const levy::Label& l) { return l.class_index; })
      .def("__eq__",
           [](const levy::Label& a, const levy::Label& b) { return a == b; })
      .def("__repr__", [](const levy::Label& l) {
        return "Label(" + std::to_string(l.class_index) + ")";
      });
  py::implicitly_convertible<py::int_, levy::Label>();

  py::class_<levy::StableParams>(m, "StableParams")
      .def(py::init([](double alpha, double mu, double gamma) {
             return levy::StableParams{alpha, mu, gamma};
           }),
           py::arg("alpha") = 2.0, py::arg("mu") = 0.0, py::arg("gamma") = 1.0)
      .def_readwrite("alpha", &levy::StableParams::alpha)
      .def_readwrite("mu", &levy::StableParams::mu)
      .def_readwrite("gamma", &levy::StableParams::gamma);

  m.def("sample_scalar", &levy::sample_scalar, py::arg("params"),
        py::arg("rng"));
  m.def("sample_vector", &levy::sample_vector, py::arg("params"),
        py::arg("dim"), py::arg("rng"));
  m.def(
      "empirical_cf",
      [](const std::vector<double>& samples, double s) {
        return levy::empirical_cf(samples, s);
      },
      py::arg("samples"), py::arg("s"));
  m.def("analytic_cf", &levy::analytic_cf, py::arg("params"), py::arg("s"));
  m.def(
      "impulsiveness_ratio",
      [](const std::vector<double>& samples) {
        return levy::impulsiveness_ratio(samples);
      },
      py::arg("samples"));
  m.def(
      "quantile",
      [](const std::vector<double>& samples, double q) {
        return levy::quantile(samples, q);
      },
      py::arg("samples"), py::arg("q"));

  py::class_<levy::LabeledDataset>(m, "LabeledDataset")
      .def(py::init<>())
      .def_readwrite("points", &levy::LabeledDataset::points)
      .def_readwrite("labels", &levy::LabeledDataset::labels)
      .def_readwrite("bounds", &levy::LabeledDataset::bounds)
      .def_readwrite("num_classes", &levy::LabeledDataset::num_classes)
      .def_readwrite("rows", &levy::LabeledDataset::rows)
      .def_readwrite("cols", &levy::LabeledDataset::cols)
      .def("__len__", &levy::LabeledDataset::size)
      .def("dim", &levy::LabeledDataset::dim)
      .def("validate", &levy::LabeledDataset::validate);

  m.def("make_synthetic_blobs", &levy::make_synthetic_blobs,
        py::arg("num_classes"), py::arg("dim"), py::arg("points_per_class"),
        py::arg("separation"), py::arg("rng"));
  m.def("load_idx_images", &levy::load_idx_images, py::arg("path"));
  m.def("load_idx_labels", &levy::load_idx_labels, py::arg("path"));
  m.def(
      "assemble_dataset",
      [](const levy::IdxImages& images, const std::vector<levy::Label>& labels,
         bool scale01, int num_classes) {
        return levy::assemble_dataset(images, labels, scale01, num_classes);
      },
      py::arg("images"), py::arg("labels"), py::arg("scale01") = false,
      py::arg("num_classes") = 10);

  py::class_<levy::IdxImages>(m, "IdxImages")
      .def(py::init<>())
      .def_readwrite("count", &levy::IdxImages::count)
      .def_readwrite("rows", &levy::IdxImages::rows)
      .def_readwrite("cols", &levy::IdxImages::cols)
      .def_readwrite("images", &levy::IdxImages::images);

  py::class_<levy::MlpModel>(m, "MlpModel")
      .def("input_dim", &levy::MlpModel::input_dim)
      .def("num_classes", &levy::MlpModel::num_classes);

  py::class_<levy::OracleHandle>(m, "OracleHandle")
      .def("predict", &levy::OracleHandle::predict, py::arg("x"))
      .def_property_readonly("query_count", &levy::OracleHandle::query_count)
      .def("clone", &levy::OracleHandle::clone)
      .def_property_readonly("num_classes", &levy::OracleHandle::num_classes)
      .def_property_readonly("input_dim", &levy::OracleHandle::input_dim)
      .def_property_readonly("input_bounds", &levy::OracleHandle::input_bounds)
      .def_property_readonly("model", &levy::OracleHandle::model,
                             py::return_value_policy::reference_internal);

  m.def("save_model", &levy::save_model, py::arg("path"), py::arg("model"));
  m.def("load_model", &levy::load_model, py::arg("path"),
        py::arg("input_bounds") = levy::Bounds{0.0, 1.0});

  py::class_<levy::TrainOptions>(m, "TrainOptions")
      .def(py::init<>())
      .def_readwrite("epochs", &levy::TrainOptions::epochs)
      .def_readwrite("learning_rate", &levy::TrainOptions::learning_rate)
      .def_readwrite("hidden_units", &levy::TrainOptions::hidden_units);

  py::class_<levy::TrainResult>(m, "TrainResult")
      .def_readonly("oracle", &levy::TrainResult::oracle)
      .def_readonly("train_accuracy", &levy::TrainResult::train_accuracy)
      .def_readonly("final_loss", &levy::TrainResult::final_loss);

  m.def("train_toy_classifier",
        py::overload_cast<const levy::LabeledDataset&, const levy::TrainOptions&,
                          levy::Rng&>(&levy::train_toy_classifier),
        py::arg("dataset"), py::arg("options"), py::arg("rng"));
  m.def("train_toy_classifier",
        py::overload_cast<const levy::LabeledDataset&, int, levy::Rng&>(
            &levy::train_toy_classifier),
        py::arg("dataset"), py::arg("epochs"), py::arg("rng"));

  py::enum_<levy::Termination>(m, "Termination")
      .value("epsilon_below_psi", levy::Termination::epsilon_below_psi)
      .value("max_steps", levy::Termination::max_steps)
      .value("init_failed", levy::Termination::init_failed)
      .value("already_misclassified", levy::Termination::already_misclassified);

  py::class_<levy::AttackConfig>(m, "AttackConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &levy::AttackConfig::alpha)
      .def_readwrite("max_steps", &levy::AttackConfig::max_steps)
      .def_readwrite("termination_threshold",
                     &levy::AttackConfig::termination_threshold)
      .def_readwrite("initial_delta", &levy::AttackConfig::initial_delta)
      .def_readwrite("initial_epsilon", &levy::AttackConfig::initial_epsilon)
      .def_readwrite("adaptation_window", &levy::AttackConfig::adaptation_window)
      .def_readwrite("adaptation_factor", &levy::AttackConfig::adaptation_factor)
      .def_readwrite("orth_success_target",
                     &levy::AttackConfig::orth_success_target)
      .def_readwrite("shrink_success_target",
                     &levy::AttackConfig::shrink_success_target)
      .def_readwrite("epsilon_clamp", &levy::AttackConfig::epsilon_clamp)
      .def_readwrite("probe_interval", &levy::AttackConfig::probe_interval)
      .def_readwrite("max_init_attempts", &levy::AttackConfig::max_init_attempts)
      .def_property(
          "seed",
          [](const levy::AttackConfig& c) { return c.seed.value; },
          [](levy::AttackConfig& c, std::uint64_t v) { c.seed = v; })
      .def("validate", &levy::AttackConfig::validate);

  py::class_<levy::TracePoint>(m, "TracePoint")
      .def_readonly("step", &levy::TracePoint::step)
      .def_readonly("distance", &levy::TracePoint::distance);

  py::class_<levy::AttackResult>(m, "AttackResult")
      .def_readonly("adversarial", &levy::AttackResult::adversarial)
      .def_readonly("perturbation", &levy::AttackResult::perturbation)
      .def_readonly("final_label", &levy::AttackResult::final_label)
      .def_readonly("steps_taken", &levy::AttackResult::steps_taken)
      .def_readonly("queries_used", &levy::AttackResult::queries_used)
      .def_readonly("distance_trace", &levy::AttackResult::distance_trace)
      .def_readonly("terminated_by", &levy::AttackResult::terminated_by)
      .def("succeeded", &levy::AttackResult::succeeded);

  m.def("run_attack",
        py::overload_cast<levy::OracleHandle&, const levy::DataPoint&,
                          levy::Label, const levy::AttackConfig&>(
            &levy::run_attack),
        py::arg("oracle"), py::arg("x"), py::arg("y"), py::arg("config"));

  py::enum_<levy::NormKind>(m, "NormKind")
      .value("linf", levy::NormKind::linf)
      .value("l1", levy::NormKind::l1)
      .value("l2", levy::NormKind::l2);

  m.def("lp_norm", &levy::lp_norm, py::arg("tau"), py::arg("p"));
  m.def(
      "aggregate",
      [](const std::vector<double>& values) {
        const auto agg = levy::aggregate(values);
        return py::make_tuple(agg.mean, agg.median);
      },
      py::arg("values"));
  m.def("perturbation_sparsity", &levy::perturbation_sparsity, py::arg("tau"));

  py::class_<levy::SweepSettings>(m, "SweepSettings")
      .def(py::init<>())
      .def_readwrite("alphas", &levy::SweepSettings::alphas)
      .def_readwrite("samples", &levy::SweepSettings::samples)
      .def_readwrite("base", &levy::SweepSettings::base)
      .def_property(
          "master_seed",
          [](const levy::SweepSettings& s) { return s.master_seed.value; },
          [](levy::SweepSettings& s, std::uint64_t v) { s.master_seed = v; })
      .def_readwrite("worker_threads", &levy::SweepSettings::worker_threads);

  py::class_<levy::SweepReport>(m, "SweepReport")
      .def_property_readonly("json", [](const levy::SweepReport& r) {
        return levy::report_json(r).dump(2);
      });

  m.def("run_sweep", &levy::run_sweep, py::arg("oracle"), py::arg("dataset"),
        py::arg("settings"),
        py::call_guard<py::gil_scoped_release>());
  m.def("write_report", &levy::write_report, py::arg("path"),
        py::arg("report"));
}
