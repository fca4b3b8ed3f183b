/**
 * Copyright 2026 The amfkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "amfkit/config.hpp"
#include "amfkit/datamodel.hpp"
#include "amfkit/errors.hpp"
#include "amfkit/format.hpp"
#include "amfkit/gradcheck.hpp"
#include "amfkit/losses.hpp"
#include "amfkit/metrics.hpp"
#include "amfkit/pipeline.hpp"

namespace py = pybind11;
using namespace amfkit;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ValidationError("ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

py::dict report_dict(const FoldReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["positives"] = r.positives;
  d["negatives"] = r.negatives;
  d["ba"] = r.ba;
  d["f1"] = r.f1;
  d["auc"] = r.auc;
  d["amf_recall"] = r.amf_recall;
  d["nmf_recall"] = r.nmf_recall;
  return d;
}

RunConfig config_from(const std::string& text, const std::map<std::string, std::string>& overrides) {
  RunConfig c = parse_config(text, "<config>");
  for (const auto& [k, v] : overrides) set_config_value(c, k, v, k);
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_amfkit, m) {
  m.doc() = "Bindings for the amfkit C++ core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<DatasetTable>(m, "DatasetTable")
      .def("__len__", &DatasetTable::size)
      .def_property_readonly("dim", &DatasetTable::dim)
      .def_property_readonly("domains", &DatasetTable::domains)
      .def_property_readonly("ids", [](const DatasetTable& t) {
        std::vector<std::string> ids;
        for (const auto& s : t.samples()) ids.push_back(s.id);
        return ids;
      })
      .def_property_readonly("sample_domains", [](const DatasetTable& t) {
        std::vector<std::string> d;
        for (const auto& s : t.samples()) d.push_back(s.domain);
        return d;
      })
      .def_property_readonly("labels", &DatasetTable::labels)
      .def_property_readonly("features", [](const DatasetTable& t) {
        std::vector<std::vector<double>> f;
        for (const auto& s : t.samples()) f.push_back(s.features);
        return f;
      })
      .def("census", [](const DatasetTable& t) { return format_census(t); })
      .def("to_csv", [](const DatasetTable& t) { return format_csv(t); })
      .def("subset", &DatasetTable::subset);

  m.def(
      "generate_synthetic",
      [](std::uint64_t seed, std::optional<std::vector<std::size_t>> sizes, std::optional<std::vector<double>> prevalence,
         std::size_t feature_dim) {
        SyntheticSpec spec;
        if (sizes) spec.domain_sizes = *sizes;
        if (prevalence) spec.prevalence = *prevalence;
        spec.feature_dim = feature_dim;
        Rng rng = Rng(seed).split("data");
        return generate_synthetic(spec, rng);
      },
      py::arg("seed") = 7, py::arg("domain_sizes") = py::none(), py::arg("prevalence") = py::none(),
      py::arg("feature_dim") = 16, "Synthetic table drawn from the same stream the CLI uses for this seed.");
  m.def("load_csv", [](const std::filesystem::path& p) { return load_csv(p); });
  m.def("load_embeddings", [](const std::filesystem::path& p) { return load_embeddings_binary(p); });

  m.def(
      "stratified_split",
      [](const DatasetTable& t, double fraction, std::uint64_t seed) {
        Rng rng(seed);
        const SplitPlan p = stratified_split(t, fraction, rng);
        return py::make_tuple(p.train_ids, p.monitor_ids);
      },
      py::arg("table"), py::arg("monitor_fraction") = 0.05, py::arg("seed") = 7);
  m.def("lodo_folds", [](const DatasetTable& t) {
    std::vector<std::tuple<std::string, std::vector<std::string>, std::vector<std::string>>> out;
    for (const auto& f : lodo_folds(t)) out.emplace_back(f.held_out_domain, f.train_ids, f.monitor_ids);
    return out;
  });

  m.def("balanced_accuracy", &balanced_accuracy, py::arg("positive_recall"), py::arg("negative_recall"));
  m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) { return auc(s, y); });
  m.def(
      "compute_report",
      [](const std::vector<double>& s, const std::vector<int>& y, double threshold) {
        return report_dict(compute_report(s, y, threshold));
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

  m.def(
      "focal_loss",
      [](const std::vector<double>& z, const std::vector<double>& y, double gamma, double pos_weight) {
        const auto r = focal_loss(z, y, FocalParams{gamma, pos_weight, false});
        return py::make_tuple(r.loss, r.grad);
      },
      py::arg("logits"), py::arg("labels"), py::arg("gamma") = 2.0, py::arg("pos_weight") = 1.0);
  m.def("dynamic_pos_weight", [](const std::vector<double>& y) { return dynamic_pos_weight(y); });
  m.def(
      "ms_mine",
      [](const std::vector<std::vector<double>>& e, const std::vector<int>& y, double eps) {
        const auto r = ms_mine(to_matrix(e), y, eps);
        return py::make_tuple(r.positives, r.negatives);
      },
      py::arg("embeddings"), py::arg("labels"), py::arg("epsilon") = 0.1);

  m.def(
      "gradcheck",
      [](std::uint64_t seed, std::size_t trials) {
        GradcheckOptions opt;
        opt.seed = seed;
        opt.trials = trials;
        py::list out;
        for (const auto& c : run_gradcheck(opt)) {
          py::dict d;
          d["name"] = c.name;
          d["configurations"] = c.configurations;
          d["max_rel_error"] = c.max_rel_error;
          d["max_abs_error"] = c.max_abs_error;
          d["passed"] = c.passed;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 1, py::arg("trials") = 100);

  m.def(
      "train",
      [](const DatasetTable& table, const std::string& config_text, const std::map<std::string, std::string>& overrides) {
        const RunConfig c = config_from(config_text, overrides);
        const TrainConfig tc = c.effective_train();
        Rng split_rng = Rng(c.seed).split("split");
        const SplitPlan plan = stratified_split(table, tc.monitor_fraction, split_rng);
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = train(table, plan, tc);
        }
        py::dict d;
        d["best_epoch"] = r.choice.best_epoch;
        d["best_monitor_ba"] = r.choice.best_monitor_ba;
        d["epochs_run"] = r.logs.size();
        d["epochs_csv"] = format_epoch_log_csv(r.logs);
        d["monitor"] = report_dict(evaluate(r.state, table.subset(plan.monitor_ids), tc.threshold));
        d["checkpoint"] = py::bytes(encode_checkpoint(r.state));
        return d;
      },
      py::arg("table"), py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
      "Train on a stratified split of `table`. `config` is config-file text; `overrides` maps section.key to value.");

  m.def("config_keys", &config_keys);
  m.def(
      "default_config", [] { return format_config(RunConfig{}); }, "Every config key with its default, as file text.");
}
