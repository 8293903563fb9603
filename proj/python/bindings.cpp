/*
 * Copyright 2026 The tabprompt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Python bindings for the text-facing parts of the toolkit: feature and
// target serialization, output parsing, prompt assembly and corpus records.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/backends.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/evalharness.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/isotonic.hpp"
#include "tabprompt/outparse.hpp"
#include "tabprompt/promptgen.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

namespace py = pybind11;
using namespace tabprompt;

namespace {

Dataset LoadCsv(const std::string& csv_text, const std::string& target) {
  return LoadDatasetFromText(csv_text, ManifestEntry{"python", "", target, {}});
}

std::vector<std::string> SerializeRows(const std::string& csv_text, const std::string& target) {
  const Dataset d = LoadCsv(csv_text, target);
  std::vector<std::string> out;
  out.reserve(d.rows.size());
  for (const Row& r : d.rows) out.push_back(SerializeFeatures(r, d));
  return out;
}

py::dict RecordToDict(const CorpusRecord& r) {
  py::dict d;
  d["dataset_id"] = r.dataset_id;
  d["row_id"] = r.row_id;
  d["variant"] = std::string(PromptVariantName(r.variant));
  d["prompt"] = r.prompt;
  d["reference"] = r.reference;
  d["class_details"] = r.class_details;
  d["num_classes"] = r.num_classes;
  d["true_class"] = r.true_class;
  d["prompt_length"] = r.prompt_length;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tabprompt, m) {
  m.doc() = "Tabular-to-instruction corpus toolkit";

  py::register_exception<Error>(m, "TabpromptError", PyExc_RuntimeError);

  m.attr("DEFAULT_MAX_NEW_TOKENS") = kDefaultMaxNewTokens;

  m.def("serialize_rows", &SerializeRows, py::arg("csv_text"), py::arg("target"),
        "Feature descriptions for every row of a CSV text, target excluded.");
  m.def("serialize_probabilities",
        [](const std::vector<double>& p) { return SerializeProbabilities(p); }, py::arg("probs"));
  m.def(
      "augment_probabilities",
      [](const std::vector<double>& p, int true_class) { return AugmentProbabilities(p, true_class).probs; },
      py::arg("probs"), py::arg("true_class"),
      "Swap the true class to the top and round to hundredths summing to one.");
  m.def("extract_probs", &ExtractProbs, py::arg("text"));
  m.def(
      "parse_generation",
      [](const std::string& text, int expected_classes) {
        const auto p = ParseGeneration(text, expected_classes);
        return py::make_tuple(p.probs, p.predicted_class, std::string(ParseStatusName(p.status)));
      },
      py::arg("text"), py::arg("expected_classes"),
      "Returns (probs, predicted_class, status) with status ok, truncated or failed.");
  m.def(
      "assemble_prompt",
      [](const std::string& variant, const std::string& features, const std::string& instructions,
         const std::string& description) {
        const PromptVariant v = ParsePromptVariant(variant);
        const ReformattedMetadata meta{"", description};
        return AssemblePrompt(v, v == PromptVariant::kHeavy ? &meta : nullptr, features, instructions);
      },
      py::arg("variant"), py::arg("features"), py::arg("instructions"), py::arg("description") = "");
  m.def(
      "class_details",
      [](const std::vector<std::string>& labels) { return SerializeClass(OneHotSpace(labels)); },
      py::arg("labels"));
  m.def(
      "parse_corpus_line", [](const std::string& line) { return RecordToDict(CorpusRecord::FromJsonLine(line)); },
      py::arg("line"));
  m.def(
      "isotonic",
      [](const std::vector<double>& values, const std::vector<double>& weights) {
        return PoolAdjacentViolators(values, weights);
      },
      py::arg("values"), py::arg("weights") = std::vector<double>{});
  m.def("average_ranks", &AverageRanks, py::arg("values"));
  m.def("sha256_hex", [](const std::string& s) { return Sha256Hex(s); }, py::arg("data"));
}
