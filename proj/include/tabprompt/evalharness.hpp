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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabprompt/backends.hpp"
#include "tabprompt/mlp.hpp"
#include "tabprompt/pipeline.hpp"
#include "tabprompt/promptgen.hpp"

namespace tabprompt {

struct EvalResult {
  std::string dataset_id;
  std::string model_id;
  double train_ratio = 0.0;
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t failed_parse = 0;
  std::size_t total = 0;
  std::string backend_id;  // empty for non-generative models
  int max_new_tokens = 0;
  // Set when the cell could not be computed; such cells score 0.0.
  std::string error;
};

struct Summary {
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Mean plus linear-interpolation median and quartiles. Throws on empty input.
Summary Aggregate(const std::vector<double>& values);

// dataset id -> model id -> accuracy; absent models are missing cells.
using AccuracyGrid = std::map<std::string, std::map<std::string, double>>;

struct RankTable {
  std::vector<std::string> models;
  // dataset id -> model id -> rank (1 = best, ties share the average rank)
  std::map<std::string, std::map<std::string, double>> ranks;
  std::map<std::string, Summary> rank_summary;
  std::vector<std::string> warnings;
};

// Average-tie descending ranks of `values` (1-based).
std::vector<double> AverageRanks(const std::vector<double>& values);

// Missing cells score 0.0 and are reported in warnings.
RankTable RankModels(const AccuracyGrid& grid, const std::vector<std::string>& models);

// Prompts every test row through `backend` and scores the parsed class.
// Failed parses count as incorrect.
EvalResult Evaluate(const PreparedSplit& split, Backend& backend, PromptVariant variant,
                    int max_new_tokens = kDefaultMaxNewTokens);

// Direct argmax accuracy of the split's fitted tree ensemble on the test rows.
EvalResult EvaluateTreeEnsemble(const PreparedSplit& split);

EvalResult EvaluateMlp(const PreparedSplit& split, const MlpParams& params);

// Oracle whose references are the one-hot or augmented targets of the split.
std::unique_ptr<OracleBackend> MakeOracle(const PreparedSplit& split, PromptVariant variant,
                                          AugmentationMode mode);

enum class ModelKind { kTreeEnsemble, kMlp, kOracle, kProxy, kRemote };

std::string ModelId(ModelKind kind);

struct SweepConfig {
  std::vector<double> ratios{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<ModelKind> models{ModelKind::kTreeEnsemble, ModelKind::kMlp};
  PromptVariant variant = PromptVariant::kHeavy;
  std::uint64_t split_seed = 0;
  std::uint64_t train_seed = 0;
  BoostingParams boosting;
  MlpParams mlp;
  std::size_t parallelism = 1;
  int max_new_tokens = kDefaultMaxNewTokens;
  // Required when models include kRemote.
  Backend* remote = nullptr;
};

struct SummaryRow {
  double train_ratio = 0.0;
  std::string model_id;
  std::size_t datasets = 0;
  Summary accuracy;
  Summary rank;
};

struct SweepReport {
  std::vector<EvalResult> cells;  // ordered by (ratio, dataset, model)
  std::map<double, RankTable> ranks;
  std::vector<SummaryRow> summary;
  std::vector<std::string> warnings;
};

SweepReport FewshotSweep(const std::vector<std::shared_ptr<const PreparedDataset>>& datasets,
                         const SweepConfig& config);

// Builds summary rows and ranks from finished cells; used by FewshotSweep and
// when re-reading a report.
void Summarize(SweepReport& report, const std::vector<std::string>& models);

// Writes report.json and report.csv under `directory`.
void EmitReport(const SweepReport& report, const std::string& directory);

std::string ReportJson(const SweepReport& report);
std::string ReportCsv(const SweepReport& report);

// Reads cells back from report.json.
SweepReport LoadReport(const std::string& json_path);

}  // namespace tabprompt
