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

#include "tabprompt/evalharness.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>

#include "json.hpp"

#include "tabprompt/error.hpp"
#include "tabprompt/outparse.hpp"
#include "tabprompt/parallel.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kReportSchema = "tabprompt.report/1";
constexpr std::size_t kBatchSize = 32;

EvalResult BaseResult(const PreparedSplit& split, std::string model_id) {
  EvalResult r;
  r.dataset_id = split.id();
  r.model_id = std::move(model_id);
  r.train_ratio = split.train_ratio;
  r.total = split.test.rows.size();
  return r;
}

void Finish(EvalResult& r) {
  r.accuracy = r.total ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
}

ordered_json SummaryJson(const Summary& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"q25", s.q25}, {"q75", s.q75}};
}

}  // namespace

Summary Aggregate(const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot aggregate an empty list");
  Summary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = Percentile(values, 0.5);
  s.q25 = Percentile(values, 0.25);
  s.q75 = Percentile(values, 0.75);
  return s;
}

std::vector<double> AverageRanks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

RankTable RankModels(const AccuracyGrid& grid, const std::vector<std::string>& models) {
  RankTable table;
  table.models = models;
  if (table.models.empty()) {
    std::set<std::string> seen;
    for (const auto& [ds, row] : grid) {
      for (const auto& [m, acc] : row) {
        if (seen.insert(m).second) table.models.push_back(m);
      }
    }
  }
  std::map<std::string, std::vector<double>> per_model;
  for (const auto& [ds, row] : grid) {
    std::vector<double> acc;
    for (const auto& m : table.models) {
      auto it = row.find(m);
      if (it == row.end()) {
        table.warnings.push_back("dataset '" + ds + "': model '" + m + "' missing, scored 0.0");
        acc.push_back(0.0);
      } else {
        acc.push_back(it->second);
      }
    }
    const auto ranks = AverageRanks(acc);
    for (std::size_t i = 0; i < table.models.size(); ++i) {
      table.ranks[ds][table.models[i]] = ranks[i];
      per_model[table.models[i]].push_back(ranks[i]);
    }
  }
  for (const auto& [m, ranks] : per_model) table.rank_summary[m] = Aggregate(ranks);
  return table;
}

std::unique_ptr<OracleBackend> MakeOracle(const PreparedSplit& split, PromptVariant variant,
                                          AugmentationMode mode) {
  const auto records = BuildRecords(split, split.test.rows, variant, mode);
  return std::make_unique<OracleBackend>(records);
}

EvalResult Evaluate(const PreparedSplit& split, Backend& backend, PromptVariant variant, int max_new_tokens) {
  EvalResult r = BaseResult(split, backend.id());
  r.backend_id = backend.id();
  r.max_new_tokens = max_new_tokens;
  if (r.total == 0) throw Error(ErrorKind::kInvalidArgument, "split '" + split.id() + "' has no test rows");
  // One-hot records carry the prompt and label without needing a fitted model.
  const auto records = BuildRecords(split, split.test.rows, variant, AugmentationMode::kOneHot);
  const int k = split.num_classes();
  for (std::size_t start = 0; start < records.size(); start += kBatchSize) {
    const std::size_t end = std::min(records.size(), start + kBatchSize);
    std::vector<GenerationRequest> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back({records[i].prompt, max_new_tokens, records[i].dataset_id, records[i].row_id});
    }
    const auto items = backend.BatchGenerate(batch);
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!items[i].ok()) {
        // Abort: what has been scored so far stays in the result.
        r.error = "row " + std::to_string(records[start + i].row_id) + ": " + items[i].error;
        Finish(r);
        return r;
      }
      const auto parsed = ParseGeneration(items[i].response->text, k);
      if (parsed.status == ParseStatus::kFailed) {
        ++r.failed_parse;
      } else if (parsed.predicted_class == records[start + i].true_class) {
        ++r.correct;
      }
    }
  }
  Finish(r);
  return r;
}

EvalResult EvaluateTreeEnsemble(const PreparedSplit& split) {
  if (!split.model) throw Error(ErrorKind::kInvalidArgument, "split '" + split.id() + "' has no fitted model");
  EvalResult r = BaseResult(split, ModelId(ModelKind::kTreeEnsemble));
  for (std::size_t i = 0; i < split.test.rows.size(); ++i) {
    if (split.model->PredictClass(split.encoder.Transform(split.test.rows[i])) == split.test_labels[i]) ++r.correct;
  }
  Finish(r);
  return r;
}

EvalResult EvaluateMlp(const PreparedSplit& split, const MlpParams& params) {
  EvalResult r = BaseResult(split, ModelId(ModelKind::kMlp));
  const Matrix train = split.encoder.Transform(split.train.rows);
  const auto means = ColumnMeans(train);
  const MlpModel model = FitMlp(ImputeMissing(train, means), split.train_labels, split.num_classes(), params);
  const auto pred = PredictMlp(model, ImputeMissing(split.encoder.Transform(split.test.rows), means));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] == split.test_labels[i]) ++r.correct;
  }
  Finish(r);
  return r;
}

std::string ModelId(ModelKind kind) {
  switch (kind) {
    case ModelKind::kTreeEnsemble: return "tree_ensemble";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kOracle: return "oracle";
    case ModelKind::kProxy: return "proxy";
    case ModelKind::kRemote: return "remote";
  }
  return "unknown";
}

SweepReport FewshotSweep(const std::vector<std::shared_ptr<const PreparedDataset>>& datasets,
                         const SweepConfig& config) {
  if (datasets.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one dataset");
  if (config.ratios.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one ratio");
  if (config.models.empty()) throw Error(ErrorKind::kInvalidArgument, "sweep needs at least one model");
  for (double r : config.ratios) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::kInvalidArgument, "ratio " + FormatRoundTrip(r) + " outside (0, 1)");
  }
  if (std::set<double>(config.ratios.begin(), config.ratios.end()).size() != config.ratios.size()) {
    throw Error(ErrorKind::kInvalidArgument, "duplicate ratios in sweep");
  }
  const bool wants_remote =
      std::find(config.models.begin(), config.models.end(), ModelKind::kRemote) != config.models.end();
  if (wants_remote && config.remote == nullptr) {
    throw Error(ErrorKind::kConfig, "remote model requested without a remote backend");
  }

  auto sorted = datasets;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a->data.id < b->data.id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->data.id == sorted[i - 1]->data.id) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate dataset id '" + sorted[i]->data.id + "'");
    }
  }

  const bool needs_model = std::any_of(config.models.begin(), config.models.end(), [](ModelKind k) {
    return k == ModelKind::kTreeEnsemble || k == ModelKind::kProxy;
  });
  MlpParams mlp = config.mlp;
  mlp.seed = config.train_seed;
  const CalibrationParams calibration{3, config.train_seed};

  const std::size_t n_models = config.models.size();
  const std::size_t tasks = config.ratios.size() * sorted.size();
  std::vector<EvalResult> cells(tasks * n_models);
  ParallelFor(tasks, config.parallelism, [&](std::size_t task) {
    const double ratio = config.ratios[task / sorted.size()];
    const auto& ds = sorted[task % sorted.size()];
    EvalResult* out = &cells[task * n_models];
    auto fail_all = [&](const std::string& why) {
      for (std::size_t m = 0; m < n_models; ++m) {
        out[m] = EvalResult{};
        out[m].dataset_id = ds->data.id;
        out[m].model_id = ModelId(config.models[m]);
        out[m].train_ratio = ratio;
        out[m].error = why;
      }
    };
    PreparedSplit split;
    try {
      split = MakeSplit(ds, SplitSpec{ratio, config.split_seed});
      if (needs_model) FitSplitModel(split, config.boosting, calibration);
    } catch (const std::exception& e) {
      fail_all(e.what());
      return;
    }
    for (std::size_t m = 0; m < n_models; ++m) {
      const ModelKind kind = config.models[m];
      try {
        switch (kind) {
          case ModelKind::kTreeEnsemble: out[m] = EvaluateTreeEnsemble(split); break;
          case ModelKind::kMlp: out[m] = EvaluateMlp(split, mlp); break;
          case ModelKind::kOracle: {
            auto oracle = MakeOracle(split, config.variant, AugmentationMode::kOneHot);
            out[m] = Evaluate(split, *oracle, config.variant, config.max_new_tokens);
            break;
          }
          case ModelKind::kProxy: {
            ProxyBackend proxy;
            proxy.AddSplit(split);
            out[m] = Evaluate(split, proxy, config.variant, config.max_new_tokens);
            break;
          }
          case ModelKind::kRemote:
            out[m] = Evaluate(split, *config.remote, config.variant, config.max_new_tokens);
            break;
        }
      } catch (const std::exception& e) {
        out[m] = BaseResult(split, ModelId(kind));
        out[m].error = e.what();
      }
      out[m].model_id = ModelId(kind);
    }
  });

  SweepReport report;
  report.cells = std::move(cells);
  std::vector<std::string> models;
  for (ModelKind k : config.models) models.push_back(ModelId(k));
  Summarize(report, models);
  return report;
}

void Summarize(SweepReport& report, const std::vector<std::string>& models) {
  report.ranks.clear();
  report.summary.clear();
  report.warnings.clear();
  std::vector<double> ratio_order;
  std::map<double, AccuracyGrid> grids;
  for (const auto& c : report.cells) {
    if (!grids.contains(c.train_ratio)) ratio_order.push_back(c.train_ratio);
    auto& row = grids[c.train_ratio][c.dataset_id];
    if (!c.error.empty()) {
      report.warnings.push_back("ratio " + FormatRoundTrip(c.train_ratio) + ", dataset '" + c.dataset_id +
                                "', model '" + c.model_id + "': " + c.error + " (scored 0.0)");
      row[c.model_id] = 0.0;
    } else {
      row[c.model_id] = c.accuracy;
    }
  }
  for (double ratio : ratio_order) {
    const AccuracyGrid& grid = grids[ratio];
    RankTable table = RankModels(grid, models);
    for (const auto& w : table.warnings) report.warnings.push_back("ratio " + FormatRoundTrip(ratio) + ": " + w);
    for (const auto& m : table.models) {
      std::vector<double> acc, ranks;
      for (const auto& [ds, row] : grid) {
        auto it = row.find(m);
        acc.push_back(it == row.end() ? 0.0 : it->second);
        ranks.push_back(table.ranks[ds][m]);
      }
      SummaryRow s;
      s.train_ratio = ratio;
      s.model_id = m;
      s.datasets = grid.size();
      s.accuracy = Aggregate(acc);
      s.rank = Aggregate(ranks);
      report.summary.push_back(s);
    }
    report.ranks[ratio] = std::move(table);
  }
}

std::string ReportJson(const SweepReport& report) {
  ordered_json j;
  j["schema"] = kReportSchema;
  std::vector<std::string> models;
  for (const auto& c : report.cells) {
    if (std::find(models.begin(), models.end(), c.model_id) == models.end()) models.push_back(c.model_id);
  }
  j["models"] = models;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"dataset_id", c.dataset_id},
                     {"model_id", c.model_id},
                     {"ratio", c.train_ratio},
                     {"accuracy", c.accuracy},
                     {"correct", c.correct},
                     {"failed_parse", c.failed_parse},
                     {"total", c.total},
                     {"backend_id", c.backend_id},
                     {"max_new_tokens", c.max_new_tokens},
                     {"error", c.error}});
  }
  j["cells"] = cells;
  ordered_json ranks = ordered_json::array();
  for (const auto& [ratio, table] : report.ranks) {
    ordered_json summary = ordered_json::object();
    for (const auto& [m, s] : table.rank_summary) summary[m] = SummaryJson(s);
    ranks.push_back({{"ratio", ratio}, {"ranks", table.ranks}, {"rank_summary", summary}});
  }
  j["ranks"] = ranks;
  ordered_json summary = ordered_json::array();
  for (const auto& s : report.summary) {
    summary.push_back({{"ratio", s.train_ratio},
                       {"model_id", s.model_id},
                       {"datasets", s.datasets},
                       {"accuracy", SummaryJson(s.accuracy)},
                       {"rank", SummaryJson(s.rank)}});
  }
  j["summary"] = summary;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string ReportCsv(const SweepReport& report) {
  std::string out = "dataset_id,model_id,ratio,accuracy,rank\n";
  for (const auto& c : report.cells) {
    double rank = 0.0;
    if (auto t = report.ranks.find(c.train_ratio); t != report.ranks.end()) {
      if (auto d = t->second.ranks.find(c.dataset_id); d != t->second.ranks.end()) {
        if (auto m = d->second.find(c.model_id); m != d->second.end()) rank = m->second;
      }
    }
    const double acc = c.error.empty() ? c.accuracy : 0.0;
    out += c.dataset_id + "," + c.model_id + "," + FormatRoundTrip(c.train_ratio) + "," + FormatRoundTrip(acc) +
           "," + FormatRoundTrip(rank) + "\n";
  }
  return out;
}

void EmitReport(const SweepReport& report, const std::string& directory) {
  if (report.cells.empty()) throw Error(ErrorKind::kInvalidArgument, "report has no results");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + directory + ": " + ec.message());
  const std::filesystem::path dir(directory);
  WriteFile((dir / "report.json").string(), ReportJson(report));
  WriteFile((dir / "report.csv").string(), ReportCsv(report));
}

SweepReport LoadReport(const std::string& json_path) {
  SweepReport report;
  std::vector<std::string> models;
  try {
    const auto j = nlohmann::json::parse(ReadFile(json_path));
    if (j.at("schema").get<std::string>() != kReportSchema) {
      throw Error(ErrorKind::kParse, "unsupported report schema in " + json_path);
    }
    models = j.at("models").get<std::vector<std::string>>();
    for (const auto& c : j.at("cells")) {
      EvalResult r;
      r.dataset_id = c.at("dataset_id").get<std::string>();
      r.model_id = c.at("model_id").get<std::string>();
      r.train_ratio = c.at("ratio").get<double>();
      r.accuracy = c.at("accuracy").get<double>();
      r.correct = c.at("correct").get<std::size_t>();
      r.failed_parse = c.at("failed_parse").get<std::size_t>();
      r.total = c.at("total").get<std::size_t>();
      r.backend_id = c.at("backend_id").get<std::string>();
      r.max_new_tokens = c.at("max_new_tokens").get<int>();
      r.error = c.at("error").get<std::string>();
      report.cells.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, "bad report " + json_path + ": " + e.what());
  }
  Summarize(report, models);
  return report;
}

}  // namespace tabprompt
