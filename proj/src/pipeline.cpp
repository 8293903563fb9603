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

#include "tabprompt/pipeline.hpp"

#include <filesystem>

#include "tabprompt/error.hpp"
#include "tabprompt/parallel.hpp"

namespace tabprompt {

std::shared_ptr<const PreparedDataset> PrepareDataset(const Dataset& loaded, ReformattedMetadata metadata,
                                                      MetadataSource source, const PrepareOptions& options) {
  const auto target = MatchColumn(metadata.target, loaded.ColumnNames());
  if (!target) {
    throw Error(ErrorKind::kNotFound,
                "target '" + metadata.target + "' matches no column of '" + loaded.id + "'");
  }
  Dataset d = loaded;
  d.target_column = *target;
  metadata.target = *target;
  d = DropMissingTargets(ApplyCutoff(d, options.max_rows, options.cutoff_seed));
  if (d.rows.empty()) throw Error(ErrorKind::kEmptyDataset, "dataset '" + d.id + "' has no labelled rows");

  auto out = std::make_shared<PreparedDataset>();
  out->space = BuildTargetSpace(d);
  out->data = std::move(d);
  out->metadata = std::move(metadata);
  out->metadata_source = source;
  return out;
}

std::vector<int> LabelsOf(const Dataset& d, const TargetSpace& space) {
  const std::size_t t = d.TargetIndex();
  std::vector<int> out;
  out.reserve(d.rows.size());
  for (const Row& row : d.rows) {
    const auto cls = space.ClassOf(row.cells[t], d.columns[t]);
    if (!cls) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row " + std::to_string(row.id) + " of '" + d.id + "' has no target class");
    }
    out.push_back(*cls);
  }
  return out;
}

PreparedSplit MakeSplit(std::shared_ptr<const PreparedDataset> dataset, const SplitSpec& spec) {
  if (!dataset) throw Error(ErrorKind::kInvalidArgument, "null dataset");
  PreparedSplit s;
  auto [train, test] = Split(dataset->data, spec);
  s.train_ratio = spec.train_ratio;
  s.train_labels = LabelsOf(train, dataset->space);
  s.test_labels = LabelsOf(test, dataset->space);
  s.encoder = OrdinalEncoder::Fit(train);
  s.train = std::move(train);
  s.test = std::move(test);
  s.dataset = std::move(dataset);
  return s;
}

void FitSplitModel(PreparedSplit& split, const BoostingParams& params, const CalibrationParams& calibration) {
  const Matrix x = split.encoder.Transform(split.train.rows);
  split.model = FitExternalPredictor(x, split.train_labels, split.num_classes(), params, calibration);
}

std::vector<Dataset> LoadRegistry(const Manifest& manifest, std::size_t parallelism) {
  for (const auto& e : manifest.entries) {
    if (!std::filesystem::is_regular_file(e.path)) {
      throw Error(ErrorKind::kConfig, "dataset '" + e.id + "': file not found: " + e.path);
    }
    if (e.metadata_path && !std::filesystem::is_regular_file(*e.metadata_path)) {
      throw Error(ErrorKind::kConfig, "dataset '" + e.id + "': metadata not found: " + *e.metadata_path);
    }
  }
  std::vector<Dataset> out(manifest.entries.size());
  ParallelFor(out.size(), parallelism, [&](std::size_t i) {
    out[i] = LoadDataset(manifest.entries[i].path, manifest.entries[i]);
  });
  return out;
}

std::vector<std::shared_ptr<const PreparedDataset>> PrepareRegistry(
    const std::vector<Dataset>& datasets, ChatClient* client, MetadataCache* cache,
    const ReformatOptions& reformat, const PrepareOptions& options, std::size_t parallelism) {
  const auto outcomes = ReformatAll(datasets, client, cache, reformat, parallelism);
  std::vector<std::shared_ptr<const PreparedDataset>> out(datasets.size());
  ParallelFor(datasets.size(), parallelism, [&](std::size_t i) {
    out[i] = PrepareDataset(datasets[i], outcomes[i].value, outcomes[i].source, options);
  });
  return out;
}

}  // namespace tabprompt
