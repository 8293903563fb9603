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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/encoding.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/metadata.hpp"

namespace tabprompt {

// A dataset after cutoff, target resolution and target-space construction.
struct PreparedDataset {
  Dataset data;
  ReformattedMetadata metadata;
  MetadataSource metadata_source = MetadataSource::kFallback;
  TargetSpace space;
};

struct PreparedSplit {
  std::shared_ptr<const PreparedDataset> dataset;
  double train_ratio = 0.0;
  Dataset train;
  Dataset test;
  std::vector<int> train_labels;
  std::vector<int> test_labels;
  OrdinalEncoder encoder;
  std::optional<TreeEnsembleModel> model;

  const std::string& id() const { return dataset->data.id; }
  int num_classes() const { return static_cast<int>(dataset->space.size()); }
};

struct PrepareOptions {
  std::size_t max_rows = kDefaultCutoff;
  std::uint64_t cutoff_seed = 0;
};

// Sets the target from `metadata`, applies the cutoff, drops rows with a
// missing target and builds the target space.
std::shared_ptr<const PreparedDataset> PrepareDataset(
    const Dataset& loaded, ReformattedMetadata metadata, MetadataSource source,
    const PrepareOptions& options);

PreparedSplit MakeSplit(std::shared_ptr<const PreparedDataset> dataset,
                        const SplitSpec& spec);

// Fits the calibrated tree ensemble on the training rows of `split`.
void FitSplitModel(PreparedSplit& split, const BoostingParams& params = {},
                   const CalibrationParams& calibration = {});

std::vector<int> LabelsOf(const Dataset& d, const TargetSpace& space);

// Loads every manifest entry. A missing data or metadata file is a kConfig
// error raised before anything is parsed.
std::vector<Dataset> LoadRegistry(const Manifest& manifest, std::size_t parallelism = 1);

// Reformats metadata (cache, client, fallback) and prepares each dataset.
std::vector<std::shared_ptr<const PreparedDataset>> PrepareRegistry(
    const std::vector<Dataset>& datasets, ChatClient* client, MetadataCache* cache,
    const ReformatOptions& reformat, const PrepareOptions& options, std::size_t parallelism = 1);

}  // namespace tabprompt
