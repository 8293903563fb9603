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
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/metadata.hpp"

namespace tabprompt {

enum class PromptVariant { kHeavy, kLight };
enum class AugmentationMode { kAugmented, kOneHot };

std::string_view PromptVariantName(PromptVariant v);
std::string_view AugmentationModeName(AugmentationMode m);
PromptVariant ParsePromptVariant(std::string_view s);
AugmentationMode ParseAugmentationMode(std::string_view s);

struct CorpusRecord {
  std::string dataset_id;
  std::size_t row_id = 0;
  PromptVariant variant = PromptVariant::kHeavy;
  std::string prompt;
  std::string reference;
  std::string class_details;
  int num_classes = 0;
  int true_class = 0;
  // Byte length of `prompt`, so consumers can filter oversized records.
  std::size_t prompt_length = 0;

  // One JSON object, no trailing newline.
  std::string ToJsonLine() const;
  static CorpusRecord FromJsonLine(std::string_view line);
};

struct CorpusManifest {
  std::size_t record_count = 0;
  std::map<std::string, std::size_t> per_dataset;
  PromptVariant variant = PromptVariant::kHeavy;
  AugmentationMode mode = AugmentationMode::kAugmented;
  std::map<std::string, std::uint64_t> seeds;
  std::string content_hash;

  std::string ToJson() const;
};

std::string BuildInstruction(const TargetSpace& space);

// `metadata` may be null for the light variant.
std::string AssemblePrompt(PromptVariant variant, const ReformattedMetadata* metadata,
                           std::string_view features, std::string_view instructions);

struct PreparedSplit;

// Records for `rows` of one prepared split, in row order.
std::vector<CorpusRecord> BuildRecords(const PreparedSplit& split,
                                       const std::vector<Row>& rows,
                                       PromptVariant variant, AugmentationMode mode);

// Writes one JSON line per training row of every split, ordered by
// (dataset_id, row_id), and returns the manifest.
CorpusManifest EmitCorpus(const std::vector<const PreparedSplit*>& splits,
                          PromptVariant variant, AugmentationMode mode,
                          std::ostream& out,
                          const std::map<std::string, std::uint64_t>& seeds,
                          std::size_t parallelism = 1);

}  // namespace tabprompt
