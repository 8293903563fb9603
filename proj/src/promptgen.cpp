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

#include "tabprompt/promptgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

#include "tabprompt/error.hpp"
#include "tabprompt/parallel.hpp"
#include "tabprompt/pipeline.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kHeavyHead =
    "Below is the description of a dataset, an object profile from the dataset and a target "
    "description. Predict the target by the given information of the object.\n\n"
    "# Dataset description: ";
constexpr std::string_view kLightHead =
    "Below is a dataset. Predict the target by the given information of the object.\n\n";
constexpr std::string_view kObject = "# Object description: ";
constexpr std::string_view kInstructions = "\n\n# You should return the probability of each class by: \n";
constexpr std::string_view kAnswer = "\n\n# Answer: \n";

}  // namespace

std::string_view PromptVariantName(PromptVariant v) {
  return v == PromptVariant::kHeavy ? "heavy" : "light";
}

std::string_view AugmentationModeName(AugmentationMode m) {
  return m == AugmentationMode::kAugmented ? "augmented" : "onehot";
}

PromptVariant ParsePromptVariant(std::string_view s) {
  if (s == "heavy") return PromptVariant::kHeavy;
  if (s == "light") return PromptVariant::kLight;
  throw Error(ErrorKind::kInvalidArgument, "unknown prompt variant '" + std::string(s) + "'");
}

AugmentationMode ParseAugmentationMode(std::string_view s) {
  if (s == "augmented") return AugmentationMode::kAugmented;
  if (s == "onehot") return AugmentationMode::kOneHot;
  throw Error(ErrorKind::kInvalidArgument, "unknown augmentation mode '" + std::string(s) + "'");
}

std::string CorpusRecord::ToJsonLine() const {
  ordered_json j;
  j["dataset_id"] = dataset_id;
  j["row_id"] = row_id;
  j["variant"] = PromptVariantName(variant);
  j["prompt"] = prompt;
  j["reference"] = reference;
  j["class_details"] = class_details;
  j["num_classes"] = num_classes;
  j["true_class"] = true_class;
  j["prompt_length"] = prompt_length;
  return j.dump();
}

CorpusRecord CorpusRecord::FromJsonLine(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    CorpusRecord r;
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.row_id = j.at("row_id").get<std::size_t>();
    r.variant = ParsePromptVariant(j.at("variant").get<std::string>());
    r.prompt = j.at("prompt").get<std::string>();
    r.reference = j.at("reference").get<std::string>();
    r.class_details = j.at("class_details").get<std::string>();
    r.num_classes = j.at("num_classes").get<int>();
    r.true_class = j.at("true_class").get<int>();
    r.prompt_length = j.value("prompt_length", r.prompt.size());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad corpus record: ") + e.what());
  }
}

std::string CorpusManifest::ToJson() const {
  ordered_json j;
  j["record_count"] = record_count;
  j["per_dataset"] = per_dataset;
  j["variant"] = PromptVariantName(variant);
  j["mode"] = AugmentationModeName(mode);
  j["seeds"] = seeds;
  j["content_hash"] = content_hash;
  return j.dump(2) + "\n";
}

std::string BuildInstruction(const TargetSpace& space) { return SerializeClass(space); }

std::string AssemblePrompt(PromptVariant variant, const ReformattedMetadata* metadata,
                           std::string_view features, std::string_view instructions) {
  if (features.empty()) throw Error(ErrorKind::kInvalidArgument, "prompt needs a feature description");
  if (instructions.empty()) throw Error(ErrorKind::kInvalidArgument, "prompt needs instructions");
  std::string out;
  if (variant == PromptVariant::kHeavy) {
    if (metadata == nullptr || metadata->description.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "heavy prompt needs dataset metadata");
    }
    out += kHeavyHead;
    out += metadata->description;
    out += "\n\n";
  } else {
    out += kLightHead;
  }
  out += kObject;
  out += features;
  out += kInstructions;
  out += instructions;
  out += kAnswer;
  return out;
}

std::vector<CorpusRecord> BuildRecords(const PreparedSplit& split, const std::vector<Row>& rows,
                                       PromptVariant variant, AugmentationMode mode) {
  if (!split.dataset) throw Error(ErrorKind::kInvalidArgument, "split has no dataset");
  const PreparedDataset& prepared = *split.dataset;
  const Dataset& d = prepared.data;
  if (mode == AugmentationMode::kAugmented && !split.model) {
    throw Error(ErrorKind::kInvalidArgument, "dataset '" + d.id + "' has no fitted augmentor model");
  }
  const std::size_t t = d.TargetIndex();
  const ColumnSchema& target_schema = d.columns[t];
  const std::string details = BuildInstruction(prepared.space);
  const int k = static_cast<int>(prepared.space.size());

  std::vector<CorpusRecord> out;
  out.reserve(rows.size());
  for (const Row& row : rows) {
    const auto cls = prepared.space.ClassOf(row.cells[t], target_schema);
    if (!cls) {
      throw Error(ErrorKind::kInvalidArgument,
                  "row " + std::to_string(row.id) + " of '" + d.id + "' has no target class");
    }
    const AugmentedTarget target = mode == AugmentationMode::kAugmented
                                       ? Augment(*split.model, split.encoder.Transform(row), *cls)
                                       : OneHotTarget(k, *cls);
    CorpusRecord r;
    r.dataset_id = d.id;
    r.row_id = row.id;
    r.variant = variant;
    r.prompt = AssemblePrompt(variant, &prepared.metadata, SerializeFeatures(row, d), details);
    r.reference = SerializeTarget(target);
    r.class_details = details;
    r.num_classes = k;
    r.true_class = *cls;
    r.prompt_length = r.prompt.size();
    out.push_back(std::move(r));
  }
  return out;
}

CorpusManifest EmitCorpus(const std::vector<const PreparedSplit*>& splits, PromptVariant variant,
                          AugmentationMode mode, std::ostream& out,
                          const std::map<std::string, std::uint64_t>& seeds,
                          std::size_t parallelism) {
  std::set<std::string> ids;
  for (const PreparedSplit* s : splits) {
    if (s == nullptr || !s->dataset) throw Error(ErrorKind::kInvalidArgument, "null split in corpus registry");
    if (!ids.insert(s->id()).second) {
      throw Error(ErrorKind::kInvalidArgument, "dataset '" + s->id() + "' appears twice in the corpus");
    }
  }
  std::vector<std::vector<CorpusRecord>> per_split(splits.size());
  ParallelFor(splits.size(), parallelism, [&](std::size_t i) {
    per_split[i] = BuildRecords(*splits[i], splits[i]->train.rows, variant, mode);
  });

  std::vector<const CorpusRecord*> ordered;
  for (const auto& records : per_split) {
    for (const auto& r : records) ordered.push_back(&r);
  }
  std::sort(ordered.begin(), ordered.end(), [](const CorpusRecord* a, const CorpusRecord* b) {
    if (a->dataset_id != b->dataset_id) return a->dataset_id < b->dataset_id;
    return a->row_id < b->row_id;
  });

  CorpusManifest manifest;
  manifest.variant = variant;
  manifest.mode = mode;
  manifest.seeds = seeds;
  for (const auto& id : ids) manifest.per_dataset[id] = 0;
  std::string body;
  for (const CorpusRecord* r : ordered) {
    body += r->ToJsonLine();
    body += '\n';
    ++manifest.per_dataset[r->dataset_id];
  }
  manifest.record_count = ordered.size();
  manifest.content_hash = Sha256Hex(body);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed to write corpus");
  return manifest;
}

}  // namespace tabprompt
