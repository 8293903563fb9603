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

#include <string>

#include "json.hpp"

#include "tabprompt/augmentor.hpp"
#include "tabprompt/encoding.hpp"
#include "tabprompt/mlp.hpp"

namespace tabprompt {

inline constexpr const char* kTreeEnsembleSchema = "tabprompt.tree_ensemble/1";
inline constexpr const char* kMlpSchema = "tabprompt.mlp/1";

struct PersistedEnsemble {
  TargetSpace space;
  OrdinalEncoder encoder;
  TreeEnsembleModel model;
};

struct PersistedMlp {
  TargetSpace space;
  OrdinalEncoder encoder;
  MlpModel model;
};

nlohmann::json ToJson(const TargetSpace& space);
TargetSpace TargetSpaceFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const OrdinalEncoder& encoder);
OrdinalEncoder EncoderFromJson(const nlohmann::json& j);

nlohmann::json EnsembleToJson(const PersistedEnsemble& p);
PersistedEnsemble EnsembleFromJson(const nlohmann::json& j);
nlohmann::json MlpToJson(const PersistedMlp& p);
PersistedMlp MlpFromJson(const nlohmann::json& j);

}  // namespace tabprompt
