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

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/promptgen.hpp"

namespace tabprompt {

inline constexpr int kDefaultMaxNewTokens = 64;

struct GenerationRequest {
  std::string prompt;
  int max_new_tokens = kDefaultMaxNewTokens;
  std::string dataset_id;
  std::size_t row_id = 0;
};

struct GenerationResponse {
  std::string text;
  std::chrono::microseconds latency{0};
  std::string backend_id;
};

// One slot of a batch: either a response or an error message.
struct BatchItem {
  std::optional<GenerationResponse> response;
  std::string error;

  bool ok() const { return response.has_value(); }
};

// The generative predictor. Implementations must allow concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual GenerationResponse Generate(const GenerationRequest& request) = 0;
  // Default: Generate() per item, catching errors into the slot.
  virtual std::vector<BatchItem> BatchGenerate(std::span<const GenerationRequest> requests);
};

// Echoes the reference text of the matching corpus record.
class OracleBackend : public Backend {
 public:
  OracleBackend() = default;
  explicit OracleBackend(std::span<const CorpusRecord> records);
  void Add(const CorpusRecord& record);

  std::string id() const override { return "oracle"; }
  GenerationResponse Generate(const GenerationRequest& request) override;

 private:
  std::map<std::pair<std::string, std::size_t>, std::string> references_;
};

// Serializes the tree ensemble's calibrated probabilities for the row named
// by the request. The argmax is kept when rounding, so parsing the text gives
// back the ensemble's own prediction.
class ProxyBackend : public Backend {
 public:
  ProxyBackend() = default;
  // Registers every row of `split` (train and test) under its dataset id.
  void AddSplit(const PreparedSplit& split);
  void Add(const std::string& dataset_id, std::shared_ptr<const TreeEnsembleModel> model,
           std::map<std::size_t, std::vector<double>> encoded_rows);

  std::string id() const override { return "proxy"; }
  GenerationResponse Generate(const GenerationRequest& request) override;

 private:
  struct Entry {
    std::shared_ptr<const TreeEnsembleModel> model;
    std::map<std::size_t, std::vector<double>> rows;
  };
  std::map<std::string, Entry> entries_;
};

struct RemoteBackendConfig {
  std::string url;  // scheme://host:port
  std::chrono::milliseconds timeout{60000};
  int max_retries = 2;
  std::size_t max_in_flight = 8;
};

// HTTP client for the generation server:
//   POST /generate        {"prompt", "max_new_tokens"} -> {"text"}
//   POST /batch_generate  {"prompts": [...], "max_new_tokens"}
//                         -> {"texts": [string|null...], "errors": [string|null...]}
//   GET  /health          -> 200
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);

  std::string id() const override { return "remote"; }
  GenerationResponse Generate(const GenerationRequest& request) override;
  std::vector<BatchItem> BatchGenerate(std::span<const GenerationRequest> requests) override;
  bool Healthy() const;

 private:
  std::string Post(const std::string& path, const std::string& body);

  RemoteBackendConfig config_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace tabprompt
