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
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabprompt/ingest.hpp"

namespace tabprompt {

struct ReformattedMetadata {
  std::string target;
  std::string description;

  bool operator==(const ReformattedMetadata&) const = default;
};

enum class MetadataSource { kService, kFallback };

struct ChatClientConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model = "gpt-3.5-turbo";
  std::chrono::milliseconds timeout{30000};
  int max_retries = 1;
  // Read from the environment, never from flags or config files.
  std::string api_key_env = "TABPROMPT_CHAT_API_KEY";
};

// Anything that can answer a single-turn chat prompt.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Throws Error(kUnreachable | kService) on transport failures.
  virtual std::string Complete(const std::string& prompt) = 0;
};

// OpenAI-style chat-completions client: POST {model, messages}, reads
// choices[0].message.content.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(ChatClientConfig config);
  std::string Complete(const std::string& prompt) override;

 private:
  ChatClientConfig config_;
};

std::string BuildReformatPrompt(std::string_view raw_metadata,
                                const std::vector<std::string>& columns);

ReformattedMetadata ParseReformatResponse(std::string_view response,
                                          const std::vector<std::string>& columns);

ReformattedMetadata FallbackReformat(const Dataset& d);

struct CachedMetadata {
  ReformattedMetadata value;
  MetadataSource source = MetadataSource::kService;
};

// One {dataset_id}.json per dataset; an entry is a hit only when its stored
// content key matches the current (raw metadata, columns, target hint) hash.
class MetadataCache {
 public:
  explicit MetadataCache(std::string directory);

  static std::string ContentKey(const Dataset& d);

  std::optional<CachedMetadata> Get(const Dataset& d) const;
  void Put(const Dataset& d, const CachedMetadata& entry);
  const std::string& directory() const { return directory_; }

 private:
  std::string PathFor(const std::string& dataset_id) const;

  std::string directory_;
  mutable std::mutex mu_;
};

struct ReformatOptions {
  int max_retries = 1;
  bool allow_fallback = true;
};

struct ReformatOutcome {
  ReformattedMetadata value;
  MetadataSource source = MetadataSource::kService;
  bool cache_hit = false;
  int service_calls = 0;
};

// Cache first, then the client (1 + max_retries attempts), then fallback.
// `client` may be null, in which case only the cache and fallback are used.
ReformatOutcome Reformat(const Dataset& d, ChatClient* client,
                         MetadataCache* cache, const ReformatOptions& options);

// Runs Reformat over many datasets with at most `parallelism` in flight.
std::vector<ReformatOutcome> ReformatAll(const std::vector<Dataset>& datasets,
                                         ChatClient* client, MetadataCache* cache,
                                         const ReformatOptions& options,
                                         std::size_t parallelism);

std::string_view MetadataSourceName(MetadataSource source);

}  // namespace tabprompt
