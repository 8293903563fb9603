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

#include "tabprompt/metadata.hpp"

#include <cstdlib>
#include <filesystem>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "tabprompt/parallel.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt {
namespace {

// Template slots, in order: {col}, {metadata}.
constexpr std::string_view kReformatHead = R"tpl(The following is the metadata of a tabular dataset. Return the information for:

    1. the target of the dataset. If no target exists, choose one from the column as target for the dataset to classify.

    2. the features and their explanations, or N/A if there are no explanations. Replace all hyphens and/or underscores with spaces.


Give your output in json. The following is an example output:

'{
'
'    "target": "Age",\n'
'    "metadata": "The target of the dataset is Age. \n Features and their explanations:\n    gender: an animal's gender.\n    weight: an animal's actual weight, in kg." \n '
'}

'
Do NOT respond anything else than the needed information. Make it brief but informative.
Your responses should only be code, without explanation or formatting.


columns:)tpl";
constexpr std::string_view kReformatMiddle = R"tpl(


metadata:)tpl";
constexpr std::string_view kReformatTail = R"tpl(

Provide your response in stringfied JSON format.)tpl";

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfig, "endpoint '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatClient::HttpChatClient(ChatClientConfig config) : config_(std::move(config)) {
  if (config_.timeout.count() <= 0) throw Error(ErrorKind::kConfig, "chat timeout must be positive");
  if (config_.max_retries < 0) throw Error(ErrorKind::kConfig, "chat retries must be >= 0");
  SplitUrl(config_.endpoint);
}

std::string HttpChatClient::Complete(const std::string& prompt) {
  const auto url = SplitUrl(config_.endpoint);
  httplib::Client client(url.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body = {
      {"model", config_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::kUnreachable, "chat service unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kService, "chat service returned HTTP " + std::to_string(res->status));
  }
  try {
    auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kService, std::string("unexpected chat response: ") + e.what());
  }
}

std::string BuildReformatPrompt(std::string_view raw_metadata, const std::vector<std::string>& columns) {
  if (columns.empty()) throw Error(ErrorKind::kInvalidArgument, "reformat prompt needs at least one column");
  std::string out;
  out += kReformatHead;
  out += Join(columns, ",");
  out += kReformatMiddle;
  out += raw_metadata;
  out += kReformatTail;
  return out;
}

ReformattedMetadata ParseReformatResponse(std::string_view response,
                                          const std::vector<std::string>& columns) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(Trim(response));
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kParse, "reformat response is not JSON");
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "reformat response is not a JSON object");
  for (const char* field : {"target", "metadata"}) {
    if (!doc.contains(field) || !doc[field].is_string()) {
      throw Error(ErrorKind::kParse, std::string("reformat response lacks string field '") + field + "'");
    }
  }
  const auto target = doc["target"].get<std::string>();
  auto column = MatchColumn(target, columns);
  if (!column) throw Error(ErrorKind::kNotFound, "reformat target '" + target + "' matches no column");
  auto description = doc["metadata"].get<std::string>();
  if (Trim(description).empty()) throw Error(ErrorKind::kParse, "reformat description is empty");
  return {*column, std::move(description)};
}

ReformattedMetadata FallbackReformat(const Dataset& d) {
  if (d.columns.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "dataset '" + d.id + "' needs at least two columns");
  }
  const std::string target = d.target_column.value_or(d.columns.back().name);
  std::string description = "The target of the dataset is " + NormalizeColumnName(target) + ".";
  for (const auto& col : d.columns) {
    if (col.name == target) continue;
    description += "\n" + NormalizeColumnName(col.name) + ": N/A";
  }
  return {target, std::move(description)};
}

std::string_view MetadataSourceName(MetadataSource source) {
  return source == MetadataSource::kService ? "service" : "fallback";
}

MetadataCache::MetadataCache(std::string directory) : directory_(std::move(directory)) {}

std::string MetadataCache::ContentKey(const Dataset& d) {
  std::string material = d.raw_metadata;
  material += '\0';
  material += Join(d.ColumnNames(), "\x1f");
  material += '\0';
  material += d.target_column.value_or("");
  return Sha256Hex(material);
}

std::string MetadataCache::PathFor(const std::string& dataset_id) const {
  std::string name = dataset_id;
  for (char& c : name) {
    if (c == '/' || c == '\\') c = '_';
  }
  return (std::filesystem::path(directory_) / (name + ".json")).string();
}

std::optional<CachedMetadata> MetadataCache::Get(const Dataset& d) const {
  std::lock_guard lock(mu_);
  const auto path = PathFor(d.id);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto doc = nlohmann::json::parse(ReadFile(path));
    if (doc.value("key", "") != ContentKey(d)) return std::nullopt;
    CachedMetadata entry;
    entry.value.target = doc.at("target").get<std::string>();
    entry.value.description = doc.at("description").get<std::string>();
    entry.source = doc.at("source").get<std::string>() == "service" ? MetadataSource::kService
                                                                     : MetadataSource::kFallback;
    return entry;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable entries are rebuilt
  }
}

void MetadataCache::Put(const Dataset& d, const CachedMetadata& entry) {
  std::lock_guard lock(mu_);
  std::filesystem::create_directories(directory_);
  nlohmann::json doc = {
      {"key", ContentKey(d)},
      {"target", entry.value.target},
      {"description", entry.value.description},
      {"source", MetadataSourceName(entry.source)},
  };
  // Write-then-rename so readers never see a partial file.
  const auto path = PathFor(d.id);
  const auto tmp = path + ".tmp";
  WriteFile(tmp, doc.dump(2) + "\n");
  std::filesystem::rename(tmp, path);
}

ReformatOutcome Reformat(const Dataset& d, ChatClient* client, MetadataCache* cache,
                         const ReformatOptions& options) {
  ReformatOutcome outcome;
  if (cache) {
    if (auto hit = cache->Get(d)) {
      outcome.value = std::move(hit->value);
      outcome.source = hit->source;
      outcome.cache_hit = true;
      return outcome;
    }
  }
  const auto columns = d.ColumnNames();
  std::string last_error = "no chat client configured";
  if (client) {
    const std::string prompt = BuildReformatPrompt(d.raw_metadata, columns);
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      ++outcome.service_calls;
      try {
        auto parsed = ParseReformatResponse(client->Complete(prompt), columns);
        // A manifest hint outranks the service's choice of target.
        if (d.target_column) parsed.target = *d.target_column;
        outcome.value = std::move(parsed);
        outcome.source = MetadataSource::kService;
        if (cache) cache->Put(d, {outcome.value, outcome.source});
        return outcome;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
  }
  if (!options.allow_fallback) {
    throw Error(ErrorKind::kUnreachable, "metadata for '" + d.id + "' unavailable: " + last_error);
  }
  outcome.value = FallbackReformat(d);
  outcome.source = MetadataSource::kFallback;
  if (cache) cache->Put(d, {outcome.value, outcome.source});
  return outcome;
}

std::vector<ReformatOutcome> ReformatAll(const std::vector<Dataset>& datasets, ChatClient* client,
                                         MetadataCache* cache, const ReformatOptions& options,
                                         std::size_t parallelism) {
  std::vector<ReformatOutcome> out(datasets.size());
  ParallelFor(datasets.size(), parallelism,
              [&](std::size_t i) { out[i] = Reformat(datasets[i], client, cache, options); });
  return out;
}

}  // namespace tabprompt
