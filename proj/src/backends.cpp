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

#include "tabprompt/backends.hpp"

#include <httplib.h>

#include "json.hpp"

#include "tabprompt/error.hpp"
#include "tabprompt/pipeline.hpp"

namespace tabprompt {
namespace {

using Clock = std::chrono::steady_clock;

std::chrono::microseconds Since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
}

void CheckRequest(const GenerationRequest& r) {
  if (r.prompt.empty()) throw Error(ErrorKind::kInvalidArgument, "generation prompt is empty");
  if (r.max_new_tokens < 1) throw Error(ErrorKind::kInvalidArgument, "max_new_tokens must be at least 1");
}

std::unique_ptr<httplib::Client> MakeClient(const std::string& url, std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(url);
  if (!client->is_valid()) throw Error(ErrorKind::kConfig, "invalid backend url '" + url + "'");
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

}  // namespace

std::vector<BatchItem> Backend::BatchGenerate(std::span<const GenerationRequest> requests) {
  std::vector<BatchItem> out(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    try {
      out[i].response = Generate(requests[i]);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
  }
  return out;
}

OracleBackend::OracleBackend(std::span<const CorpusRecord> records) {
  for (const auto& r : records) Add(r);
}

void OracleBackend::Add(const CorpusRecord& record) {
  references_[{record.dataset_id, record.row_id}] = record.reference;
}

GenerationResponse OracleBackend::Generate(const GenerationRequest& request) {
  const auto start = Clock::now();
  CheckRequest(request);
  auto it = references_.find({request.dataset_id, request.row_id});
  if (it == references_.end()) {
    throw Error(ErrorKind::kNotFound, "no reference for " + request.dataset_id + "#" +
                                          std::to_string(request.row_id));
  }
  return {it->second, Since(start), id()};
}

void ProxyBackend::AddSplit(const PreparedSplit& split) {
  if (!split.model) throw Error(ErrorKind::kInvalidArgument, "split '" + split.id() + "' has no fitted model");
  std::map<std::size_t, std::vector<double>> rows;
  for (const Row& r : split.train.rows) rows[r.id] = split.encoder.Transform(r);
  for (const Row& r : split.test.rows) rows[r.id] = split.encoder.Transform(r);
  Add(split.id(), std::make_shared<const TreeEnsembleModel>(*split.model), std::move(rows));
}

void ProxyBackend::Add(const std::string& dataset_id, std::shared_ptr<const TreeEnsembleModel> model,
                       std::map<std::size_t, std::vector<double>> encoded_rows) {
  if (!model) throw Error(ErrorKind::kInvalidArgument, "null proxy model");
  entries_[dataset_id] = Entry{std::move(model), std::move(encoded_rows)};
}

GenerationResponse ProxyBackend::Generate(const GenerationRequest& request) {
  const auto start = Clock::now();
  CheckRequest(request);
  auto e = entries_.find(request.dataset_id);
  if (e == entries_.end()) throw Error(ErrorKind::kNotFound, "proxy has no dataset '" + request.dataset_id + "'");
  auto r = e->second.rows.find(request.row_id);
  if (r == e->second.rows.end()) {
    throw Error(ErrorKind::kNotFound, "proxy has no row " + std::to_string(request.row_id) + " in '" +
                                          request.dataset_id + "'");
  }
  const auto p = e->second.model->PredictProba(r->second);
  return {SerializeTarget(AugmentProbabilities(p, ArgMax(p))), Since(start), id()};
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
  while (!config_.url.empty() && config_.url.back() == '/') config_.url.pop_back();
  if (config_.url.empty()) throw Error(ErrorKind::kConfig, "remote backend needs a url");
  if (config_.max_retries < 0) throw Error(ErrorKind::kConfig, "max_retries must be >= 0");
  if (config_.timeout.count() <= 0) throw Error(ErrorKind::kConfig, "timeout must be positive");
  if (config_.max_in_flight < 1) throw Error(ErrorKind::kConfig, "max_in_flight must be >= 1");
  MakeClient(config_.url, config_.timeout);
  in_flight_ = std::make_unique<std::counting_semaphore<>>(static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

bool RemoteBackend::Healthy() const {
  auto client = MakeClient(config_.url, config_.timeout);
  auto res = client->Get("/health");
  return res && res->status == 200;
}

std::string RemoteBackend::Post(const std::string& path, const std::string& body) {
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};

  auto client = MakeClient(config_.url, config_.timeout);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    auto res = client->Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return res->body;
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
    if (res->status < 500) throw Error(ErrorKind::kService, path + " rejected the request: " + last_error);
  }
  throw Error(ErrorKind::kUnreachable, path + " failed after " + std::to_string(config_.max_retries + 1) +
                                           " attempts: " + last_error);
}

GenerationResponse RemoteBackend::Generate(const GenerationRequest& request) {
  const auto start = Clock::now();
  CheckRequest(request);
  const nlohmann::json body = {{"prompt", request.prompt}, {"max_new_tokens", request.max_new_tokens}};
  const std::string raw = Post("/generate", body.dump());
  try {
    const auto j = nlohmann::json::parse(raw);
    return {j.at("text").get<std::string>(), Since(start), id()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kService, std::string("malformed /generate response: ") + e.what());
  }
}

std::vector<BatchItem> RemoteBackend::BatchGenerate(std::span<const GenerationRequest> requests) {
  std::vector<BatchItem> out(requests.size());
  if (requests.empty()) return out;
  const auto start = Clock::now();
  const int max_new_tokens = requests.front().max_new_tokens;
  nlohmann::json prompts = nlohmann::json::array();
  for (const auto& r : requests) {
    CheckRequest(r);
    if (r.max_new_tokens != max_new_tokens) {
      throw Error(ErrorKind::kInvalidArgument, "batch requests must share max_new_tokens");
    }
    prompts.push_back(r.prompt);
  }
  const nlohmann::json body = {{"prompts", prompts}, {"max_new_tokens", max_new_tokens}};
  std::string raw;
  try {
    raw = Post("/batch_generate", body.dump());
  } catch (const Error& e) {
    for (auto& item : out) item.error = e.what();
    return out;
  }
  nlohmann::json texts, errors;
  try {
    const auto j = nlohmann::json::parse(raw);
    texts = j.at("texts");
    errors = j.value("errors", nlohmann::json::array());
  } catch (const nlohmann::json::exception& e) {
    for (auto& item : out) item.error = std::string("malformed /batch_generate response: ") + e.what();
    return out;
  }
  if (!texts.is_array() || texts.size() != requests.size()) {
    for (auto& item : out) item.error = "/batch_generate returned a misaligned texts array";
    return out;
  }
  const auto latency = Since(start);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (texts[i].is_string()) {
      out[i].response = GenerationResponse{texts[i].get<std::string>(), latency, id()};
    } else if (errors.is_array() && i < errors.size() && errors[i].is_string()) {
      out[i].error = errors[i].get<std::string>();
    } else {
      out[i].error = "no text for item " + std::to_string(i);
    }
  }
  return out;
}

}  // namespace tabprompt
