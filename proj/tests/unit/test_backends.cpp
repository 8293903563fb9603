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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "synthetic.hpp"
#include "tabprompt/backends.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/outparse.hpp"
#include "tabprompt/promptgen.hpp"
#include "tabprompt/text.hpp"

using namespace tabprompt;
using nlohmann::json;

namespace {

// Generation server with scripted faults.
class FakeServer {
 public:
  std::atomic<int> failures_left{0};  // next requests answered with 503
  std::atomic<int> generate_calls{0};
  std::atomic<int> batch_calls{0};
  std::atomic<int> concurrent{0};
  std::atomic<int> peak{0};
  bool misaligned = false;
  bool healthy = true;

  FakeServer() {
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.status = healthy ? 200 : 503;
    });
    server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++generate_calls;
      const int now = ++concurrent;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --concurrent;
      if (failures_left.fetch_sub(1) > 0) {
        res.status = 503;
        return;
      }
      const auto j = json::parse(req.body);
      if (j.at("prompt") == "bad") {
        res.status = 400;
        res.set_content("bad prompt", "text/plain");
        return;
      }
      res.set_content(json{{"text", "echo:" + j.at("prompt").get<std::string>()}}.dump(), "application/json");
    });
    server_.Post("/batch_generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++batch_calls;
      if (failures_left.fetch_sub(1) > 0) {
        res.status = 500;
        return;
      }
      const auto j = json::parse(req.body);
      json texts = json::array(), errors = json::array();
      for (const auto& p : j.at("prompts")) {
        if (p == "oom") {
          texts.push_back(nullptr);
          errors.push_back("out of memory");
        } else {
          texts.push_back("echo:" + p.get<std::string>() + "/" + std::to_string(j.at("max_new_tokens").get<int>()));
          errors.push_back(nullptr);
        }
      }
      if (misaligned) texts.erase(texts.begin());
      res.set_content(json{{"texts", texts}, {"errors", errors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

GenerationRequest Req(std::string prompt, std::string id = "d", std::size_t row = 0) {
  GenerationRequest r;
  r.prompt = std::move(prompt);
  r.dataset_id = std::move(id);
  r.row_id = row;
  return r;
}

}  // namespace

TEST_CASE("oracle echoes references") {
  CorpusRecord a;
  a.dataset_id = "d";
  a.row_id = 3;
  a.reference = "class 0: 1.0; class 1: 0.0.";
  OracleBackend oracle(std::vector<CorpusRecord>{a});
  CHECK(oracle.Generate(Req("p", "d", 3)).text == a.reference);
  CHECK(oracle.Generate(Req("p", "d", 3)).backend_id == "oracle");
  CHECK_THROWS_AS(oracle.Generate(Req("p", "d", 4)), Error);
  const std::vector<GenerationRequest> batch = {Req("p", "d", 3), Req("p", "x", 3)};
  const auto items = oracle.BatchGenerate(batch);
  CHECK(items[0].ok());
  CHECK_FALSE(items[1].ok());
  CHECK_FALSE(items[1].error.empty());
}

TEST_CASE("proxy reproduces the ensemble's argmax") {
  auto split = MakeSplit(testing::SyntheticPrepared({.rows = 60}), SplitSpec{0.7, 1});
  FitSplitModel(split);
  ProxyBackend proxy;
  proxy.AddSplit(split);
  for (const Row& r : split.test.rows) {
    const auto text = proxy.Generate(Req("prompt", split.id(), r.id)).text;
    const auto parsed = ParseGeneration(text, split.num_classes());
    CHECK(parsed.status == ParseStatus::kOk);
    CHECK(parsed.predicted_class == split.model->PredictClass(split.encoder.Transform(r)));
  }
  CHECK_THROWS_AS(proxy.Generate(Req("p", "nope", 0)), Error);
  PreparedSplit unfit = MakeSplit(testing::SyntheticPrepared({.rows = 20}), SplitSpec{0.5, 1});
  CHECK_THROWS_AS(proxy.AddSplit(unfit), Error);
}

TEST_CASE("remote generate and health") {
  FakeServer server;
  RemoteBackend remote(RemoteBackendConfig{server.url()});
  CHECK(remote.Healthy());
  const auto r = remote.Generate(Req("hello"));
  CHECK(r.text == "echo:hello");
  CHECK(r.backend_id == "remote");
  server.healthy = false;
  CHECK_FALSE(remote.Healthy());
}

TEST_CASE("remote retries server errors then gives up") {
  FakeServer server;
  RemoteBackendConfig cfg{server.url()};
  cfg.max_retries = 2;
  RemoteBackend remote(cfg);
  server.failures_left = 2;
  CHECK(remote.Generate(Req("x")).text == "echo:x");
  CHECK(server.generate_calls == 3);

  server.generate_calls = 0;
  server.failures_left = 10;
  try {
    remote.Generate(Req("x"));
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnreachable);
  }
  CHECK(server.generate_calls == 3);
}

TEST_CASE("client errors are not retried") {
  FakeServer server;
  RemoteBackend remote(RemoteBackendConfig{server.url()});
  try {
    remote.Generate(Req("bad"));
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kService);
  }
  CHECK(server.generate_calls == 1);
}

TEST_CASE("unreachable server") {
  RemoteBackendConfig cfg{"http://127.0.0.1:1"};
  cfg.max_retries = 1;
  cfg.timeout = std::chrono::milliseconds(500);
  RemoteBackend remote(cfg);
  CHECK_FALSE(remote.Healthy());
  CHECK_THROWS_AS(remote.Generate(Req("x")), Error);
  const std::vector<GenerationRequest> batch = {Req("a"), Req("b")};
  for (const auto& item : remote.BatchGenerate(batch)) CHECK_FALSE(item.ok());
}

TEST_CASE("batch generation keeps per-item errors") {
  FakeServer server;
  RemoteBackend remote(RemoteBackendConfig{server.url()});
  std::vector<GenerationRequest> batch = {Req("a"), Req("oom"), Req("c")};
  auto items = remote.BatchGenerate(batch);
  REQUIRE(items.size() == 3);
  CHECK(items[0].response->text == "echo:a/64");
  CHECK_FALSE(items[1].ok());
  CHECK(items[1].error == "out of memory");
  CHECK(items[2].response->text == "echo:c/64");
  CHECK(server.batch_calls == 1);

  server.misaligned = true;
  items = remote.BatchGenerate(batch);
  for (const auto& item : items) CHECK_FALSE(item.ok());

  batch[1].max_new_tokens = 5;
  CHECK_THROWS_AS(remote.BatchGenerate(batch), Error);
  CHECK(remote.BatchGenerate(std::span<const GenerationRequest>{}).empty());
}

TEST_CASE("in-flight requests are bounded") {
  FakeServer server;
  RemoteBackendConfig cfg{server.url()};
  cfg.max_in_flight = 2;
  RemoteBackend remote(cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { remote.Generate(Req("x")); });
  for (auto& t : threads) t.join();
  CHECK(server.generate_calls == 8);
  CHECK(server.peak <= 2);
}

TEST_CASE("remote configuration is validated") {
  CHECK_THROWS_AS(RemoteBackend(RemoteBackendConfig{""}), Error);
  RemoteBackendConfig cfg{"http://127.0.0.1:9"};
  cfg.max_in_flight = 0;
  CHECK_THROWS_AS(RemoteBackend{cfg}, Error);
}

TEST_CASE("recorded protocol exchanges replay") {
  const auto exchanges = json::parse(ReadFile(testing::FixturePath("protocol/exchanges.json")));
  httplib::Server server;
  std::mutex mu;
  std::vector<json> seen;
  for (const auto& ex : exchanges) {
    const std::string path = ex.at("path");
    auto reply = [&, ex](const httplib::Request& req, httplib::Response& res) {
      if (!req.body.empty()) {
        std::lock_guard lock(mu);
        seen.push_back(json::parse(req.body));
      }
      res.status = ex.at("status");
      res.set_content(ex.at("response").dump(), "application/json");
    };
    if (ex.at("method") == "GET") {
      server.Get(path, reply);
    } else {
      server.Post(path, reply);
    }
  }
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  {
    RemoteBackend remote(RemoteBackendConfig{"http://127.0.0.1:" + std::to_string(port)});
    CHECK(remote.Healthy());
    GenerationRequest one = Req(exchanges[1].at("request").at("prompt"));
    CHECK(remote.Generate(one).text == exchanges[1].at("response").at("text"));
    std::vector<GenerationRequest> batch = {Req("first"), Req("second")};
    for (auto& r : batch) r.max_new_tokens = 16;
    const auto items = remote.BatchGenerate(batch);
    CHECK(items[0].response->text == "class 0: 1.0; class 1: 0.0.");
    CHECK(items[1].error == "prompt too long");
  }
  server.stop();
  t.join();
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == exchanges[1].at("request"));
  CHECK(seen[1] == exchanges[2].at("request"));
}
