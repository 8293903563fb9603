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

// tabprompt: turn tabular datasets into instruction corpora and evaluate
// generative predictors on them.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "tabprompt/backends.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/evalharness.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/metadata.hpp"
#include "tabprompt/parallel.hpp"
#include "tabprompt/pipeline.hpp"
#include "tabprompt/promptgen.hpp"
#include "tabprompt/text.hpp"

namespace fs = std::filesystem;
using namespace tabprompt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RunConfig {
  std::string manifest;
  std::string cache_dir = ".tabprompt-cache";
  std::string out = "out";
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t cutoff_seed = 0;
  std::uint64_t train_seed = 0;
  std::string variant = "heavy";
  std::string mode = "augmented";
  std::string backend = "proxy";
  std::string url;
  std::vector<double> ratios;
  std::vector<std::string> baselines;
  double train_ratio = 0.9;
  std::size_t max_rows = kDefaultCutoff;
  std::size_t parallelism = DefaultParallelism();
  int max_new_tokens = kDefaultMaxNewTokens;
  std::string chat_endpoint;
  std::string chat_model = "gpt-3.5-turbo";
  int chat_retries = 1;
  bool no_fallback = false;
};

// Options shared by every subcommand; seeds left unset fall back to --seed.
struct SeedFlags {
  CLI::Option* split = nullptr;
  CLI::Option* cutoff = nullptr;
  CLI::Option* train = nullptr;
};

[[noreturn]] void ConfigError(const std::string& msg) { throw Error(ErrorKind::kConfig, msg); }

void Validate(const RunConfig& c) {
  if (c.manifest.empty()) ConfigError("--manifest is required");
  if (!fs::is_regular_file(c.manifest)) ConfigError("manifest not found: " + c.manifest);
  if (!(c.train_ratio > 0.0 && c.train_ratio < 1.0)) ConfigError("--train-ratio must lie in (0, 1)");
  for (double r : c.ratios) {
    if (!(r > 0.0 && r < 1.0)) ConfigError("ratio " + FormatRoundTrip(r) + " outside (0, 1)");
  }
  if (c.parallelism < 1) ConfigError("--parallelism must be at least 1");
  if (c.max_rows < 1) ConfigError("--max-rows must be at least 1");
  if (c.max_new_tokens < 1) ConfigError("--max-new-tokens must be at least 1");
  if (c.chat_retries < 0) ConfigError("--chat-retries must be >= 0");
  try {
    ParsePromptVariant(c.variant);
    ParseAugmentationMode(c.mode);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
  if (c.backend != "oracle" && c.backend != "proxy" && c.backend != "remote") {
    ConfigError("--backend must be oracle, proxy or remote");
  }
  if (c.backend == "remote" && c.url.empty()) ConfigError("--backend remote needs --url");
  for (const auto& b : c.baselines) {
    if (b != "tree_ensemble" && b != "mlp") ConfigError("unknown baseline '" + b + "'");
  }
}

Manifest ReadManifest(const RunConfig& c) {
  try {
    return LoadManifest(c.manifest);
  } catch (const Error& e) {
    ConfigError(e.what());
  }
}

std::unique_ptr<ChatClient> MakeChatClient(const RunConfig& c) {
  if (c.chat_endpoint.empty()) return nullptr;
  ChatClientConfig cfg;
  cfg.endpoint = c.chat_endpoint;
  cfg.model = c.chat_model;
  cfg.max_retries = c.chat_retries;
  return std::make_unique<HttpChatClient>(cfg);
}

ReformatOptions ReformatOpts(const RunConfig& c) {
  return ReformatOptions{c.chat_retries, !c.no_fallback};
}

std::vector<std::shared_ptr<const PreparedDataset>> Prepare(const RunConfig& c, const Manifest& manifest) {
  const auto datasets = LoadRegistry(manifest, c.parallelism);
  auto client = MakeChatClient(c);
  MetadataCache cache(c.cache_dir);
  return PrepareRegistry(datasets, client.get(), &cache, ReformatOpts(c),
                         PrepareOptions{c.max_rows, c.cutoff_seed}, c.parallelism);
}

void WriteAtomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  WriteFile(tmp.string(), contents);
  fs::rename(tmp, path);
}

void EnsureOutDir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) ConfigError("cannot create output directory " + c.out + ": " + ec.message());
}

std::string TargetKindText(const Dataset& d) {
  if (!d.target_column) return "unset";
  const TargetKind kind = DetectTargetKind(d);
  if (const auto* t = std::get_if<DiscreteTarget>(&kind)) {
    return "discrete(" + std::to_string(t->labels.size()) + ")";
  }
  const auto& t = std::get<ContinuousTarget>(kind);
  return "continuous(" + FormatDecimal(t.min, 6, 1) + ", " + FormatDecimal(t.max, 6, 1) + ")";
}

int CmdIngest(const RunConfig& c) {
  const Manifest manifest = ReadManifest(c);
  const auto datasets = LoadRegistry(manifest, c.parallelism);
  std::printf("%-32s %8s %6s  %-20s %s\n", "dataset", "rows", "cols", "target", "kind");
  for (const auto& d : datasets) {
    std::printf("%-32s %8zu %6zu  %-20s %s\n", d.id.c_str(), d.rows.size(), d.columns.size(),
                d.target_column.value_or("-").c_str(), TargetKindText(d).c_str());
  }
  return kExitOk;
}

int CmdReformat(const RunConfig& c) {
  const Manifest manifest = ReadManifest(c);
  const auto datasets = LoadRegistry(manifest, c.parallelism);
  auto client = MakeChatClient(c);
  MetadataCache cache(c.cache_dir);
  const auto outcomes = ReformatAll(datasets, client.get(), &cache, ReformatOpts(c), c.parallelism);
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& o = outcomes[i];
    std::printf("%-32s target=%-20s source=%-8s cache=%s calls=%d\n", datasets[i].id.c_str(),
                o.value.target.c_str(), std::string(MetadataSourceName(o.source)).c_str(),
                o.cache_hit ? "hit" : "miss", o.service_calls);
  }
  return kExitOk;
}

int CmdBuildCorpus(const RunConfig& c) {
  const Manifest manifest = ReadManifest(c);
  const PromptVariant variant = ParsePromptVariant(c.variant);
  const AugmentationMode mode = ParseAugmentationMode(c.mode);
  EnsureOutDir(c);

  const auto prepared = Prepare(c, manifest);
  std::vector<PreparedSplit> splits(prepared.size());
  ParallelFor(prepared.size(), c.parallelism, [&](std::size_t i) {
    splits[i] = MakeSplit(prepared[i], SplitSpec{c.train_ratio, c.split_seed});
    if (mode == AugmentationMode::kAugmented) FitSplitModel(splits[i], {}, CalibrationParams{3, c.train_seed});
  });
  std::vector<const PreparedSplit*> ptrs;
  for (const auto& s : splits) ptrs.push_back(&s);

  const std::map<std::string, std::uint64_t> seeds = {
      {"split", c.split_seed}, {"cutoff", c.cutoff_seed}, {"train", c.train_seed}};
  std::ostringstream body;
  const CorpusManifest cm = EmitCorpus(ptrs, variant, mode, body, seeds, c.parallelism);

  const std::string stem = "corpus." + std::string(PromptVariantName(variant)) + "." +
                           std::string(AugmentationModeName(mode));
  const fs::path corpus_path = fs::path(c.out) / (stem + ".jsonl");
  WriteAtomically(corpus_path, body.str());
  WriteAtomically(fs::path(c.out) / (stem + ".manifest.json"), cm.ToJson());
  std::printf("%zu records from %zu datasets -> %s\ncontent hash %s\n", cm.record_count,
              cm.per_dataset.size(), corpus_path.string().c_str(), cm.content_hash.c_str());
  return kExitOk;
}

int RunSweep(const RunConfig& c, bool fewshot) {
  const Manifest manifest = ReadManifest(c);
  SweepConfig sweep;
  sweep.variant = ParsePromptVariant(c.variant);
  sweep.split_seed = c.split_seed;
  sweep.train_seed = c.train_seed;
  sweep.parallelism = c.parallelism;
  sweep.max_new_tokens = c.max_new_tokens;
  if (!c.ratios.empty()) {
    sweep.ratios = c.ratios;
  } else if (!fewshot) {
    sweep.ratios = {c.train_ratio};
  }

  std::unique_ptr<RemoteBackend> remote;
  sweep.models.clear();
  if (c.backend == "oracle") sweep.models.push_back(ModelKind::kOracle);
  if (c.backend == "proxy") sweep.models.push_back(ModelKind::kProxy);
  if (c.backend == "remote") {
    try {
      remote = std::make_unique<RemoteBackend>(RemoteBackendConfig{c.url});
    } catch (const Error& e) {
      ConfigError(e.what());
    }
    if (!remote->Healthy()) ConfigError("remote backend at " + c.url + " failed its /health check");
    sweep.remote = remote.get();
    sweep.models.push_back(ModelKind::kRemote);
  }
  std::vector<std::string> baselines = c.baselines;
  if (baselines.empty() && fewshot) baselines = {"tree_ensemble", "mlp"};
  for (const auto& b : baselines) {
    sweep.models.push_back(b == "mlp" ? ModelKind::kMlp : ModelKind::kTreeEnsemble);
  }
  EnsureOutDir(c);

  auto prepared = Prepare(c, manifest);
  if (fewshot && manifest.fewshot_max_rows) {
    std::erase_if(prepared, [&](const auto& d) {
      if (d->data.rows.size() <= *manifest.fewshot_max_rows) return false;
      std::fprintf(stderr, "warning: skipping '%s' (%zu rows > few-shot limit %zu)\n", d->data.id.c_str(),
                   d->data.rows.size(), *manifest.fewshot_max_rows);
      return true;
    });
  }
  if (prepared.empty()) throw Error(ErrorKind::kEmptyDataset, "no datasets left to evaluate");

  const SweepReport report = FewshotSweep(prepared, sweep);
  for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  EmitReport(report, c.out);
  for (const auto& s : report.summary) {
    std::printf("ratio %-5s %-14s datasets=%zu acc mean=%.4f median=%.4f rank mean=%.3f\n",
                FormatRoundTrip(s.train_ratio).c_str(), s.model_id.c_str(), s.datasets, s.accuracy.mean,
                s.accuracy.median, s.rank.mean);
  }
  std::printf("report -> %s\n", (fs::path(c.out) / "report.json").string().c_str());
  return kExitOk;
}

int ExitCodeFor(const Error& e) { return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitRuntime; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build instruction corpora from tabular datasets and evaluate generative predictors."};
  app.name("tabprompt");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML configuration file; flags override its values");

  RunConfig c;
  SeedFlags seeds;
  app.add_option("--manifest", c.manifest, "Dataset manifest (JSON)");
  app.add_option("--cache-dir", c.cache_dir, "Metadata cache directory")->capture_default_str();
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Default for every seed not set explicitly")->capture_default_str();
  seeds.split = app.add_option("--split-seed", c.split_seed, "Train/test split seed");
  seeds.cutoff = app.add_option("--cutoff-seed", c.cutoff_seed, "Row cutoff subsampling seed");
  seeds.train = app.add_option("--train-seed", c.train_seed, "Model training seed");
  app.add_option("--variant", c.variant, "Prompt variant")
      ->check(CLI::IsMember({"heavy", "light"}))
      ->capture_default_str();
  app.add_option("--mode", c.mode, "Reference mode")
      ->check(CLI::IsMember({"augmented", "onehot"}))
      ->capture_default_str();
  app.add_option("--backend", c.backend, "Generative backend")
      ->check(CLI::IsMember({"oracle", "proxy", "remote"}))
      ->capture_default_str();
  app.add_option("--url", c.url, "Remote generation server, e.g. http://127.0.0.1:8000");
  app.add_option("--ratios", c.ratios, "Train ratios (comma separated)")->delimiter(',');
  app.add_option("--baselines", c.baselines, "Baselines to evaluate: tree_ensemble, mlp")->delimiter(',');
  app.add_option("--train-ratio", c.train_ratio, "Train fraction for corpus builds")->capture_default_str();
  app.add_option("--max-rows", c.max_rows, "Per-dataset row cutoff")->capture_default_str();
  app.add_option("--parallelism", c.parallelism, "Worker threads")->capture_default_str();
  app.add_option("--max-new-tokens", c.max_new_tokens, "Generation budget")->capture_default_str();
  app.add_option("--chat-endpoint", c.chat_endpoint,
                 "Chat-completions URL for metadata reformatting (key from TABPROMPT_CHAT_API_KEY)");
  app.add_option("--chat-model", c.chat_model, "Chat model name")->capture_default_str();
  app.add_option("--chat-retries", c.chat_retries, "Retries per dataset")->capture_default_str();
  app.add_flag("--no-fallback", c.no_fallback, "Fail instead of using offline metadata");

  auto* ingest = app.add_subcommand("ingest", "Load the manifest and summarize every dataset");
  auto* reformat = app.add_subcommand("reformat", "Reformat dataset metadata into the cache");
  auto* build = app.add_subcommand("build-corpus", "Emit the JSONL instruction corpus");
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a backend at fixed train ratios");
  auto* fewshot = app.add_subcommand("fewshot", "Run the few-shot ratio sweep with baselines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (CLI::Option* o : {seeds.split, seeds.cutoff, seeds.train}) {
    if (o->count() == 0) {
      if (o == seeds.split) c.split_seed = c.seed;
      if (o == seeds.cutoff) c.cutoff_seed = c.seed;
      if (o == seeds.train) c.train_seed = c.seed;
    }
  }

  try {
    Validate(c);
    if (*ingest) return CmdIngest(c);
    if (*reformat) return CmdReformat(c);
    if (*build) return CmdBuildCorpus(c);
    if (*evaluate) return RunSweep(c, false);
    if (*fewshot) return RunSweep(c, true);
  } catch (const Error& e) {
    std::fprintf(stderr, "tabprompt: %s error: %s\n", std::string(ErrorKindName(e.kind())).c_str(), e.what());
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tabprompt: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitConfig;
}
