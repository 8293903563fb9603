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

#include "tabprompt/model_io.hpp"

#include "tabprompt/error.hpp"

namespace tabprompt {
namespace {

using nlohmann::json;

void ExpectSchema(const json& j, const char* schema) {
  if (!j.contains("schema") || j.at("schema") != schema) {
    throw Error(ErrorKind::kParse, std::string("expected model schema ") + schema);
  }
}

json TreeToJson(const RegressionTree& t) {
  return {{"feature", t.feature}, {"threshold", t.threshold}, {"left", t.left},
          {"right", t.right}, {"value", t.value}};
}

RegressionTree TreeFromJson(const json& j) {
  RegressionTree t;
  j.at("feature").get_to(t.feature);
  j.at("threshold").get_to(t.threshold);
  j.at("left").get_to(t.left);
  j.at("right").get_to(t.right);
  j.at("value").get_to(t.value);
  const auto n = t.feature.size();
  if (t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n || n == 0) {
    throw Error(ErrorKind::kParse, "tree node arrays differ in length");
  }
  return t;
}

template <typename Fn>
auto Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad model document: ") + e.what());
  }
}

}  // namespace

json ToJson(const TargetSpace& space) {
  json classes = json::array();
  for (const auto& c : space.classes) classes.push_back({{"label", c.label}, {"explanation", c.explanation}});
  json j = {{"classes", classes}};
  if (const auto* bins = std::get_if<BinnedOrigin>(&space.origin)) {
    j["origin"] = "binned";
    j["edges"] = bins->edges;
  } else {
    j["origin"] = "discrete";
  }
  return j;
}

TargetSpace TargetSpaceFromJson(const json& j) {
  return Guard([&] {
    TargetSpace s;
    for (const auto& c : j.at("classes")) {
      s.classes.push_back({c.at("label").get<std::string>(), c.at("explanation").get<std::string>()});
    }
    const auto origin = j.at("origin").get<std::string>();
    if (origin == "binned") {
      BinnedOrigin b;
      j.at("edges").get_to(b.edges);
      s.origin = b;
    } else if (origin == "discrete") {
      s.origin = DiscreteOrigin{};
    } else {
      throw Error(ErrorKind::kParse, "unknown target origin '" + origin + "'");
    }
    return s;
  });
}

json ToJson(const OrdinalEncoder& encoder) {
  json cols = json::array();
  for (const auto& c : encoder.columns()) {
    cols.push_back({{"name", c.name},
                    {"source_index", c.source_index},
                    {"categorical", c.categorical},
                    {"categories", c.categories}});
  }
  return cols;
}

OrdinalEncoder EncoderFromJson(const json& j) {
  return Guard([&] {
    std::vector<OrdinalEncoder::ColumnCoding> cols;
    for (const auto& c : j) {
      OrdinalEncoder::ColumnCoding col;
      col.name = c.at("name").get<std::string>();
      col.source_index = c.at("source_index").get<std::size_t>();
      col.categorical = c.at("categorical").get<bool>();
      c.at("categories").get_to(col.categories);
      cols.push_back(std::move(col));
    }
    return OrdinalEncoder::FromColumns(std::move(cols));
  });
}

json EnsembleToJson(const PersistedEnsemble& p) {
  const Booster& b = p.model.booster();
  json trees = json::array();
  for (const auto& t : b.trees()) trees.push_back(TreeToJson(t));
  json calibrators = json::array();
  for (const auto& c : p.model.calibrators()) {
    calibrators.push_back({{"breakpoints", c.breakpoints}, {"fitted", c.fitted}});
  }
  return {{"schema", kTreeEnsembleSchema},
          {"target_space", ToJson(p.space)},
          {"encoder", ToJson(p.encoder)},
          {"num_classes", b.num_classes()},
          {"rounds", b.rounds()},
          {"learning_rate", b.learning_rate()},
          {"trees", trees},
          {"calibrators", calibrators}};
}

PersistedEnsemble EnsembleFromJson(const json& j) {
  ExpectSchema(j, kTreeEnsembleSchema);
  return Guard([&] {
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(TreeFromJson(t));
    std::vector<IsotonicFit> calibrators;
    for (const auto& c : j.at("calibrators")) {
      IsotonicFit fit;
      c.at("breakpoints").get_to(fit.breakpoints);
      c.at("fitted").get_to(fit.fitted);
      calibrators.push_back(std::move(fit));
    }
    const int k = j.at("num_classes").get<int>();
    Booster booster = Booster::FromParts(k, j.at("rounds").get<int>(), j.at("learning_rate").get<double>(),
                                         std::move(trees));
    if (!calibrators.empty() && calibrators.size() != static_cast<std::size_t>(k)) {
      throw Error(ErrorKind::kParse, "calibrator count does not match class count");
    }
    return PersistedEnsemble{TargetSpaceFromJson(j.at("target_space")), EncoderFromJson(j.at("encoder")),
                             TreeEnsembleModel(std::move(booster), std::move(calibrators))};
  });
}

json MlpToJson(const PersistedMlp& p) {
  const MlpModel& m = p.model;
  return {{"schema", kMlpSchema},
          {"target_space", ToJson(p.space)},
          {"encoder", ToJson(p.encoder)},
          {"num_inputs", m.num_inputs},
          {"hidden", m.hidden},
          {"num_classes", m.num_classes},
          {"w1", m.w1},
          {"b1", m.b1},
          {"w2", m.w2},
          {"b2", m.b2},
          {"mean", m.mean},
          {"scale", m.scale}};
}

PersistedMlp MlpFromJson(const json& j) {
  ExpectSchema(j, kMlpSchema);
  return Guard([&] {
    MlpModel m;
    m.num_inputs = j.at("num_inputs").get<int>();
    m.hidden = j.at("hidden").get<int>();
    m.num_classes = j.at("num_classes").get<int>();
    j.at("w1").get_to(m.w1);
    j.at("b1").get_to(m.b1);
    j.at("w2").get_to(m.w2);
    j.at("b2").get_to(m.b2);
    j.at("mean").get_to(m.mean);
    j.at("scale").get_to(m.scale);
    const auto in = static_cast<std::size_t>(m.num_inputs);
    const auto h = static_cast<std::size_t>(m.hidden);
    const auto k = static_cast<std::size_t>(m.num_classes);
    if (m.w1.size() != in * h || m.b1.size() != h || m.w2.size() != h * k || m.b2.size() != k ||
        m.mean.size() != in || m.scale.size() != in) {
      throw Error(ErrorKind::kParse, "mlp parameter shapes do not match");
    }
    return PersistedMlp{TargetSpaceFromJson(j.at("target_space")), EncoderFromJson(j.at("encoder")), std::move(m)};
  });
}

}  // namespace tabprompt
