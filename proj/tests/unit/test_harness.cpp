// Copyright 2026 The qzk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "qzk/harness.hpp"

using namespace qzk;
using nlohmann::json;

namespace {

json base_config(const std::string& kind) { return {{"schema", kExperimentSchema}, {"kind", kind}, {"seed", 7}}; }

std::string config_error(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool same_values(const ExperimentRecord& a, const ExperimentRecord& b) {
  auto ja = a.to_json(), jb = b.to_json();
  ja.erase("wall_seconds");
  jb.erase("wall_seconds");
  return ja.dump() == jb.dump();
}

MetricRow row(const char* name, Verdict v, const char* source) {
  MetricRow r;
  r.name = name;
  r.verdict = v;
  r.source = source;
  return r;
}

}  // namespace

TEST_CASE("experiment config validation", "[harness]") {
  SECTION("defaults are valid for every kind") {
    for (const auto& k : experiment_kinds()) CHECK_NOTHROW(ExperimentConfig::defaults(k).validate());
  }
  SECTION("field-level messages, all reported at once") {
    json j = base_config("pqma");
    j["trials"] = 0;
    j["params"] = {{"p", "big"}, {"nonsense", 1}};
    j["extra"] = true;
    const auto msg = config_error(j);
    CHECK(msg.find("trials") != std::string::npos);
    CHECK(msg.find("params.p") != std::string::npos);
    CHECK(msg.find("params.nonsense") != std::string::npos);
    CHECK(msg.find("extra: unknown field") != std::string::npos);
  }
  SECTION("unknown kind and bad schema") {
    CHECK(config_error(base_config("teleport")).find("kind") != std::string::npos);
    json j = base_config("mac");
    j["schema"] = "qzk.experiment/0";
    CHECK(config_error(j).find("schema") != std::string::npos);
  }
  SECTION("ranges and cross-field checks") {
    json j = base_config("pqma");
    j["params"] = {{"p", 10}, {"q", 20}};
    CHECK(config_error(j).find("params.p: must exceed params.q") != std::string::npos);
    j = base_config("uhlmann");
    j["params"] = {{"gamma", 30}};
    CHECK(config_error(j).find("params.gamma") != std::string::npos);
    j["params"] = {{"gamma", 30}, {"enforce_gamma", false}};
    CHECK(config_error(j).empty());
    j = base_config("zk");
    j["params"] = {{"ell", 9}};
    CHECK(config_error(j).find("params.ell: expected an integer in [1, 4]") != std::string::npos);
  }
  SECTION("tolerance overrides") {
    json j = base_config("mac");
    j["tolerance"] = {{"exact", 1e-7}};
    CHECK(ExperimentConfig::from_json(j).tol_exact == 1e-7);
    j["tolerance"] = {{"loose", 1}};
    CHECK(config_error(j).find("tolerance.loose") != std::string::npos);
  }
  SECTION("instance paths resolve against the config directory") {
    const auto dir = std::filesystem::temp_directory_path() / "qzk_harness_test";
    std::filesystem::create_directories(dir);
    { std::ofstream(dir / "base.json") << json{{"schema", kProtocolSchema}, {"generator", "random-perfect"}, {"seed", 3}}.dump(); }
    json j = base_config("collapse");
    j["instance"] = "base.json";
    { std::ofstream(dir / "cfg.json") << j.dump(); }
    const auto cfg = ExperimentConfig::load(dir / "cfg.json");
    CHECK(cfg.instance.at("generator") == "random-perfect");
    CHECK(cfg.echo().at("instance") == "base.json");
    j["instance"] = "missing.json";
    { std::ofstream(dir / "cfg.json") << j.dump(); }
    CHECK_THROWS_AS(ExperimentConfig::load(dir / "cfg.json"), ConfigError);
    std::filesystem::remove_all(dir);
  }
  SECTION("echo fills defaults") {
    const auto e = ExperimentConfig::defaults("mac", 5).echo();
    CHECK(e.at("seed") == 5);
    CHECK(e.at("params").at("t") == 3);
  }
}

TEST_CASE("protocol files", "[harness]") {
  Rng rng(11);
  SECTION("explicit round trip") {
    const auto p = random_perfect_base(rng, 2, 1, 1, 1);
    const auto q = protocol_from_json(json::parse(protocol_to_json(p).dump()));
    REQUIRE(q.rounds() == p.rounds());
    CHECK(max_abs(q.initial - p.initial) < 1e-15);
    for (int r = 0; r < p.rounds(); ++r) CHECK(max_abs(q.verifier_op(r, 0) - p.verifier_op(r, 0)) < 1e-15);
    REQUIRE(q.honest);
    CHECK(run_protocol(q, *q.honest) == Catch::Approx(run_protocol(p, *p.honest)).margin(1e-12));
  }
  SECTION("generator form is seeded") {
    const json j{{"schema", kProtocolSchema}, {"generator", "random"}, {"rounds", 2}, {"seed", 4}};
    CHECK(max_abs(protocol_from_json(j).verifier_op(1, 0) - protocol_from_json(j).verifier_op(1, 0)) == 0.0);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(protocol_from_json(json{{"schema", "nope"}}), ConfigError);
    CHECK_THROWS_AS(protocol_from_json(json{{"schema", kProtocolSchema}, {"generator", "magic"}}), ConfigError);
    CHECK_THROWS_AS(protocol_from_json(json{{"schema", kProtocolSchema}, {"verifier", json::array()}}), ConfigError);
  }
}

TEST_CASE("records and report", "[harness]") {
  ExperimentRecord rec;
  rec.experiment = "toy";
  rec.add(equality_row("a", 0.5, 0.5, 0.0, "oracle:x"));
  rec.add(upper_bound_row("b", 0.9, 1.2, 0.0, "bound:y"));
  rec.add(info_row("c", 3.0, "oracle:x"));
  SECTION("json and csv") {
    const auto back = ExperimentRecord::from_json(json::parse(rec.to_json().dump()));
    CHECK(same_values(rec, back));
    CHECK(back.rows[1].verdict == Verdict::Vacuous);
    const auto csv = rec.to_csv();
    CHECK(csv.rfind("experiment,metric,value,reference,sigma,verdict,source\n", 0) == 0);
    CHECK(csv.find("toy,b,0.90000000000000002,1.2,0,VACUOUS,bound:y") != std::string::npos);
  }
  SECTION("all pass or vacuous exits 0 with a warning count") {
    const auto s = report({rec});
    CHECK(s.exit_code() == kExitOk);
    CHECK(s.vacuous() == 1);
    CHECK(s.table().find("warning: 1 vacuous") != std::string::npos);
  }
  SECTION("one failure exits 1 naming its tag") {
    auto bad = rec;
    bad.add(row("d", Verdict::Fail, "bound:z"));
    const auto s = report({rec, bad});
    CHECK(s.exit_code() == kExitMetricFailure);
    CHECK(s.table().find("FAIL toy/d [bound:z]") != std::string::npos);
    CHECK(s.by_source.at("oracle:x").pass == 2);
  }
  SECTION("no records") { CHECK_THROWS_AS(report({}), PreconditionError); }
  SECTION("unreadable record") { CHECK_THROWS_AS(read_record("/nonexistent/record.json"), ConfigError); }
}

TEST_CASE("experiments run end to end", "[harness]") {
  SECTION("same seed, same values") {
    for (const char* kind : {"mac", "double-open"}) {
      auto cfg = ExperimentConfig::defaults(kind, 3);
      cfg.trials = 300;
      const auto a = run_experiment(cfg), b = run_experiment(cfg);
      CHECK(a.passed());
      CHECK(same_values(a, b));
      cfg.seed = 4;
      CHECK_FALSE(same_values(a, run_experiment(cfg)));
    }
  }
  SECTION("pqma with a vacuous bound") {
    auto cfg = ExperimentConfig::defaults("pqma");
    cfg.params = {{"p", 1000}, {"q", 10}};
    cfg.trials = 200;
    const auto rec = run_experiment(cfg);
    CHECK(rec.count(Verdict::Vacuous) > 0);
    CHECK(report({rec}).exit_code() == kExitOk);
  }
  SECTION("instance errors surface as config errors") {
    auto cfg = ExperimentConfig::defaults("zk");
    cfg.instance = json{{"schema", kProtocolSchema}, {"generator", "random"}, {"seed", 1}};
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    auto mac = ExperimentConfig::defaults("mac");
    mac.params = {{"attack_wire", 7}};
    CHECK_THROWS_AS(run_experiment(mac), ConfigError);
  }
}
