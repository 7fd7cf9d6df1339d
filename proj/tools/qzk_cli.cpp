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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qzk/harness.hpp"

namespace {

struct RunOptions {
  std::string config, out, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::vector<std::string> params;
};

/// "key=value"; the value is parsed as JSON, else taken as a string.
void apply_param(qzk::ExperimentConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw qzk::ConfigError("invalid config:\n  --param: expected key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), raw = kv.substr(eq + 1);
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    v = raw;
  }
  cfg.params[key] = v;
}

int run_kind(const std::string& kind, const RunOptions& o) {
  qzk::ExperimentConfig cfg = o.config.empty() ? qzk::ExperimentConfig::defaults(kind) : qzk::ExperimentConfig::load(o.config);
  if (cfg.kind != kind)
    throw qzk::ConfigError("invalid config:\n  kind: config is for '" + cfg.kind + "' but the subcommand is '" + kind + "'");
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  for (const auto& kv : o.params) apply_param(cfg, kv);
  const std::string out = o.out.empty() ? cfg.output : o.out;

  const auto rec = qzk::run_experiment(cfg);
  const std::string text = o.format == "csv" ? rec.to_csv() : rec.to_json().dump(2) + "\n";
  std::ostream* summary = &std::cout;
  if (out.empty() || out == "-") {
    std::cout << text;
    summary = &std::cerr;
  } else {
    std::ofstream f(out);
    if (!f) throw qzk::ConfigError("invalid config:\n  output: cannot write '" + out + "'");
    f << text;
  }
  const auto s = qzk::report({rec});
  *summary << kind << ": " << rec.rows.size() << " rows, " << rec.count(qzk::Verdict::Pass) << " PASS, " << s.fails() << " FAIL, "
           << s.vacuous() << " VACUOUS (" << rec.wall_seconds << " s)\n";
  for (const auto& f : s.failing) *summary << "FAIL " << f << '\n';
  return s.exit_code();
}

int run_report(const std::vector<std::string>& files) {
  std::vector<qzk::ExperimentRecord> recs;
  for (const auto& f : files) recs.push_back(qzk::read_record(f));
  const auto s = qzk::report(recs);
  std::cout << s.table();
  return s.exit_code();
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const qzk::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qzk::kExitCapExceeded;
  } catch (const qzk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qzk::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qzk: simulator and verification harness for quantum zero-knowledge protocols"};
  app.set_version_flag("--version", std::string(qzk::kVersion));
  app.require_subcommand(1);

  RunOptions opt;
  std::vector<std::string> record_files;
  std::string chosen;
  int code = 0;
  for (const auto& kind : qzk::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", opt.config, "experiment config (qzk.experiment/1)")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "master seed (overrides config)");
    sub->add_option("--trials", opt.trials, "Monte-Carlo trials (overrides config)");
    sub->add_option("--out", opt.out, "output path; '-' or omitted writes to stdout");
    sub->add_option("--format", opt.format, "record format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--param", opt.params, "override a parameter, key=value (repeatable)");
    sub->callback([&, kind] { chosen = kind; });
  }
  auto* rep = app.add_subcommand("report", "summarize JSON records by source tag");
  rep->add_option("records", record_files, "record files")->required();
  rep->callback([&] { chosen = "report"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qzk::kExitConfigError;
  }
  code = guarded([&] { return chosen == "report" ? run_report(record_files) : run_kind(chosen, opt); });
  return code;
}
