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

#pragma once

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qzk/harness/record.hpp"

namespace qzk {

enum ExitCode : int { kExitOk = 0, kExitMetricFailure = 1, kExitConfigError = 2, kExitCapExceeded = 3 };

struct TagSummary {
  std::size_t pass = 0, fail = 0, vacuous = 0, not_applicable = 0;
};

struct ReportSummary {
  std::map<std::string, TagSummary> by_source;
  std::vector<std::string> failing;  // "experiment/metric [source]"
  std::size_t records = 0;

  std::size_t fails() const { return failing.size(); }
  std::size_t vacuous() const {
    std::size_t n = 0;
    for (const auto& [_, t] : by_source) n += t.vacuous;
    return n;
  }
  int exit_code() const { return fails() ? kExitMetricFailure : kExitOk; }

  std::string table() const {
    std::ostringstream os;
    os << std::left << std::setw(40) << "source" << std::right << std::setw(7) << "PASS" << std::setw(7) << "FAIL" << std::setw(9)
       << "VACUOUS" << std::setw(7) << "N/A" << '\n';
    for (const auto& [tag, t] : by_source)
      os << std::left << std::setw(40) << tag << std::right << std::setw(7) << t.pass << std::setw(7) << t.fail << std::setw(9) << t.vacuous
         << std::setw(7) << t.not_applicable << '\n';
    for (const auto& f : failing) os << "FAIL " << f << '\n';
    if (vacuous()) os << "warning: " << vacuous() << " vacuous bound row(s)\n";
    os << records << " record(s), " << fails() << " failure(s)\n";
    return os.str();
  }
};

/// Aggregates verdicts per source tag.
inline ReportSummary report(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw PreconditionError("report: needs at least one record");
  ReportSummary s;
  s.records = records.size();
  for (const auto& rec : records)
    for (const auto& r : rec.rows) {
      auto& t = s.by_source[r.source.empty() ? "(untagged)" : r.source];
      switch (r.verdict) {
        case Verdict::Pass: ++t.pass; break;
        case Verdict::Fail:
          ++t.fail;
          s.failing.push_back(rec.experiment + "/" + r.name + " [" + r.source + "]");
          break;
        case Verdict::Vacuous: ++t.vacuous; break;
        case Verdict::NotApplicable: ++t.not_applicable; break;
      }
    }
  return s;
}

/// Reads a JSON record file; throws ConfigError when unreadable.
inline ExperimentRecord read_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("record '" + path + "': cannot open");
  try {
    return ExperimentRecord::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("record '" + path + "': " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError("record '" + path + "': " + e.what());
  }
}

}  // namespace qzk
