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

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qzk/core/types.hpp"

namespace qzk {

inline constexpr const char* kVersion = "0.1.0";

enum class Verdict { Pass, Fail, Vacuous, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Vacuous: return "VACUOUS";
    case Verdict::NotApplicable: return "NOT-APPLICABLE";
  }
  return "?";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "PASS") return Verdict::Pass;
  if (s == "FAIL") return Verdict::Fail;
  if (s == "VACUOUS") return Verdict::Vacuous;
  if (s == "NOT-APPLICABLE") return Verdict::NotApplicable;
  throw ConfigError("unknown verdict '" + s + "'");
}

/// One checked quantity. `source` names where the reference comes from:
/// "bound:<name>" for a closed-form bound, "oracle:<name>" for an
/// independent computation, "identity:<name>" for an exact identity.
struct MetricRow {
  std::string name;
  double value = 0.0;
  std::optional<double> reference;
  double sigma = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string source;
};

/// Binomial standard error.
inline double binomial_sigma(double p, std::size_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1 - p)) / static_cast<double>(trials));
}

/// value <= bound + 3 sigma + tol; bounds above 1 are vacuous.
inline MetricRow upper_bound_row(std::string name, double value, double bound, double sigma, std::string source, double tol = 1e-9) {
  MetricRow r{std::move(name), value, bound, sigma, Verdict::Pass, std::move(source)};
  if (bound >= 1.0)
    r.verdict = Verdict::Vacuous;
  else
    r.verdict = value <= bound + 3 * sigma + tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

/// value >= bound - 3 sigma - tol.
inline MetricRow lower_bound_row(std::string name, double value, double bound, double sigma, std::string source, double tol = 1e-9) {
  MetricRow r{std::move(name), value, bound, sigma, Verdict::Pass, std::move(source)};
  r.verdict = value >= bound - 3 * sigma - tol ? Verdict::Pass : Verdict::Fail;
  return r;
}

/// Recorded but not asserted.
inline MetricRow info_row(std::string name, double value, std::string source, std::optional<double> reference = std::nullopt) {
  return {std::move(name), value, reference, 0.0, Verdict::NotApplicable, std::move(source)};
}

/// |value - reference| <= max(3 sigma, tol).
inline MetricRow equality_row(std::string name, double value, double reference, double sigma, std::string source, double tol = 1e-9) {
  MetricRow r{std::move(name), value, reference, sigma, Verdict::Pass, std::move(source)};
  r.verdict = std::abs(value - reference) <= std::max(3 * sigma, tol) ? Verdict::Pass : Verdict::Fail;
  return r;
}

struct ExperimentRecord {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  std::vector<MetricRow> rows;
  double wall_seconds = 0.0;
  std::string version = kVersion;

  void add(MetricRow r) { rows.push_back(std::move(r)); }

  std::size_t count(Verdict v) const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.verdict == v;
    return n;
  }
  bool passed() const { return count(Verdict::Fail) == 0; }

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j = {{"name", r.name}, {"value", r.value}, {"sigma", r.sigma}, {"verdict", to_string(r.verdict)}, {"source", r.source}};
      j["reference"] = r.reference ? nlohmann::json(*r.reference) : nlohmann::json(nullptr);
      rs.push_back(j);
    }
    return {{"schema", "qzk.record/1"}, {"experiment", experiment}, {"version", version}, {"config", config},
            {"wall_seconds", wall_seconds}, {"rows", rs}};
  }

  static ExperimentRecord from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "qzk.record/1") throw ConfigError("record: missing or unknown schema");
    ExperimentRecord rec;
    rec.experiment = j.at("experiment").get<std::string>();
    rec.version = j.value("version", "");
    rec.config = j.value("config", nlohmann::json::object());
    rec.wall_seconds = j.value("wall_seconds", 0.0);
    for (const auto& r : j.at("rows")) {
      MetricRow m;
      m.name = r.at("name").get<std::string>();
      m.value = r.at("value").get<double>();
      if (!r.at("reference").is_null()) m.reference = r.at("reference").get<double>();
      m.sigma = r.value("sigma", 0.0);
      m.verdict = verdict_from_string(r.at("verdict").get<std::string>());
      m.source = r.value("source", "");
      rec.rows.push_back(std::move(m));
    }
    return rec;
  }

  /// Flat rows: experiment,name,value,reference,sigma,verdict,source.
  std::string to_csv(bool header = true) const {
    std::ostringstream os;
    os << std::setprecision(17);
    if (header) os << "experiment,metric,value,reference,sigma,verdict,source\n";
    for (const auto& r : rows) {
      os << experiment << ',' << r.name << ',' << r.value << ',';
      if (r.reference) os << *r.reference;
      os << ',' << r.sigma << ',' << to_string(r.verdict) << ',' << r.source << '\n';
    }
    return os.str();
  }
};

}  // namespace qzk
