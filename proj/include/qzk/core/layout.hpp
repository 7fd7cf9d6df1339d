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

#include <algorithm>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "qzk/core/types.hpp"

namespace qzk {

inline constexpr int kDefaultQubitCap = 14;
inline constexpr const char* kQubitCapEnv = "QZK_MAX_QUBITS";

/// Qubit cap, overridable through the QZK_MAX_QUBITS environment variable.
inline int qubit_cap() {
  if (const char* s = std::getenv(kQubitCapEnv)) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0 && v <= 30) return static_cast<int>(v);
    throw ConfigError(std::string(kQubitCapEnv) + ": expected an integer in [1, 30], got '" + s + "'");
  }
  return kDefaultQubitCap;
}

inline void check_cap(int qubits, const std::string& what) {
  const int cap = qubit_cap();
  if (qubits > cap) {
    throw CapExceeded(what + " needs " + std::to_string(qubits) + " qubits; cap is " + std::to_string(cap) +
                      " (set " + kQubitCapEnv + " to raise it)");
  }
}

struct Register {
  std::string name;
  int qubits = 0;
};

/// Ordered list of named registers. Qubit 0 is the most significant bit of
/// the computational-basis index, and registers are laid out in order.
class RegisterLayout {
 public:
  RegisterLayout() = default;

  RegisterLayout(std::initializer_list<Register> regs) : RegisterLayout(std::vector<Register>(regs)) {}

  explicit RegisterLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (regs_[i].qubits < 0) throw RegisterError("register '" + regs_[i].name + "' has negative size");
      if (regs_[i].name.empty()) throw RegisterError("empty register name");
      for (std::size_t j = 0; j < i; ++j)
        if (regs_[j].name == regs_[i].name) throw RegisterError("duplicate register name '" + regs_[i].name + "'");
      total_ += regs_[i].qubits;
    }
    check_cap(total_, "layout");
  }

  int total_qubits() const { return total_; }
  std::size_t dim() const { return pow2(total_); }
  const std::vector<Register>& registers() const { return regs_; }

  bool contains(const std::string& name) const {
    return std::any_of(regs_.begin(), regs_.end(), [&](const Register& r) { return r.name == name; });
  }

  int size(const std::string& name) const { return regs_[index(name)].qubits; }

  int offset(const std::string& name) const {
    int off = 0;
    for (const auto& r : regs_) {
      if (r.name == name) return off;
      off += r.qubits;
    }
    throw RegisterError("unknown register '" + name + "'");
  }

  std::vector<int> qubits(const std::string& name) const {
    std::vector<int> out;
    const int off = offset(name);
    for (int q = 0; q < size(name); ++q) out.push_back(off + q);
    return out;
  }

  /// Qubit positions of several registers, concatenated in the given order.
  std::vector<int> qubits(const std::vector<std::string>& names) const {
    std::vector<int> out;
    for (const auto& n : names) {
      auto q = qubits(n);
      out.insert(out.end(), q.begin(), q.end());
    }
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& r : regs_) out.push_back(r.name);
    return out;
  }

  RegisterLayout concat(const RegisterLayout& other) const {
    std::vector<Register> all = regs_;
    all.insert(all.end(), other.regs_.begin(), other.regs_.end());
    return RegisterLayout(std::move(all));
  }

  /// Layout with the given registers removed (order of the rest preserved).
  RegisterLayout without(const std::vector<std::string>& drop) const {
    for (const auto& d : drop) (void)index(d);
    std::vector<Register> rest;
    for (const auto& r : regs_)
      if (std::find(drop.begin(), drop.end(), r.name) == drop.end()) rest.push_back(r);
    return RegisterLayout(std::move(rest));
  }

  /// Sub-layout holding exactly the named registers, in the given order.
  RegisterLayout select(const std::vector<std::string>& keep) const {
    std::vector<Register> out;
    for (const auto& k : keep) out.push_back(regs_[index(k)]);
    return RegisterLayout(std::move(out));
  }

  bool operator==(const RegisterLayout& o) const {
    if (regs_.size() != o.regs_.size()) return false;
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].name != o.regs_[i].name || regs_[i].qubits != o.regs_[i].qubits) return false;
    return true;
  }
  bool operator!=(const RegisterLayout& o) const { return !(*this == o); }

  std::string describe() const {
    std::string s = "[";
    for (std::size_t i = 0; i < regs_.size(); ++i) {
      if (i) s += ", ";
      s += regs_[i].name + ":" + std::to_string(regs_[i].qubits);
    }
    return s + "]";
  }

 private:
  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < regs_.size(); ++i)
      if (regs_[i].name == name) return i;
    throw RegisterError("unknown register '" + name + "'");
  }

  std::vector<Register> regs_;
  int total_ = 0;
};

}  // namespace qzk
