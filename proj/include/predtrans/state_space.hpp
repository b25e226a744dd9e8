#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "predtrans/ast.hpp"
#include "predtrans/error.hpp"
#include "predtrans/evaluate.hpp"
#include "predtrans/formula.hpp"

namespace predtrans {

inline constexpr std::uint64_t kDefaultStateCeiling = 1'000'000;

struct Limits {
  std::uint64_t state_ceiling = kDefaultStateCeiling;
  /// Configurations the oracle may explore per run.
  std::uint64_t config_ceiling = kDefaultStateCeiling;

  /// Defaults, with PREDTRANS_STATE_CEILING overriding the state ceiling.
  static Limits from_environment() {
    Limits limits;
    if (const char* env = std::getenv("PREDTRANS_STATE_CEILING")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0' || v == 0)
        throw Error(std::string("PREDTRANS_STATE_CEILING must be a positive integer, got '") + env + "'");
      limits.state_ceiling = v;
    }
    return limits;
  }
};

/// Product of all domain sizes, or CeilingExceeded once it passes `ceiling`.
inline std::uint64_t state_count(const std::vector<VarDecl>& decls, std::uint64_t ceiling) {
  std::uint64_t n = 1;
  for (const auto& d : decls) {
    auto size = static_cast<std::uint64_t>(d.domain_size);
    if (size == 0) return 0;
    if (n > ceiling / size)
      throw CeilingExceeded("state space of the declared variables exceeds the ceiling of " +
                            std::to_string(ceiling) + " states");
    n *= size;
  }
  if (n > ceiling)
    throw CeilingExceeded("state space exceeds the ceiling of " + std::to_string(ceiling) + " states");
  return n;
}

/// A total assignment of the declared variables, in declaration order.
struct State {
  std::vector<std::int64_t> values;

  auto operator<=>(const State&) const = default;
};

/// Set of states as a membership vector over state indices.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t universe, bool full = false) : bits_(universe, full) {}

  std::size_t universe() const { return bits_.size(); }
  bool contains(std::size_t i) const { return bits_[i]; }
  void insert(std::size_t i) { bits_[i] = true; }
  void erase(std::size_t i) { bits_[i] = false; }

  std::size_t count() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b;
    return n;
  }
  bool empty() const { return count() == 0; }
  bool full() const { return count() == bits_.size(); }

  bool subset_of(const StateSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !o.bits_[i]) return false;
    return true;
  }

  /// Smallest index in this set but not in `o`.
  std::optional<std::size_t> first_not_in(const StateSet& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !o.bits_[i]) return i;
    return std::nullopt;
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  std::vector<bool> bits_;
};

/// The finite state space spanned by a list of declarations. State indices
/// are mixed-radix with the first declared variable most significant, so
/// index order is lexicographic order on states.
class StateSpace {
 public:
  explicit StateSpace(std::vector<VarDecl> decls, const Limits& limits = {})
      : decls_(std::move(decls)), size_(state_count(decls_, limits.state_ceiling)) {}

  const std::vector<VarDecl>& decls() const { return decls_; }
  std::size_t size() const { return static_cast<std::size_t>(size_); }

  State state(std::size_t index) const {
    State s;
    s.values.resize(decls_.size());
    for (std::size_t i = decls_.size(); i-- > 0;) {
      auto d = static_cast<std::size_t>(decls_[i].domain_size);
      s.values[i] = static_cast<std::int64_t>(index % d);
      index /= d;
    }
    return s;
  }

  std::size_t index_of(const State& s) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < decls_.size(); ++i)
      index = index * static_cast<std::size_t>(decls_[i].domain_size) + static_cast<std::size_t>(s.values[i]);
    return index;
  }

  bool in_range(const State& s) const {
    if (s.values.size() != decls_.size()) return false;
    for (std::size_t i = 0; i < decls_.size(); ++i)
      if (s.values[i] < 0 || s.values[i] >= decls_[i].domain_size) return false;
    return true;
  }

  std::optional<std::size_t> position(const std::string& name) const {
    for (std::size_t i = 0; i < decls_.size(); ++i)
      if (decls_[i].name == name) return i;
    return std::nullopt;
  }

  void bind(Evaluator& ev, const State& s, StageRef stage = StageRef::current()) const {
    for (std::size_t i = 0; i < decls_.size(); ++i) ev.bind(FormulaVar::at(decls_[i].name, stage), s.values[i]);
  }

  Valuation valuation(const State& s, StageRef stage = StageRef::current()) const {
    Valuation v;
    for (std::size_t i = 0; i < decls_.size(); ++i) v[FormulaVar::at(decls_[i].name, stage)] = s.values[i];
    return v;
  }

  std::vector<std::pair<std::string, std::int64_t>> named(const State& s) const {
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (std::size_t i = 0; i < decls_.size(); ++i) out.emplace_back(decls_[i].name, s.values[i]);
    return out;
  }

  /// "x=1, y=0"
  std::string to_string(const State& s) const {
    std::string out;
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      if (i) out += ", ";
      out += decls_[i].name + "=" + std::to_string(s.values[i]);
    }
    return out;
  }

  /// "{x=1}, {x=3}" or "{}" when empty.
  std::string to_string(const StateSet& set) const {
    std::string out;
    for (auto i : set.indices()) {
      if (!out.empty()) out += ", ";
      out += "{" + to_string(state(i)) + "}";
    }
    return out.empty() ? "{}" : out;
  }

 private:
  std::vector<VarDecl> decls_;
  std::uint64_t size_;
};

}  // namespace predtrans
