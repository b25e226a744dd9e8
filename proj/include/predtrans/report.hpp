#pragma once

#include <optional>
#include <string>
#include <vector>

#include "predtrans/precondition.hpp"
#include "predtrans/state_space.hpp"

namespace predtrans {

enum class Verdict { Holds, Fails, InconclusiveTruncated, SideConditionViolated };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::InconclusiveTruncated: return "inconclusive-truncated";
    case Verdict::SideConditionViolated: return "side-condition-violated";
  }
  return "?";
}

/// Outcome of one extensional comparison. A `fails` verdict always carries
/// a witness state that separates lhs from rhs.
struct CheckReport {
  std::string claim;
  Verdict verdict = Verdict::Holds;
  Precondition lhs;
  Precondition rhs;
  std::optional<State> witness;
  std::string notes;
  std::vector<VarDecl> decls;

  bool holds() const { return verdict == Verdict::Holds; }
  bool fails() const { return verdict == Verdict::Fails; }
};

inline void add_note(CheckReport& r, const std::string& note) {
  if (note.empty()) return;
  if (!r.notes.empty()) r.notes += "; ";
  r.notes += note;
}

}  // namespace predtrans
