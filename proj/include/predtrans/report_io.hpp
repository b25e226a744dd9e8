#pragma once

// Text and JSON renderings of check reports.

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "predtrans/formula.hpp"
#include "predtrans/report.hpp"

namespace predtrans {

inline constexpr std::size_t kFormulaBudget = 2000;

inline std::string describe_formula(const Precondition& p, std::size_t budget = kFormulaBudget) {
  return to_string(simplify(p.formula), budget);
}

inline nlohmann::ordered_json witness_json(const CheckReport& r) {
  if (!r.witness) return nullptr;
  nlohmann::ordered_json w = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < r.decls.size() && i < r.witness->values.size(); ++i)
    w[r.decls[i].name] = r.witness->values[i];
  return w;
}

inline nlohmann::ordered_json to_json(const CheckReport& r, std::size_t budget = kFormulaBudget) {
  nlohmann::ordered_json j;
  j["claim"] = r.claim;
  j["verdict"] = to_string(r.verdict);
  j["witness"] = witness_json(r);
  j["lhs"] = describe_formula(r.lhs, budget);
  j["rhs"] = describe_formula(r.rhs, budget);
  j["notes"] = r.notes;
  return j;
}

inline std::string to_text(const CheckReport& r, std::size_t budget = kFormulaBudget) {
  std::string out = r.claim + ": " + to_string(r.verdict) + "\n";
  auto side = [&](const char* label, const Precondition& p) {
    out += std::string("  ") + label + ": " + to_string(p.transformer) + " (" + to_string(p.method) +
           ") = " + describe_formula(p, budget) + "\n";
  };
  side("lhs", r.lhs);
  side("rhs", r.rhs);
  if (r.witness) {
    std::string w;
    for (std::size_t i = 0; i < r.decls.size() && i < r.witness->values.size(); ++i)
      w += (i ? ", " : "") + r.decls[i].name + "=" + std::to_string(r.witness->values[i]);
    out += "  witness: {" + w + "}\n";
  }
  if (!r.notes.empty()) out += "  notes: " + r.notes + "\n";
  return out;
}

}  // namespace predtrans
