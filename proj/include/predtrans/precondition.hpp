#pragma once

#include <string>

#include "predtrans/formula.hpp"
#include "predtrans/oracle.hpp"
#include "predtrans/state_space.hpp"

namespace predtrans {

enum class Method { Relational, Structural };
enum class Transformer { Wp, Wlp };

inline const char* to_string(Method m) { return m == Method::Relational ? "relational" : "structural"; }
inline const char* to_string(Transformer t) { return t == Transformer::Wp ? "wp" : "wlp"; }

/// A computed precondition; the formula mentions current-stage variables only.
struct Precondition {
  Formula formula;
  Method method = Method::Relational;
  Transformer transformer = Transformer::Wp;
};

inline StateSet extension(const Precondition& pre, const StateSpace& space) {
  return extension(pre.formula, space);
}

inline StateSet extension(const Precondition& pre, const std::vector<VarDecl>& decls, const Limits& limits = {}) {
  return extension(pre.formula, StateSpace(decls, limits));
}

}  // namespace predtrans
