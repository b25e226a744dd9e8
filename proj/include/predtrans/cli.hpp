#pragma once

// The `predtrans` command line. `run` returns the process exit code:
// 0 success or holding claims, 1 when some claim fails, 2 for usage, parse
// and limit errors.

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "predtrans/ast.hpp"
#include "predtrans/checker.hpp"
#include "predtrans/error.hpp"
#include "predtrans/formula.hpp"
#include "predtrans/generator.hpp"
#include "predtrans/parser.hpp"
#include "predtrans/report_io.hpp"
#include "predtrans/smtlib.hpp"
#include "predtrans/transformers.hpp"
#include "predtrans/transition.hpp"

namespace predtrans::cli {

inline constexpr std::size_t kStateListLimit = 256;
inline constexpr std::size_t kPairListLimit = 64;

struct Config {
  std::string command;
  std::string program_path;
  std::optional<std::string> post;
  std::optional<std::uint64_t> unroll;
  std::string method = "structural";
  std::uint64_t seed = 0;
  std::string output = "text";
  std::int64_t domain = 4;
  std::optional<std::string> out_path;
  std::optional<std::string> formula;
  std::optional<std::string> claim;
};

/// Claims run by `theorems` for a program, in order.
inline std::vector<std::string> default_claims(const Program& p) {
  std::vector<std::string> claims{"theorem2", "theorem3", "theorem4", "duality", "agreement-wp", "agreement-wlp"};
  if (p.body->kind == Stmt::Kind::Assign) claims.push_back("lemma1");
  if (p.body->kind == Stmt::Kind::Seq) {
    claims.push_back("lemma2");
    claims.push_back("composition");
  }
  return claims;
}

namespace detail {

struct UsageError : Error {
  using Error::Error;
};

inline std::string location(const std::string& source, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Session {
 public:
  Session(const Config& c, std::ostream& out) : c_(c), out_(out), limits_(Limits::from_environment()) {}

  int dispatch() {
    if (c_.output != "text" && c_.output != "json") throw UsageError("--output must be text or json");
    if (c_.command == "demo-theorem1") return demo();
    load();
    if (c_.command == "wp" || c_.command == "wlp") return transformer();
    if (c_.command == "rho") return rho();
    if (c_.command == "check") return check({c_.claim.value_or("theorem4")});
    if (c_.command == "theorems") return check(c_.claim ? std::vector<std::string>{*c_.claim} : default_claims(program_));
    if (c_.command == "export-smt") return export_smt();
    throw UsageError("unknown command '" + c_.command + "'");
  }

 private:
  Method method() const {
    if (c_.method == "relational") return Method::Relational;
    if (c_.method == "structural") return Method::Structural;
    throw UsageError("--method must be relational or structural");
  }

  void load() {
    if (c_.program_path.empty()) throw UsageError("-p/--program is required for " + c_.command);
    const std::string source = read_file(c_.program_path);
    try {
      program_ = parse_program(source);
    } catch (const ParseError& e) {
      throw UsageError(c_.program_path + ":" + location(source, e.span().start) + ": " + e.message());
    }
    auto diags = validate(program_);
    if (!diags.empty())
      throw UsageError(c_.program_path + ":" + location(source, diags.front().span.start) + ": " +
                       diags.front().message);
    state_count(program_.decls, limits_.state_ceiling);
    bound_ = c_.unroll ? *c_.unroll : default_unroll_bound(program_.decls, limits_);
  }

  Formula post(bool required) {
    if (c_.post) {
      try {
        return parse_formula(*c_.post, program_.decls);
      } catch (const ParseError& e) {
        throw UsageError("--post:" + std::to_string(e.span().start + 1) + ": " + e.message());
      }
    }
    if (required) throw UsageError("--post is required for " + c_.command);
    return generate_post(program_.decls, c_.seed);
  }

  std::string states_text(const StateSpace& space, const StateSet& set) const {
    return space.to_string(set);
  }

  nlohmann::ordered_json states_json(const StateSpace& space, const StateSet& set) const {
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (auto i : set.indices()) {
      nlohmann::ordered_json s = nlohmann::ordered_json::object();
      for (const auto& [name, value] : space.named(space.state(i))) s[name] = value;
      list.push_back(std::move(s));
    }
    return list;
  }

  int transformer() {
    const Transformer t = c_.command == "wp" ? Transformer::Wp : Transformer::Wlp;
    const Method m = method();
    CheckOptions opts;
    opts.method = m;
    opts.unroll_bound = bound_;
    opts.limits = limits_;
    Analysis a(program_, post(true), opts);
    const Precondition& pre = a.pre(t, m);
    const bool exact = a.exact(t, m);
    const std::string formula = describe_formula(pre);
    const bool list = a.space().size() <= kStateListLimit;
    const StateSet& ext = a.ext(t, m);
    if (c_.output == "json") {
      nlohmann::ordered_json j;
      j["transformer"] = to_string(t);
      j["method"] = to_string(m);
      j["unroll_bound"] = bound_;
      j["exact"] = exact;
      j["formula"] = formula;
      j["state_count"] = ext.count();
      j["states"] = list ? states_json(a.space(), ext) : nlohmann::ordered_json(nullptr);
      out_ << j.dump(2) << "\n";
      return 0;
    }
    out_ << to_string(t) << " (" << to_string(m) << ", unroll " << bound_ << (exact ? "" : ", truncated")
         << "): " << formula << "\n";
    if (list)
      out_ << "states: " << states_text(a.space(), ext) << "\n";
    else
      out_ << "states: " << ext.count() << " of " << a.space().size() << " (list omitted)\n";
    if (!exact) out_ << "note: " << a.notes() << "\n";
    return 0;
  }

  int rho() {
    CheckOptions opts;
    opts.unroll_bound = bound_;
    opts.limits = limits_;
    Analysis a(program_, Formula::truth(true), opts);
    const TransitionRelation& tr = a.rho();
    const bool exact = a.rho_exact();
    const std::string formula = to_string(simplify(tr.rho), kFormulaBudget);
    const bool list = a.space().size() <= kPairListLimit;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (list) {
      auto succ = successor_sets(tr, a.space());
      for (std::size_t i = 0; i < succ.size(); ++i)
        for (auto j : succ[i].indices()) pairs.emplace_back(i, j);
    }
    if (c_.output == "json") {
      nlohmann::ordered_json j;
      j["unroll_bound"] = bound_;
      j["exact"] = exact;
      j["formula"] = formula;
      if (list) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (auto [from, to] : pairs) {
          nlohmann::ordered_json p;
          StateSet one(a.space().size());
          one.insert(from);
          p["from"] = states_json(a.space(), one).at(0);
          StateSet other(a.space().size());
          other.insert(to);
          p["to"] = states_json(a.space(), other).at(0);
          arr.push_back(std::move(p));
        }
        j["pairs"] = std::move(arr);
      } else {
        j["pairs"] = nullptr;
      }
      out_ << j.dump(2) << "\n";
      return 0;
    }
    out_ << "rho (unroll " << bound_ << (exact ? "" : ", truncated") << "): " << formula << "\n";
    if (list) {
      out_ << "pairs: " << pairs.size() << "\n";
      for (auto [from, to] : pairs)
        out_ << "  {" << a.space().to_string(a.space().state(from)) << "} -> {"
             << a.space().to_string(a.space().state(to)) << "}\n";
    }
    if (!exact) out_ << "note: " << a.notes() << "\n";
    return 0;
  }

  int emit(const std::vector<CheckReport>& reports) {
    bool failed = std::any_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.fails(); });
    if (c_.output == "json") {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : reports) arr.push_back(to_json(r));
      out_ << arr.dump(2) << "\n";
    } else {
      for (const auto& r : reports) out_ << to_text(r);
    }
    return failed ? 1 : 0;
  }

  int check(const std::vector<std::string>& claims) {
    for (const auto& claim : claims)
      if (std::find(supported_claims().begin(), supported_claims().end(), claim) == supported_claims().end())
        throw UsageError("unknown claim '" + claim + "'");
    CheckOptions opts;
    opts.method = method();
    opts.unroll_bound = bound_;
    opts.limits = limits_;
    Formula p = post(false);
    std::vector<CheckReport> reports;
    for (const auto& claim : claims) reports.push_back(check_theorem(claim, program_, p, opts));
    if (c_.output == "text" && !c_.post) out_ << "post (seed " << c_.seed << "): " << to_string(p) << "\n";
    return emit(reports);
  }

  int demo() {
    if (c_.domain < 1) throw UsageError("--domain must be at least 1");
    std::vector<VarDecl> decls{{"x", c_.domain, {}}};
    auto [first, second] = demonstrate_theorem1(decls, limits_);
    return emit({first, second});
  }

  int export_smt() {
    const std::string which = c_.formula.value_or(c_.post ? "wlp" : "rho");
    Formula f;
    if (which == "rho") {
      f = build_rho(*program_.body, program_.decls, bound_, limits_).rho;
    } else if (which == "wp" || which == "wlp") {
      const Transformer t = which == "wp" ? Transformer::Wp : Transformer::Wlp;
      f = precondition(t, method(), program_, post(true), bound_).formula;
    } else {
      throw UsageError("--formula must be rho, wp or wlp");
    }
    const std::string script = to_smtlib(f, program_.decls);
    if (c_.out_path) {
      std::ofstream file(*c_.out_path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + *c_.out_path + "'");
      file << script;
    } else {
      out_ << script;
    }
    return 0;
  }

  const Config& c_;
  std::ostream& out_;
  Limits limits_;
  Program program_;
  std::uint64_t bound_ = 0;
};

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Weakest (liberal) preconditions of while programs, checked against a finite-state oracle",
               "predtrans"};
  app.require_subcommand(1, 1);

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec commands[] = {
      {"check", "check one claim (--claim, default theorem4) on a program"},
      {"wp", "print the weakest precondition and its states"},
      {"wlp", "print the weakest liberal precondition and its states"},
      {"rho", "print the transition relation"},
      {"theorems", "check every applicable claim on a program"},
      {"demo-theorem1", "show that neither transformer implies the other"},
      {"export-smt", "write rho, wp or wlp as an SMT-LIB script"},
  };
  for (const auto& spec : commands) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->callback([&c, name = std::string(spec.name)] { c.command = name; });
    if (std::string(spec.name) == "demo-theorem1") {
      sub->add_option("--domain", c.domain, "values of x range over 0..N-1")->capture_default_str();
    } else {
      sub->add_option("-p,--program", c.program_path, ".whl program file")->required();
      sub->add_option("--unroll", c.unroll, "loop unroll bound (default: number of states)");
      sub->add_option("--method", c.method, "relational or structural")->capture_default_str();
    }
    sub->add_option("--output", c.output, "text or json")->capture_default_str();
    const std::string name = spec.name;
    if (name == "wp" || name == "wlp" || name == "check" || name == "theorems" || name == "export-smt")
      sub->add_option("--post", c.post, "postcondition over the program variables");
    if (name == "check" || name == "theorems") {
      sub->add_option("--seed", c.seed, "seed for the generated postcondition when --post is absent");
      sub->add_option("--claim", c.claim, "claim identifier");
    }
    if (name == "export-smt") {
      sub->add_option("--formula", c.formula, "rho, wp or wlp");
      sub->add_option("--out", c.out_path, "output file (default: stdout)");
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    return detail::Session(c, out).dispatch();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace predtrans::cli
