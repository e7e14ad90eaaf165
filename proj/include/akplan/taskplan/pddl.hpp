// SPDX-License-Identifier: Apache-2.0
//
// Parser for the planning-language subset used by the task layer: STRIPS
// actions with typing and negative preconditions.  Input is s-expression
// text; diagnostics carry line and column.  Unsupported language features
// are rejected explicitly rather than ignored, so a domain that parses here
// means exactly what this planner thinks it means.
//
// Subset summary (requirements :strips, :typing, :negative-preconditions):
//   domain  := (define (domain NAME) (:requirements ...) (:types ...)
//               (:predicates (p ?v - type ...) ...)
//               (:action NAME :parameters (...) :precondition GD :effect EFF))
//   GD      := atom | (not atom) | (and GD ...)
//   problem := (define (problem NAME) (:domain NAME) (:objects ...)
//               (:init atom ...) (:goal GD-positive))
// Symbols are case-insensitive (lower-cased on read).  Goal formulas are
// conjunctions of positive literals.  Action bodies may reference only
// parameter variables, never constants.

#pragma once

#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "akplan/common.hpp"

namespace akplan::pddl {

struct Atom {
  std::string pred;
  std::vector<std::string> args;  // variables (?x) in schemas, objects when ground
};

struct Literal {
  Atom atom;
  bool positive{true};
};

struct ActionSchema {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // (?var, type)
  std::vector<Literal> preconditions;
  std::vector<Literal> effects;  // positive = add, negative = delete
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::unordered_map<std::string, std::string> type_parent;  // type -> parent
  std::unordered_map<std::string, std::vector<std::string>> predicates;
  std::vector<std::string> predicate_order;  // declaration order
  std::vector<ActionSchema> actions;

  [[nodiscard]] bool is_subtype(std::string t, const std::string& of) const {
    while (true) {
      if (t == of) return true;
      if (t == "object") return false;
      const auto it = type_parent.find(t);
      t = it == type_parent.end() ? std::string("object") : it->second;
    }
  }
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<std::pair<std::string, std::string>> objects;  // (name, type)
  std::vector<Atom> init;
  std::vector<Atom> goal;  // conjunction of positive literals
};

struct ParsedTask {
  Domain domain;
  Problem problem;
};

namespace detail {

struct SExpr {
  bool is_list{false};
  std::string text;
  std::vector<SExpr> children;
  int line{0};
  int col{0};
};

inline std::string at(const SExpr& e) {
  return std::to_string(e.line) + ":" + std::to_string(e.col);
}

[[noreturn]] inline void syntax_error(int line, int col,
                                      const std::string& what) {
  fail(ErrorKind::kSchema, "syntax error at " + std::to_string(line) + ":" +
                               std::to_string(col) + ": " + what);
}

[[noreturn]] inline void semantic_error(const SExpr& e,
                                        const std::string& what) {
  fail(ErrorKind::kSchema, "error at " + at(e) + ": " + what);
}

struct Lexer {
  const std::string& text;
  std::size_t pos{0};
  int line{1};
  int col{1};

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_blank() {
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }
};

inline SExpr parse_sexpr(Lexer& lx) {
  lx.skip_blank();
  if (lx.pos >= lx.text.size()) {
    syntax_error(lx.line, lx.col, "unexpected end of input");
  }
  SExpr node;
  node.line = lx.line;
  node.col = lx.col;
  const char c = lx.text[lx.pos];
  if (c == '(') {
    node.is_list = true;
    lx.advance();
    while (true) {
      lx.skip_blank();
      if (lx.pos >= lx.text.size()) {
        syntax_error(node.line, node.col, "unclosed '('");
      }
      if (lx.text[lx.pos] == ')') {
        lx.advance();
        return node;
      }
      node.children.push_back(parse_sexpr(lx));
    }
  }
  if (c == ')') syntax_error(lx.line, lx.col, "unmatched ')'");
  while (lx.pos < lx.text.size()) {
    const char s = lx.text[lx.pos];
    if (s == '(' || s == ')' || s == ';' ||
        std::isspace(static_cast<unsigned char>(s))) {
      break;
    }
    node.text.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(s))));
    lx.advance();
  }
  return node;
}

inline SExpr parse_top(const std::string& text) {
  Lexer lx{text};
  const SExpr top = parse_sexpr(lx);
  lx.skip_blank();
  if (lx.pos < lx.text.size()) {
    syntax_error(lx.line, lx.col, "trailing content after top-level form");
  }
  if (!top.is_list) syntax_error(top.line, top.col, "expected '('");
  return top;
}

inline const SExpr& expect_symbol(const SExpr& e, const std::string& role) {
  if (e.is_list || e.text.empty()) semantic_error(e, "expected " + role);
  return e;
}

// Parses a typed list "n1 n2 - t1 n3 - t2 n4" into (name, type) pairs;
// names without a trailing type default to "object".
inline std::vector<std::pair<std::string, std::string>> typed_list(
    const std::vector<SExpr>& items, std::size_t begin, bool want_variables) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> pending;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& it = items[i];
    expect_symbol(it, "name in typed list");
    if (it.text == "-") {
      if (pending.empty()) semantic_error(it, "dangling '-' in typed list");
      ++i;
      if (i >= items.size()) semantic_error(it, "missing type after '-'");
      const std::string& type = expect_symbol(items[i], "type name").text;
      for (std::string& n : pending) out.emplace_back(std::move(n), type);
      pending.clear();
      continue;
    }
    const bool is_var = it.text[0] == '?';
    if (want_variables && !is_var) {
      semantic_error(it, "expected variable (starting with '?')");
    }
    if (!want_variables && is_var) {
      semantic_error(it, "unexpected variable in object list");
    }
    pending.push_back(it.text);
  }
  for (std::string& n : pending) out.emplace_back(std::move(n), "object");
  return out;
}

inline Atom parse_atom(const SExpr& e) {
  if (!e.is_list || e.children.empty()) {
    semantic_error(e, "expected predicate atom");
  }
  Atom a;
  a.pred = expect_symbol(e.children[0], "predicate name").text;
  if (!a.pred.empty() && a.pred[0] == ':') {
    semantic_error(e.children[0], "expected predicate name, got keyword '" +
                                      a.pred + "'");
  }
  for (std::size_t i = 1; i < e.children.size(); ++i) {
    a.args.push_back(expect_symbol(e.children[i], "argument").text);
  }
  return a;
}

// Flattens (and ...) / (not atom) / atom into a literal list.  Connectives
// outside the subset produce explicit diagnostics.
inline void parse_condition(const SExpr& e, bool allow_negation,
                            std::vector<Literal>& out) {
  if (!e.is_list) semantic_error(e, "expected condition");
  if (e.children.empty()) return;  // () = empty conjunction
  const std::string& head = e.children[0].text;
  if (head == "and") {
    for (std::size_t i = 1; i < e.children.size(); ++i) {
      parse_condition(e.children[i], allow_negation, out);
    }
    return;
  }
  if (head == "not") {
    if (!allow_negation) {
      semantic_error(e, "negative literals are not allowed here");
    }
    if (e.children.size() != 2) {
      semantic_error(e, "'not' takes exactly one atom");
    }
    out.push_back({parse_atom(e.children[1]), false});
    return;
  }
  if (head == "or" || head == "imply" || head == "exists" ||
      head == "forall" || head == "when" || head == "=") {
    semantic_error(e, "unsupported connective '" + head +
                          "' (subset: and / not / atoms)");
  }
  out.push_back({parse_atom(e), true});
}

}  // namespace detail

inline Domain parse_domain(const std::string& text) {
  using namespace detail;
  const SExpr top = parse_top(text);
  if (top.children.size() < 2 || top.children[0].text != "define" ||
      !top.children[1].is_list || top.children[1].children.size() != 2 ||
      top.children[1].children[0].text != "domain") {
    semantic_error(top, "expected (define (domain NAME) ...)");
  }
  Domain d;
  d.name = expect_symbol(top.children[1].children[1], "domain name").text;

  for (std::size_t s = 2; s < top.children.size(); ++s) {
    const SExpr& sec = top.children[s];
    if (!sec.is_list || sec.children.empty()) {
      semantic_error(sec, "expected domain section");
    }
    const std::string& key = sec.children[0].text;
    if (key == ":requirements") {
      for (std::size_t i = 1; i < sec.children.size(); ++i) {
        const std::string& req = sec.children[i].text;
        if (req != ":strips" && req != ":typing" &&
            req != ":negative-preconditions") {
          semantic_error(sec.children[i], "unknown requirement '" + req + "'");
        }
        d.requirements.push_back(req);
      }
    } else if (key == ":types") {
      const auto types = typed_list(sec.children, 1, false);
      for (const auto& [t, parent] : types) {
        d.type_parent[t] = parent;
        if (parent != "object" && !d.type_parent.count(parent)) {
          d.type_parent.emplace(parent, "object");
        }
      }
    } else if (key == ":predicates") {
      for (std::size_t i = 1; i < sec.children.size(); ++i) {
        const Atom proto = parse_atom(sec.children[i]);
        if (d.predicates.count(proto.pred)) {
          semantic_error(sec.children[i],
                         "duplicate predicate '" + proto.pred + "'");
        }
        const auto params = typed_list(sec.children[i].children, 1, true);
        std::vector<std::string> types;
        types.reserve(params.size());
        for (const auto& [v, t] : params) types.push_back(t);
        d.predicates.emplace(proto.pred, std::move(types));
        d.predicate_order.push_back(proto.pred);
      }
    } else if (key == ":action") {
      if (sec.children.size() < 2) semantic_error(sec, "action needs a name");
      ActionSchema a;
      a.name = expect_symbol(sec.children[1], "action name").text;
      for (std::size_t i = 2; i + 1 < sec.children.size(); i += 2) {
        const std::string& field = sec.children[i].text;
        const SExpr& value = sec.children[i + 1];
        if (field == ":parameters") {
          if (!value.is_list) semantic_error(value, "expected parameter list");
          a.params = typed_list(value.children, 0, true);
        } else if (field == ":precondition") {
          parse_condition(value, true, a.preconditions);
        } else if (field == ":effect") {
          parse_condition(value, true, a.effects);
        } else {
          semantic_error(sec.children[i],
                         "unsupported action field '" + field + "'");
        }
      }
      d.actions.push_back(std::move(a));
    } else {
      semantic_error(sec, "unsupported section '" + key + "'");
    }
  }

  // Check that schema bodies reference declared predicates with correct
  // arity and only parameter-bound variables of compatible types.
  for (const ActionSchema& a : d.actions) {
    std::unordered_map<std::string, std::string> var_type;
    for (const auto& [v, t] : a.params) var_type[v] = t;
    const auto check = [&](const std::vector<Literal>& lits) {
      for (const Literal& l : lits) {
        const auto it = d.predicates.find(l.atom.pred);
        require(it != d.predicates.end(), ErrorKind::kSchema,
                "action " + a.name + ": undeclared predicate '" +
                    l.atom.pred + "'");
        require(it->second.size() == l.atom.args.size(), ErrorKind::kSchema,
                "action " + a.name + ": predicate '" + l.atom.pred +
                    "' arity mismatch (expected " +
                    std::to_string(it->second.size()) + ", got " +
                    std::to_string(l.atom.args.size()) + ")");
        for (std::size_t i = 0; i < l.atom.args.size(); ++i) {
          const auto vt = var_type.find(l.atom.args[i]);
          require(vt != var_type.end(), ErrorKind::kSchema,
                  "action " + a.name + ": unbound argument '" +
                      l.atom.args[i] + "' in '" + l.atom.pred + "'");
          require(d.is_subtype(vt->second, it->second[i]), ErrorKind::kSchema,
                  "action " + a.name + ": argument '" + l.atom.args[i] +
                      "' of type " + vt->second + " incompatible with " +
                      it->second[i]);
        }
      }
    };
    check(a.preconditions);
    check(a.effects);
  }
  return d;
}

inline Problem parse_problem(const std::string& text) {
  using namespace detail;
  const SExpr top = parse_top(text);
  if (top.children.size() < 2 || top.children[0].text != "define" ||
      !top.children[1].is_list || top.children[1].children.size() != 2 ||
      top.children[1].children[0].text != "problem") {
    semantic_error(top, "expected (define (problem NAME) ...)");
  }
  Problem p;
  p.name = expect_symbol(top.children[1].children[1], "problem name").text;

  for (std::size_t s = 2; s < top.children.size(); ++s) {
    const SExpr& sec = top.children[s];
    if (!sec.is_list || sec.children.empty()) {
      semantic_error(sec, "expected problem section");
    }
    const std::string& key = sec.children[0].text;
    if (key == ":domain") {
      if (sec.children.size() != 2) semantic_error(sec, "bad :domain");
      p.domain_name = expect_symbol(sec.children[1], "domain name").text;
    } else if (key == ":objects") {
      p.objects = typed_list(sec.children, 1, false);
    } else if (key == ":init") {
      for (std::size_t i = 1; i < sec.children.size(); ++i) {
        if (sec.children[i].is_list && !sec.children[i].children.empty() &&
            sec.children[i].children[0].text == "not") {
          semantic_error(sec.children[i],
                         "negative literals are not allowed in :init "
                         "(closed world)");
        }
        p.init.push_back(parse_atom(sec.children[i]));
      }
    } else if (key == ":goal") {
      if (sec.children.size() != 2) semantic_error(sec, "bad :goal");
      std::vector<Literal> lits;
      parse_condition(sec.children[1], false, lits);
      for (Literal& l : lits) p.goal.push_back(std::move(l.atom));
    } else {
      semantic_error(sec, "unsupported section '" + key + "'");
    }
  }
  return p;
}

// Parses a domain/problem pair and cross-checks the problem against the
// domain: matching domain name, declared object types, declared predicates
// with correct arity, and type-compatible, declared objects in every init
// and goal atom.
inline ParsedTask parse(const std::string& domain_text,
                        const std::string& problem_text) {
  ParsedTask task{parse_domain(domain_text), parse_problem(problem_text)};
  const Domain& d = task.domain;
  const Problem& p = task.problem;
  require(p.domain_name == d.name, ErrorKind::kSchema,
          "problem '" + p.name + "' references domain '" + p.domain_name +
              "', parsed domain is '" + d.name + "'");

  std::unordered_map<std::string, std::string> object_type;
  for (const auto& [o, t] : p.objects) {
    require(t == "object" || d.type_parent.count(t), ErrorKind::kSchema,
            "object '" + o + "' has undeclared type '" + t + "'");
    require(object_type.emplace(o, t).second, ErrorKind::kSchema,
            "duplicate object '" + o + "'");
  }
  const auto check_ground = [&](const Atom& a, const char* where) {
    const auto it = d.predicates.find(a.pred);
    require(it != d.predicates.end(), ErrorKind::kSchema,
            std::string(where) + ": undeclared predicate '" + a.pred + "'");
    require(it->second.size() == a.args.size(), ErrorKind::kSchema,
            std::string(where) + ": predicate '" + a.pred +
                "' arity mismatch (expected " +
                std::to_string(it->second.size()) + ", got " +
                std::to_string(a.args.size()) + ")");
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      const auto ot = object_type.find(a.args[i]);
      require(ot != object_type.end(), ErrorKind::kSchema,
              std::string(where) + ": undeclared object '" + a.args[i] + "'");
      require(d.is_subtype(ot->second, it->second[i]), ErrorKind::kSchema,
              std::string(where) + ": object '" + a.args[i] + "' of type " +
                  ot->second + " incompatible with " + it->second[i]);
    }
  };
  for (const Atom& a : p.init) check_ground(a, ":init");
  for (const Atom& a : p.goal) check_ground(a, ":goal");
  return task;
}

}  // namespace akplan::pddl
