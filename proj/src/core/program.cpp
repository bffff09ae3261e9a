#include "core/program.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace dmln {

namespace {

bool bare_constant_ok(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isupper(static_cast<unsigned char>(s[0])) ||
        std::isdigit(static_cast<unsigned char>(s[0]))))
    return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
      return false;
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string term_to_string(const MLNProgram& program, const Clause& clause,
                           const Term& t, int domain) {
  if (t.is_var) return clause.vars[t.index].name;
  const std::string& name = program.symbols.constant_name(domain, t.index);
  return bare_constant_ok(name) ? name : quote(name);
}

}  // namespace

std::string literal_to_string(const MLNProgram& program, const Clause& clause,
                              const Literal& lit) {
  std::ostringstream os;
  if (!lit.positive) os << '!';
  os << program.predicates[lit.predicate].name << '(';
  const PredicateSchema& schema = program.predicates[lit.predicate];
  for (size_t i = 0; i < lit.args.size(); ++i) {
    if (i) os << ", ";
    os << term_to_string(program, clause, lit.args[i], schema.domains[i]);
  }
  os << ')';
  return os.str();
}

std::string clause_to_string(const MLNProgram& program, const Clause& clause) {
  std::ostringstream os;
  if (is_hard(clause.weight)) {
    os << "inf";
  } else {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", clause.weight);
    os << buf;
  }
  os << ": ";

  // A constant in a constraint takes the domain of the term on the other
  // side (constraint safety guarantees the other side pins a domain).
  auto constraint_term = [&](const Term& t, const Term& other) -> std::string {
    if (t.is_var) return clause.vars[t.index].name;
    int dom = other.is_var ? clause.vars[other.index].domain : -1;
    if (dom < 0) return "?";
    const std::string& name = program.symbols.constant_name(dom, t.index);
    return bare_constant_ok(name) ? name : quote(name);
  };

  bool any_body = false;
  for (const Literal& lit : clause.literals) any_body = any_body || !lit.is_head;
  for (const EqConstraint& c : clause.constraints)
    any_body = any_body || !c.is_head;

  if (any_body) {
    // body conjuncts print with the clause sign inverted
    bool first = true;
    for (const Literal& lit : clause.literals) {
      if (lit.is_head) continue;
      if (!first) os << ", ";
      first = false;
      Literal flipped = lit;
      flipped.positive = !flipped.positive;
      os << literal_to_string(program, clause, flipped);
    }
    for (const EqConstraint& c : clause.constraints) {
      if (c.is_head) continue;
      if (!first) os << ", ";
      first = false;
      os << constraint_term(c.lhs, c.rhs) << (c.equal ? " != " : " = ")
         << constraint_term(c.rhs, c.lhs);
    }
    os << " => ";
  }
  bool first = true;
  for (const Literal& lit : clause.literals) {
    if (any_body && !lit.is_head) continue;
    if (!first) os << " v ";
    first = false;
    os << literal_to_string(program, clause, lit);
  }
  for (const EqConstraint& c : clause.constraints) {
    if (any_body && !c.is_head) continue;
    if (!first) os << " v ";
    first = false;
    os << constraint_term(c.lhs, c.rhs) << (c.equal ? " = " : " != ")
       << constraint_term(c.rhs, c.lhs);
  }
  if (!clause.task_annotation.empty()) os << " @task(" << clause.task_annotation << ")";
  return os.str();
}

std::vector<int> head_query_predicates(const MLNProgram& program,
                                       const Clause& clause) {
  std::set<int> out;
  for (const Literal& lit : clause.literals)
    if (lit.is_head && program.is_query(lit.predicate)) out.insert(lit.predicate);
  return {out.begin(), out.end()};
}

void validate_program(const MLNProgram& program) {
  for (const Clause& clause : program.rules) {
    if (std::isinf(clause.weight) && clause.weight < 0)
      throw SemanticError("negative infinite weight is not allowed");
    if (std::isnan(clause.weight)) throw SemanticError("NaN rule weight");
    std::set<int> vars_in_literals;
    for (const Literal& lit : clause.literals) {
      if (lit.predicate < 0 ||
          lit.predicate >= static_cast<int>(program.predicates.size()))
        throw SemanticError("undeclared predicate in rule");
      const PredicateSchema& schema = program.predicates[lit.predicate];
      if (static_cast<int>(lit.args.size()) != schema.arity())
        throw SemanticError(cat("arity mismatch for predicate ", schema.name));
      for (const Term& t : lit.args)
        if (t.is_var) vars_in_literals.insert(t.index);
    }
    for (const EqConstraint& c : clause.constraints) {
      for (const Term* t : {&c.lhs, &c.rhs})
        if (t->is_var && !vars_in_literals.count(t->index))
          throw SemanticError(
              "constraint variable does not appear in any literal");
    }
  }
  for (const EvidenceAtom& ev : program.evidence) {
    const PredicateSchema& schema = program.predicates[ev.predicate];
    if (schema.kind != PredicateKind::Evidence)
      throw SemanticError(
          cat("evidence given for query relation ", schema.name));
    if (static_cast<int>(ev.constants.size()) != schema.arity())
      throw SemanticError(cat("evidence arity mismatch for ", schema.name));
  }
}

}  // namespace dmln
