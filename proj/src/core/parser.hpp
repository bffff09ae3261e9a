#pragma once

#include <string>

#include "core/program.hpp"

namespace dmln {

// Program grammar, one declaration per line, `//` comments:
//
//   schema    [*]name(dom1, dom2, ...)        leading * marks a query relation
//   rule      <weight>: <formula> [@task(name)]
//
// where <weight> is a decimal or `inf`, and a formula is either a disjunction
// `d1 v d2 v ...` or an implication `c1, c2, ... => d1 v d2 v ...` or a
// biconditional `a <=> b` between single (possibly negated) literals. A
// disjunct is `[!]pred(t, ...)` or a constraint `t = t` / `t != t`. Lowercase
// identifiers are variables; capitalized, numeric, or double-quoted tokens are
// constants. `a <=> b` expands to the two implications, each keeping the
// rule's weight.
MLNProgram parse_program(const std::string& text);

// Evidence grammar, one ground atom per line: `pred(C1, C2)`. A leading `!`
// marks explicit negative evidence (redundant under the closed-world
// assumption but accepted). Appends to the program in place.
void parse_evidence(const std::string& text, MLNProgram& program);

// Canonical printers; both emit the same grammar the parsers accept, and
// parse(print(parse(x))) is structurally identical to parse(x).
std::string print_program(const MLNProgram& program);
std::string print_evidence(const MLNProgram& program);

}  // namespace dmln
