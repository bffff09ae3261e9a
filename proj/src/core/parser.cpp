#include "core/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

namespace dmln {

namespace {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int column = 0;
};

// Tokenizes one logical line (comments already stripped).
class LineLexer {
 public:
  LineLexer(const std::string& line, int line_no)
      : line_(line), line_no_(line_no) {
    next();
  }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }

  bool at_end() const { return tok_.kind == TokKind::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_no_, tok_.column);
  }

  Token expect_punct(const std::string& p) {
    if (tok_.kind != TokKind::Punct || tok_.text != p)
      fail(cat("expected '", p, "'"));
    return take();
  }

  bool accept_punct(const std::string& p) {
    if (tok_.kind == TokKind::Punct && tok_.text == p) {
      take();
      return true;
    }
    return false;
  }

  int line_no() const { return line_no_; }

 private:
  void next() {
    while (pos_ < line_.size() &&
           std::isspace(static_cast<unsigned char>(line_[pos_])))
      ++pos_;
    tok_.column = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size()) {
      tok_ = {TokKind::End, "", tok_.column};
      return;
    }
    char c = line_[pos_];
    if (c == '"') {
      std::string s;
      ++pos_;
      while (pos_ < line_.size() && line_[pos_] != '"') {
        if (line_[pos_] == '\\' && pos_ + 1 < line_.size()) ++pos_;
        s += line_[pos_++];
      }
      if (pos_ >= line_.size())
        throw ParseError("unterminated string", line_no_, tok_.column);
      ++pos_;  // closing quote
      tok_ = {TokKind::String, s, tok_.column};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) ||
              line_[pos_] == '_' || line_[pos_] == '.'))
        ++pos_;
      tok_ = {TokKind::Ident, line_.substr(start, pos_ - start), tok_.column};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && pos_ + 1 < line_.size() &&
         (std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])) ||
          line_[pos_ + 1] == '.')) ||
        (c == '.' && pos_ + 1 < line_.size() &&
         std::isdigit(static_cast<unsigned char>(line_[pos_ + 1])))) {
      size_t start = pos_;
      ++pos_;
      while (pos_ < line_.size() &&
             (std::isalnum(static_cast<unsigned char>(line_[pos_])) ||
              line_[pos_] == '.' || line_[pos_] == '+' || line_[pos_] == '-'))
        ++pos_;
      tok_ = {TokKind::Number, line_.substr(start, pos_ - start), tok_.column};
      return;
    }
    // multi-char punctuation first
    static const char* multi[] = {"<=>", "=>", "!="};
    for (const char* m : multi) {
      size_t n = std::strlen(m);
      if (line_.compare(pos_, n, m) == 0) {
        tok_ = {TokKind::Punct, m, tok_.column};
        pos_ += n;
        return;
      }
    }
    tok_ = {TokKind::Punct, std::string(1, c), tok_.column};
    ++pos_;
  }

  const std::string& line_;
  int line_no_;
  size_t pos_ = 0;
  Token tok_;
};

bool is_or_keyword(const Token& t) {
  return t.kind == TokKind::Ident && t.text == "v";
}

bool is_variable_token(const Token& t) {
  return t.kind == TokKind::Ident && !t.text.empty() &&
         std::islower(static_cast<unsigned char>(t.text[0])) && t.text != "v";
}

// One element of a formula: a signed literal or a term (in)equality, with
// terms still unresolved (names only).
struct RawTerm {
  bool is_var = false;
  std::string text;
  int column = 0;
};

struct RawElement {
  bool is_constraint = false;
  bool positive = true;  // for literals; for constraints: true means '='
  bool is_head = true;
  std::string predicate;
  int column = 0;
  std::vector<RawTerm> terms;  // literal args, or the two constraint sides
};

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& text) : text_(text) {}

  MLNProgram run() {
    std::istringstream in(text_);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      strip_comment(line);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      LineLexer lex(line, line_no);
      parse_line(lex);
    }
    validate_program(program_);
    return std::move(program_);
  }

 private:
  static void strip_comment(std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (!in_string && line[i] == '/' && line[i + 1] == '/') {
        line.resize(i);
        return;
      }
    }
  }

  void parse_line(LineLexer& lex) {
    const Token& first = lex.peek();
    if (first.kind == TokKind::Number ||
        (first.kind == TokKind::Ident && first.text == "inf") ||
        (first.kind == TokKind::Punct &&
         (first.text == "-" || first.text == "+"))) {
      parse_rule(lex);
    } else {
      parse_schema(lex);
    }
  }

  void parse_schema(LineLexer& lex) {
    bool query = lex.accept_punct("*");
    Token name = lex.take();
    if (name.kind != TokKind::Ident)
      throw ParseError("expected relation name", lex.line_no(), name.column);
    if (program_.predicate_ids.count(name.text))
      throw ParseError(cat("duplicate schema for ", name.text), lex.line_no(),
                       name.column);
    lex.expect_punct("(");
    PredicateSchema schema;
    schema.name = name.text;
    schema.kind = query ? PredicateKind::Query : PredicateKind::Evidence;
    while (true) {
      Token dom = lex.take();
      if (dom.kind != TokKind::Ident)
        throw ParseError("expected domain name", lex.line_no(), dom.column);
      schema.domains.push_back(program_.symbols.domain_id(dom.text));
      if (lex.accept_punct(")")) break;
      lex.expect_punct(",");
    }
    if (!lex.at_end()) lex.fail("trailing tokens after schema declaration");
    program_.predicate_ids.emplace(schema.name,
                                   static_cast<int>(program_.predicates.size()));
    program_.predicates.push_back(std::move(schema));
  }

  double parse_weight(LineLexer& lex) {
    bool negate = false;
    if (lex.accept_punct("-")) negate = true;
    else lex.accept_punct("+");
    Token w = lex.take();
    if (w.kind == TokKind::Ident && w.text == "inf") {
      if (negate)
        throw ParseError("negative infinite weight is not allowed",
                         lex.line_no(), w.column);
      return kHardWeight;
    }
    if (w.kind != TokKind::Number)
      throw ParseError("expected rule weight", lex.line_no(), w.column);
    char* end = nullptr;
    double value = std::strtod(w.text.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw ParseError(cat("bad weight '", w.text, "'"), lex.line_no(),
                       w.column);
    return negate ? -value : value;
  }

  RawElement parse_element(LineLexer& lex) {
    RawElement el;
    el.column = lex.peek().column;
    bool negated = lex.accept_punct("!");
    const Token& t = lex.peek();
    if (t.kind == TokKind::Ident && !negated) {
      // could be a constraint `x = y` if no '(' follows; look ahead after
      // taking the token.
      Token ident = lex.take();
      if (lex.accept_punct("(")) {
        el.positive = true;
        el.predicate = ident.text;
        parse_args(lex, el);
        return el;
      }
      // constraint starting with a term
      RawTerm lhs{true, ident.text, ident.column};
      lhs.is_var = is_variable_token(ident);
      return parse_constraint_tail(lex, lhs);
    }
    if (negated) {
      Token ident = lex.take();
      if (ident.kind != TokKind::Ident)
        throw ParseError("expected predicate after '!'", lex.line_no(),
                         ident.column);
      lex.expect_punct("(");
      el.positive = false;
      el.predicate = ident.text;
      parse_args(lex, el);
      return el;
    }
    if (t.kind == TokKind::String || t.kind == TokKind::Number) {
      Token lhs_tok = lex.take();
      RawTerm lhs{false, lhs_tok.text, lhs_tok.column};
      return parse_constraint_tail(lex, lhs);
    }
    lex.fail("expected literal or constraint");
  }

  RawElement parse_constraint_tail(LineLexer& lex, RawTerm lhs) {
    RawElement el;
    el.is_constraint = true;
    el.column = lhs.column;
    if (lex.accept_punct("=")) {
      el.positive = true;
    } else if (lex.accept_punct("!=")) {
      el.positive = false;
    } else {
      lex.fail("expected '=' or '!=' in constraint");
    }
    RawTerm rhs = parse_term(lex);
    el.terms = {std::move(lhs), std::move(rhs)};
    return el;
  }

  RawTerm parse_term(LineLexer& lex) {
    Token t = lex.take();
    if (t.kind == TokKind::Ident)
      return {is_variable_token(t), t.text, t.column};
    if (t.kind == TokKind::String || t.kind == TokKind::Number)
      return {false, t.text, t.column};
    throw ParseError("expected term", lex.line_no(), t.column);
  }

  void parse_args(LineLexer& lex, RawElement& el) {
    while (true) {
      el.terms.push_back(parse_term(lex));
      if (lex.accept_punct(")")) break;
      lex.expect_punct(",");
    }
  }

  void parse_rule(LineLexer& lex) {
    double weight = parse_weight(lex);
    lex.expect_punct(":");

    std::vector<RawElement> first_group{parse_element(lex)};
    enum class Sep { None, And, Or } sep = Sep::None;
    while (true) {
      if (lex.accept_punct(",")) {
        if (sep == Sep::Or) lex.fail("',' may not mix with 'v'");
        sep = Sep::And;
      } else if (is_or_keyword(lex.peek())) {
        lex.take();
        if (sep == Sep::And) lex.fail("'v' may not mix with ','");
        sep = Sep::Or;
      } else {
        break;
      }
      first_group.push_back(parse_element(lex));
    }

    std::string annotation;
    std::vector<RawElement> literals;  // final disjunction
    if (lex.accept_punct("=>")) {
      if (sep == Sep::Or) lex.fail("disjunctive body before '=>'");
      for (RawElement& el : first_group) {
        el.positive = !el.positive;
        el.is_head = false;
        literals.push_back(std::move(el));
      }
      literals.push_back(parse_element(lex));
      while (is_or_keyword(lex.peek())) {
        lex.take();
        literals.push_back(parse_element(lex));
      }
      annotation = parse_annotation(lex);
      emit_clause(weight, literals, annotation, lex);
      return;
    }
    if (lex.accept_punct("<=>")) {
      if (first_group.size() != 1 || sep != Sep::None)
        lex.fail("'<=>' requires a single literal on each side");
      RawElement lhs = first_group[0];
      RawElement rhs = parse_element(lex);
      if (lhs.is_constraint || rhs.is_constraint)
        lex.fail("'<=>' between constraints is not supported");
      annotation = parse_annotation(lex);
      // a <=> b becomes (a => b) and (b => a), each with the rule's weight
      RawElement na = lhs, nb = rhs;
      na.positive = !na.positive;
      na.is_head = false;
      nb.positive = !nb.positive;
      nb.is_head = false;
      std::vector<RawElement> c1{na, rhs};
      std::vector<RawElement> c2{lhs, nb};
      emit_clause(weight, c1, annotation, lex);
      emit_clause(weight, c2, annotation, lex);
      return;
    }
    if (sep == Sep::And)
      lex.fail("',' conjunction is only allowed left of '=>'");
    annotation = parse_annotation(lex);
    emit_clause(weight, first_group, annotation, lex);
  }

  std::string parse_annotation(LineLexer& lex) {
    if (lex.accept_punct("@")) {
      Token kw = lex.take();
      if (kw.kind != TokKind::Ident || kw.text != "task")
        throw ParseError("unknown annotation", lex.line_no(), kw.column);
      lex.expect_punct("(");
      Token name = lex.take();
      if (name.kind != TokKind::Ident && name.kind != TokKind::String)
        throw ParseError("expected task name", lex.line_no(), name.column);
      lex.expect_punct(")");
      if (!lex.at_end()) lex.fail("trailing tokens after annotation");
      return name.text;
    }
    if (!lex.at_end()) lex.fail("trailing tokens after rule");
    return "";
  }

  void emit_clause(double weight, const std::vector<RawElement>& elements,
                   const std::string& annotation, LineLexer& lex) {
    Clause clause;
    clause.weight = weight;
    clause.task_annotation = annotation;
    clause.source_line = lex.line_no();
    std::map<std::string, int> var_slots;

    auto resolve = [&](const RawTerm& rt, int domain) -> Term {
      if (rt.is_var) {
        auto it = var_slots.find(rt.text);
        int slot;
        if (it == var_slots.end()) {
          slot = static_cast<int>(clause.vars.size());
          var_slots.emplace(rt.text, slot);
          clause.vars.push_back({rt.text, domain});
        } else {
          slot = it->second;
          if (domain >= 0 && clause.vars[slot].domain >= 0 &&
              clause.vars[slot].domain != domain)
            throw ParseError(
                cat("variable ", rt.text, " used with conflicting domains"),
                lex.line_no(), rt.column);
          if (clause.vars[slot].domain < 0) clause.vars[slot].domain = domain;
        }
        return Term::var(slot);
      }
      if (domain < 0)
        throw ParseError(cat("cannot infer domain of constant ", rt.text),
                         lex.line_no(), rt.column);
      return Term::constant(program_.symbols.intern(domain, rt.text));
    };

    for (const RawElement& el : elements) {
      if (el.is_constraint) continue;
      int pred = program_.predicate_id(el.predicate);
      if (pred < 0)
        throw ParseError(cat("undeclared predicate ", el.predicate),
                         lex.line_no(), el.column);
      const PredicateSchema& schema = program_.predicates[pred];
      if (static_cast<int>(el.terms.size()) != schema.arity())
        throw ParseError(cat("arity mismatch for ", el.predicate, ": got ",
                             el.terms.size(), ", declared ", schema.arity()),
                         lex.line_no(), el.column);
      Literal lit;
      lit.positive = el.positive;
      lit.is_head = el.is_head;
      lit.predicate = pred;
      for (size_t i = 0; i < el.terms.size(); ++i)
        lit.args.push_back(resolve(el.terms[i], schema.domains[i]));
      clause.literals.push_back(std::move(lit));
    }
    // Constraints second: their variables must already have domains from
    // literals; a constant side takes the domain of the variable side.
    for (const RawElement& el : elements) {
      if (!el.is_constraint) continue;
      const RawTerm& l = el.terms[0];
      const RawTerm& r = el.terms[1];
      int dom = -1;
      for (const RawTerm* rt : {&l, &r}) {
        if (rt->is_var) {
          auto it = var_slots.find(rt->text);
          if (it == var_slots.end())
            throw ParseError(
                cat("constraint variable ", rt->text,
                    " does not appear in any literal"),
                lex.line_no(), rt->column);
          dom = clause.vars[it->second].domain;
        }
      }
      EqConstraint c;
      c.equal = el.positive;
      c.is_head = el.is_head;
      c.lhs = resolve(l, dom);
      c.rhs = resolve(r, dom);
      clause.constraints.push_back(c);
    }
    program_.rules.push_back(std::move(clause));
  }

  const std::string& text_;
  MLNProgram program_;
};

}  // namespace

MLNProgram parse_program(const std::string& text) {
  return ProgramParser(text).run();
}

void parse_evidence(const std::string& text, MLNProgram& program) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside strings
    bool in_string = false;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (!in_string && line[i] == '/' && line[i + 1] == '/') {
        line.resize(i);
        break;
      }
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LineLexer lex(line, line_no);
    EvidenceAtom atom;
    atom.positive = !lex.accept_punct("!");
    Token name = lex.take();
    if (name.kind != TokKind::Ident)
      throw ParseError("expected predicate name", line_no, name.column);
    int pred = program.predicate_id(name.text);
    if (pred < 0)
      throw ParseError(cat("undeclared predicate ", name.text), line_no,
                       name.column);
    const PredicateSchema& schema = program.predicates[pred];
    if (schema.kind == PredicateKind::Query)
      throw ParseError(
          cat("evidence is not allowed for query relation ", name.text),
          line_no, name.column);
    atom.predicate = pred;
    lex.expect_punct("(");
    int pos = 0;
    while (true) {
      Token t = lex.take();
      if (t.kind != TokKind::Ident && t.kind != TokKind::String &&
          t.kind != TokKind::Number)
        throw ParseError("expected constant", line_no, t.column);
      if (pos >= schema.arity())
        throw ParseError(cat("too many arguments for ", name.text), line_no,
                         t.column);
      atom.constants.push_back(
          program.symbols.intern(schema.domains[pos], t.text));
      ++pos;
      if (lex.accept_punct(")")) break;
      lex.expect_punct(",");
    }
    if (pos != schema.arity())
      throw ParseError(cat("arity mismatch for ", name.text, ": got ", pos,
                           ", declared ", schema.arity()),
                       line_no, lex.peek().column);
    if (!lex.at_end()) lex.fail("trailing tokens after evidence atom");
    program.evidence.push_back(std::move(atom));
  }
}

std::string print_program(const MLNProgram& program) {
  std::ostringstream os;
  for (const PredicateSchema& schema : program.predicates) {
    if (schema.kind == PredicateKind::Query) os << '*';
    os << schema.name << '(';
    for (size_t i = 0; i < schema.domains.size(); ++i) {
      if (i) os << ", ";
      os << program.symbols.domain_name(schema.domains[i]);
    }
    os << ")\n";
  }
  for (const Clause& clause : program.rules)
    os << clause_to_string(program, clause) << '\n';
  return os.str();
}

std::string print_evidence(const MLNProgram& program) {
  std::ostringstream os;
  for (const EvidenceAtom& atom : program.evidence) {
    if (!atom.positive) os << '!';
    const PredicateSchema& schema = program.predicates[atom.predicate];
    os << schema.name << '(';
    for (size_t i = 0; i < atom.constants.size(); ++i) {
      if (i) os << ", ";
      const std::string& name =
          program.symbols.constant_name(schema.domains[i], atom.constants[i]);
      bool bare = !name.empty() &&
                  (std::isupper(static_cast<unsigned char>(name[0])) ||
                   std::isdigit(static_cast<unsigned char>(name[0])));
      for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
              c == '.'))
          bare = false;
      if (bare) {
        os << name;
      } else {
        os << '"';
        for (char c : name) {
          if (c == '"' || c == '\\') os << '\\';
          os << c;
        }
        os << '"';
      }
    }
    os << ")\n";
  }
  return os.str();
}

}  // namespace dmln
