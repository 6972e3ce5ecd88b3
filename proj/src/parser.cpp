// SPDX-License-Identifier: Apache-2.0
#include "psoa/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace psoa {

namespace {

enum class Tok {
  LParen,
  RParen,
  LBrace,
  RBrace,
  PlusBracket,
  MinusBracket,
  RBracket,
  PlusArrow,
  MinusArrow,
  Hash,
  HashHash,
  Eq,
  Implies,
  CaretCaret,
  Var,
  Name,
  Curie,
  Iri,
  String,
  Number,
  End,
};

struct Token {
  Tok kind;
  std::string text;    // name, IRI, string body, number, var name, CURIE prefix
  std::string local;   // CURIE local part
  int line = 1;
  int col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::PlusBracket: return "'+['";
    case Tok::MinusBracket: return "'-['";
    case Tok::RBracket: return "']'";
    case Tok::PlusArrow: return "'+>'";
    case Tok::MinusArrow: return "'->'";
    case Tok::Hash: return "'#'";
    case Tok::HashHash: return "'##'";
    case Tok::Eq: return "'='";
    case Tok::Implies: return "':-'";
    case Tok::CaretCaret: return "'^^'";
    case Tok::Var: return "variable";
    case Tok::Name: return "name";
    case Tok::Curie: return "CURIE";
    case Tok::Iri: return "IRI";
    case Tok::String: return "string";
    case Tok::Number: return "number";
    case Tok::End: return "end of input";
  }
  return "?";
}

[[noreturn]] void fail(int line, int col, const std::string& msg) {
  throw ParseError(ParseDiagnostic{line, col, msg, Severity::Error});
}

bool name_start(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}
bool name_char(char c) { return name_start(c) || c == '-' || c == '.'; }

bool is_numeric(std::string_view s) { return Decimal::parse(s).has_value(); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      char n = peek(1);
      if (c == '(') single(t, Tok::LParen);
      else if (c == ')') single(t, Tok::RParen);
      else if (c == '{') single(t, Tok::LBrace);
      else if (c == '}') single(t, Tok::RBrace);
      else if (c == ']') single(t, Tok::RBracket);
      else if (c == '=') single(t, Tok::Eq);
      else if (c == '+' && n == '[') twice(t, Tok::PlusBracket);
      else if (c == '+' && n == '>') twice(t, Tok::PlusArrow);
      else if (c == '-' && n == '[') twice(t, Tok::MinusBracket);
      else if (c == '-' && n == '>') twice(t, Tok::MinusArrow);
      else if ((c == '+' || c == '-') && std::isdigit(static_cast<unsigned char>(n))) {
        advance();
        std::string body = read_name();
        if (!is_numeric(body)) fail(t.line, t.col, "malformed number '" + std::string(1, c) + body + "'");
        t.kind = Tok::Number;
        t.text = (c == '-' ? "-" : "") + body;
      } else if (c == '#' && n == '#') twice(t, Tok::HashHash);
      else if (c == '#') single(t, Tok::Hash);
      else if (c == ':' && n == '-') twice(t, Tok::Implies);
      else if (c == '^' && n == '^') twice(t, Tok::CaretCaret);
      else if (c == '?') {
        advance();
        t.kind = Tok::Var;
        t.text = read_name();
      } else if (c == '<') {
        advance();
        std::string iri;
        while (pos_ < src_.size() && src_[pos_] != '>') {
          char ch = src_[pos_];
          if (ch == '\n' || ch == ' ' || ch == '<') fail(line_, col_, "unterminated IRI");
          iri += ch;
          advance();
        }
        if (pos_ >= src_.size()) fail(t.line, t.col, "unterminated IRI");
        advance();
        t.kind = Tok::Iri;
        t.text = iri;
      } else if (c == '"') {
        advance();
        std::string s;
        for (;;) {
          if (pos_ >= src_.size()) fail(t.line, t.col, "unterminated string");
          char ch = src_[pos_];
          if (ch == '"') break;
          if (ch == '\\') {
            advance();
            if (pos_ >= src_.size()) fail(t.line, t.col, "unterminated string");
            char e = src_[pos_];
            s += e == 'n' ? '\n' : (e == 't' ? '\t' : e);
          } else {
            s += ch;
          }
          advance();
        }
        advance();
        t.kind = Tok::String;
        t.text = s;
      } else if (c == ':' && name_start(n)) {
        advance();
        t.kind = Tok::Curie;
        t.local = read_name();
      } else if (name_start(c)) {
        std::string name = read_name();
        if (peek(0) == ':' && peek(1) != '-') {
          advance();
          t.kind = Tok::Curie;
          t.text = name;
          t.local = name_start(peek(0)) ? read_name() : "";
        } else if (std::isdigit(static_cast<unsigned char>(name[0])) && is_numeric(name)) {
          t.kind = Tok::Number;
          t.text = name;
        } else {
          t.kind = Tok::Name;
          t.text = name;
        }
      } else {
        fail(t.line, t.col, std::string("unexpected character '") + c + "'");
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void single(Token& t, Tok k) {
    t.kind = k;
    advance();
  }
  void twice(Token& t, Tok k) {
    t.kind = k;
    advance();
    advance();
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  // PN_LOCAL-ish run: '-' does not swallow '->' or '-[', '.' is never last.
  std::string read_name() {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (!name_char(c)) break;
      if (c == '-' && (peek(1) == '>' || peek(1) == '[')) break;
      if (c == '.' && !name_char(peek(1))) break;
      s += c;
      advance();
    }
    return s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::vector<std::string>& keywords() {
  static const std::vector<std::string> k = {"And", "Or", "Exists", "Forall", "External", "RuleML",
                                             "Assert", "Query", "Prefix", "Base", "Import"};
  return k;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<ParseDiagnostic>* warnings)
      : toks_(std::move(toks)), warnings_(warnings) {
    for (const auto& p : default_prefixes()) prefixes_[p.name] = p.iri;
  }

  void add_prefixes(const std::vector<Prefix>& ps) {
    for (const auto& p : ps) prefixes_[p.name] = p.iri;
  }

  KnowledgeBase document(SyntaxMode mode) {
    if (mode == SyntaxMode::Auto)
      mode = is_name("RuleML") && peek(1).kind == Tok::LParen ? SyntaxMode::Unabridged : SyntaxMode::Abridged;
    KnowledgeBase kb;
    if (mode == SyntaxMode::Unabridged) {
      expect_name("RuleML");
      expect(Tok::LParen);
      while (cur().kind != Tok::RParen) {
        if (!top_level_item(kb)) fail_here("expected Base, Prefix, Import, Assert or Query");
      }
      expect(Tok::RParen);
    } else {
      while (cur().kind != Tok::End) {
        if (top_level_item(kb)) continue;
        statement(kb);
      }
    }
    expect(Tok::End);
    return kb;
  }

  Formula query_document() {
    Formula f;
    if (is_name("Query") && peek(1).kind == Tok::LParen) {
      next();
      next();
      f = formula();
      expect(Tok::RParen);
    } else {
      f = formula();
    }
    expect(Tok::End);
    return f;
  }

  Term term_document() {
    Term t = term();
    expect(Tok::End);
    return t;
  }

 private:
  // ------------------------------------------------------------ utilities

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool is_name(const char* n) const { return cur().kind == Tok::Name && cur().text == n; }
  bool is_keyword_call(const char* n) const { return is_name(n) && peek(1).kind == Tok::LParen; }

  [[noreturn]] void fail_here(const std::string& msg) const {
    const Token& t = cur();
    std::string got = tok_name(t.kind);
    if (t.kind == Tok::Name || t.kind == Tok::Number) got += " '" + t.text + "'";
    fail(t.line, t.col, msg + ", got " + got);
  }

  const Token& expect(Tok k) {
    if (cur().kind != k) fail_here(std::string("expected ") + tok_name(k));
    return next();
  }

  void expect_name(const char* n) {
    if (!is_name(n)) fail_here(std::string("expected '") + n + "'");
    next();
  }

  void warn(const Token& at, const std::string& msg) {
    if (warnings_) warnings_->push_back(ParseDiagnostic{at.line, at.col, msg, Severity::Warning});
  }

  std::string resolve_curie(const Token& t) {
    auto it = prefixes_.find(t.text);
    if (it == prefixes_.end()) fail(t.line, t.col, "unbound CURIE prefix '" + t.text + ":'");
    return it->second + t.local;
  }

  std::string resolve_iri(const std::string& iri) {
    if (base_ && iri.find(':') == std::string::npos) return *base_ + iri;
    return iri;
  }

  // ----------------------------------------------------------- top level

  bool top_level_item(KnowledgeBase& kb) {
    if (is_keyword_call("Base")) {
      next();
      next();
      std::string iri = expect(Tok::Iri).text;
      expect(Tok::RParen);
      kb.base = iri;
      base_ = iri;
      return true;
    }
    if (is_keyword_call("Prefix")) {
      next();
      next();
      const Token& p = cur();
      if (p.kind != Tok::Curie || !p.local.empty()) fail_here("expected prefix name like 'pred:'");
      std::string name = p.text;
      next();
      std::string iri = expect(Tok::Iri).text;
      expect(Tok::RParen);
      prefixes_[name] = iri;
      auto existing = std::find_if(kb.prefixes.begin(), kb.prefixes.end(), [&](const Prefix& x) { return x.name == name; });
      if (existing != kb.prefixes.end())
        existing->iri = iri;
      else
        kb.prefixes.push_back(Prefix{name, iri});
      return true;
    }
    if (is_keyword_call("Import")) {
      const Token& at = cur();
      next();
      next();
      Import imp;
      imp.iri = resolve_iri(expect(Tok::Iri).text);
      if (cur().kind == Tok::Iri) {
        imp.profile = next().text;
        warn(at, "Import profile is stored but has no effect");
      } else if (cur().kind == Tok::Curie) {
        imp.profile = resolve_curie(next());
        warn(at, "Import profile is stored but has no effect");
      }
      expect(Tok::RParen);
      kb.imports.push_back(imp);
      return true;
    }
    if (is_keyword_call("Assert")) {
      next();
      next();
      assert_body(kb);
      return true;
    }
    if (is_keyword_call("Query")) {
      next();
      next();
      kb.queries.push_back(formula());
      expect(Tok::RParen);
      return true;
    }
    return false;
  }

  void assert_body(KnowledgeBase& kb) {
    while (cur().kind != Tok::RParen) {
      if (is_keyword_call("Assert")) {
        warn(cur(), "nested Assert flattened into its parent");
        next();
        next();
        assert_body(kb);
        continue;
      }
      statement(kb);
    }
    expect(Tok::RParen);
  }

  // RULE | DEFAULTFACT
  void statement(KnowledgeBase& kb) {
    const Token& start = cur();
    if (is_name("Forall") && peek(1).kind == Tok::Var) {
      next();
      Clause c;
      while (cur().kind == Tok::Var) c.forall.push_back(variable_decl());
      expect(Tok::LParen);
      clause_body(c);
      expect(Tok::RParen);
      close_clause(c, start);
      kb.asserts.emplace_back(std::move(c));
      return;
    }
    if (!is_keyword_call("And") && !is_keyword_call("Exists")) {
      std::size_t save = pos_;
      int anon = anon_;
      Term t = term();
      if (cur().kind == Tok::LBrace) {
        next();
        DefaultFact d{t, {}};
        while (cur().kind != Tok::RBrace) {
          if (cur().kind == Tok::PlusBracket || cur().kind == Tok::MinusBracket) {
            d.descriptors.push_back(bracket_tuple());
          } else {
            Term name = term();
            d.descriptors.push_back(slot_after_name(std::move(name)));
          }
        }
        next();
        kb.asserts.emplace_back(std::move(d));
        return;
      }
      pos_ = save;
      anon_ = anon;
    }
    Clause c;
    clause_body(c);
    close_clause(c, start);
    kb.asserts.emplace_back(std::move(c));
  }

  void clause_body(Clause& c) {
    c.head = head();
    if (cur().kind == Tok::Implies) {
      next();
      c.condition = formula();
    }
  }

  void close_clause(Clause& c, const Token& at) {
    auto free = clause_free_variables(c);
    if (free.empty()) return;
    std::string names;
    for (const auto& v : free) names += " ?" + v.name;
    warn(at, "free variables implicitly universally closed:" + names);
    c.forall.insert(c.forall.end(), free.begin(), free.end());
  }

  Variable variable_decl() {
    const Token& t = expect(Tok::Var);
    if (t.text.empty()) fail(t.line, t.col, "anonymous variable cannot be quantified");
    return Variable{t.text};
  }

  // ------------------------------------------------------------- formulas

  Formula head() {
    if (is_keyword_call("And")) {
      next();
      next();
      And a;
      while (cur().kind != Tok::RParen) a.conjuncts.push_back(head());
      next();
      return a;
    }
    if (is_name("Exists") && peek(1).kind == Tok::Var) {
      next();
      Exists e;
      while (cur().kind == Tok::Var) e.vars.push_back(variable_decl());
      expect(Tok::LParen);
      e.body = head();
      expect(Tok::RParen);
      return e;
    }
    return atomic();
  }

  Formula formula() {
    if (is_keyword_call("And")) {
      next();
      next();
      And a;
      while (cur().kind != Tok::RParen) a.conjuncts.push_back(formula());
      next();
      return a;
    }
    if (is_keyword_call("Or")) {
      next();
      next();
      Or o;
      while (cur().kind != Tok::RParen) o.disjuncts.push_back(formula());
      next();
      return o;
    }
    if (is_name("Exists") && peek(1).kind == Tok::Var) {
      next();
      Exists e;
      while (cur().kind == Tok::Var) e.vars.push_back(variable_decl());
      expect(Tok::LParen);
      e.body = formula();
      expect(Tok::RParen);
      return e;
    }
    return atomic();
  }

  Formula atomic() {
    const Token& at = cur();
    Term t = term();
    if (cur().kind == Tok::Eq) {
      next();
      return Equal{t, term()};
    }
    if (cur().kind == Tok::HashHash) {
      next();
      return Subclass{t, term()};
    }
    if (t.is_external()) return ExternalFormula{t.external().expr};
    if (t.is_psoa()) return AtomFormula{t.psoa()};
    fail(at.line, at.col, "expected an atom, equation or subclass formula");
  }

  // ---------------------------------------------------------------- terms

  Term term() {
    Term t = primary();
    for (;;) {
      if (cur().kind == Tok::LParen) {
        next();
        t = Term(Psoa{std::nullopt, t, descriptor_list(Tok::RParen)});
      } else if (cur().kind == Tok::Hash) {
        next();
        Term pred = primary();
        std::vector<Descriptor> ds;
        if (cur().kind == Tok::LParen) {
          next();
          ds = descriptor_list(Tok::RParen);
        }
        t = Term(Psoa{t, pred, std::move(ds)});
      } else {
        return t;
      }
    }
  }

  Term primary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var: {
        next();
        if (t.text.empty()) return Term(Variable{"_anon" + std::to_string(++anon_)});
        return Term(Variable{t.text});
      }
      case Tok::Name: {
        if (t.text == "External" && peek(1).kind == Tok::LParen) {
          next();
          next();
          const Token& at = cur();
          Term e = term();
          expect(Tok::RParen);
          if (!e.is_psoa() || e.psoa().oidful()) fail(at.line, at.col, "External expects an oidless application");
          return Term(ExternalTerm{e.psoa()});
        }
        next();
        std::string name = t.text;
        if (name[0] == '_') {
          name.erase(0, 1);
          if (name.empty()) fail(t.line, t.col, "'_' alone is not a constant");
        }
        return Term(Constant::local(name));
      }
      case Tok::Number: {
        next();
        return Term(Constant::number(*Decimal::parse(t.text)));
      }
      case Tok::String: {
        next();
        if (cur().kind == Tok::CaretCaret) {
          next();
          const Token& s = cur();
          std::string symspace;
          if (s.kind == Tok::Iri)
            symspace = resolve_iri(s.text);
          else if (s.kind == Tok::Curie)
            symspace = resolve_curie(s);
          else
            fail_here("expected symbol space IRI after '^^'");
          next();
          return Term(Constant::literal(t.text, symspace));
        }
        return Term(Constant::string(t.text));
      }
      case Tok::Iri: {
        next();
        return Term(Constant::iri(resolve_iri(t.text)));
      }
      case Tok::Curie: {
        next();
        return Term(Constant::iri(resolve_curie(t)));
      }
      default:
        fail_here("expected a term");
    }
  }

  Descriptor bracket_tuple() {
    Dependency d = cur().kind == Tok::PlusBracket ? Dependency::Dependent : Dependency::Independent;
    next();
    std::vector<Term> elems;
    while (cur().kind != Tok::RBracket) elems.push_back(term());
    next();
    return Descriptor::tuple(std::move(elems), d);
  }

  Descriptor slot_after_name(Term name) {
    if (cur().kind == Tok::PlusArrow) {
      next();
      return Descriptor::slot(std::move(name), term(), Dependency::Dependent);
    }
    if (cur().kind == Tok::MinusArrow) {
      next();
      return Descriptor::slot(std::move(name), term(), Dependency::Independent);
    }
    fail_here("expected '+>' or '->' after slot name");
  }

  // (TERM* | TUPLEDI*) SLOTDI* ')' ; bare terms form one dependent tuple.
  std::vector<Descriptor> descriptor_list(Tok close) {
    std::vector<Descriptor> ds;
    std::vector<Term> bare;
    bool explicit_tuple = false;
    bool seen_slot = false;
    std::size_t bare_index = 0;
    while (cur().kind != close) {
      if (cur().kind == Tok::PlusBracket || cur().kind == Tok::MinusBracket) {
        if (!bare.empty()) fail_here("bracketed tuple cannot follow bare tuple elements");
        explicit_tuple = true;
        ds.push_back(bracket_tuple());
        continue;
      }
      const Token& at = cur();
      Term t = term();
      if (cur().kind == Tok::PlusArrow || cur().kind == Tok::MinusArrow) {
        ds.push_back(slot_after_name(std::move(t)));
        seen_slot = true;
        continue;
      }
      if (explicit_tuple) fail(at.line, at.col, "bare tuple element cannot follow a bracketed tuple");
      if (seen_slot) fail(at.line, at.col, "bare tuple elements must precede slots");
      if (bare.empty()) bare_index = ds.size();
      bare.push_back(std::move(t));
    }
    next();
    if (!bare.empty())
      ds.insert(ds.begin() + static_cast<std::ptrdiff_t>(bare_index), Descriptor::tuple(std::move(bare), Dependency::Dependent));
    return ds;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic>* warnings_;
  std::map<std::string, std::string> prefixes_;
  std::optional<std::string> base_;
  int anon_ = 0;
};

}  // namespace

const std::vector<Prefix>& default_prefixes() {
  static const std::vector<Prefix> p = {{"pred", kPredNs}, {"func", kFuncNs}, {"xs", kXsdNs}};
  return p;
}

KnowledgeBase parse_kb(std::string_view source, SyntaxMode mode, std::vector<ParseDiagnostic>* warnings) {
  Parser p(Lexer(source).run(), warnings);
  return p.document(mode);
}

Formula parse_query(std::string_view source, const std::vector<Prefix>& prefixes) {
  Parser p(Lexer(source).run(), nullptr);
  p.add_prefixes(prefixes);
  return p.query_document();
}

Term parse_term(std::string_view source, const std::vector<Prefix>& prefixes) {
  Parser p(Lexer(source).run(), nullptr);
  p.add_prefixes(prefixes);
  return p.term_document();
}

bool is_pn_local(std::string_view name) {
  if (name.empty() || !name_start(name[0])) return false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    if (!name_char(c)) return false;
    char n = i + 1 < name.size() ? name[i + 1] : '\0';
    if (c == '-' && (n == '>' || n == '[')) return false;
    if (c == '.' && !name_char(n)) return false;
  }
  return true;
}

bool is_plain_local_name(std::string_view name) {
  if (!is_pn_local(name)) return false;
  if (name[0] == '_') return false;
  if (std::isdigit(static_cast<unsigned char>(name[0])) && is_numeric(name)) return false;
  for (const auto& k : keywords())
    if (name == k) return false;
  return true;
}

}  // namespace psoa
