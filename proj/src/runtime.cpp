// SPDX-License-Identifier: Apache-2.0
#include "psoa/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <regex>
#include <set>

#include "psoa/error.hpp"
#include "psoa/printer.hpp"
#include "psoa/transform.hpp"

namespace psoa {

namespace {

struct BuiltinOp {
  const char* local;   // name under the pred: or func: namespace
  const char* prolog;  // infix operator
  bool function;
};

const BuiltinOp kBuiltinOps[] = {
    {"numeric-greater-than", ">", false},
    {"numeric-less-than", "<", false},
    {"numeric-greater-than-or-equal", ">=", false},
    {"numeric-less-than-or-equal", "=<", false},
    {"numeric-equal", "=:=", false},
    {"numeric-not-equal", "=\\=", false},
    {"numeric-add", "+", true},
    {"numeric-subtract", "-", true},
    {"numeric-multiply", "*", true},
};

std::string builtin_iri(const BuiltinOp& op) { return std::string(op.function ? kFuncNs : kPredNs) + op.local; }

const BuiltinOp* find_builtin(const Constant& iri) {
  for (const auto& op : kBuiltinOps)
    if (iri.is_iri() && iri.text() == builtin_iri(op)) return &op;
  return nullptr;
}

const BuiltinOp* find_prolog_op(const std::string& sym, bool function) {
  for (const auto& op : kBuiltinOps)
    if (sym == op.prolog && op.function == function) return &op;
  return nullptr;
}

RuntimeAtom make(RuntimePredicate p, std::vector<Term> args, Constant name = Constant::local("")) {
  RuntimeAtom a;
  a.predicate = p;
  a.name = std::move(name);
  a.args = std::move(args);
  return a;
}

bool is_function_term(const Term& t) {
  if (!t.is_psoa()) return false;
  const Psoa& p = t.psoa();
  return !p.oidful() && p.predicate.is_constant() && p.descriptors.size() == 1 && p.descriptors[0].is_tuple() &&
         p.descriptors[0].dependent() && !p.descriptors[0].as_tuple().elements.empty();
}

const std::vector<Term>& function_args(const Term& t) { return t.psoa().descriptors[0].as_tuple().elements; }

void check_runtime_term(const Term& t) {
  if (t.is_constant() || t.is_variable()) return;
  if (is_function_term(t)) {
    for (const auto& a : function_args(t)) check_runtime_term(a);
    return;
  }
  if (t.is_external()) throw ConversionError("unflattened External term in runtime atom: " + print_term(t));
  throw ConversionError("only positional function terms are supported at runtime: " + print_term(t));
}

std::vector<Term> tuple_args(const Psoa& a) {
  if (a.descriptors.empty()) return {};
  if (a.descriptors.size() != 1 || !a.descriptors[0].is_tuple() || !a.descriptors[0].dependent())
    throw ConversionError("built-in or relational atom needs one positional argument list: " + print_atom(a));
  return a.descriptors[0].as_tuple().elements;
}

RuntimeAtom builtin_atom(const Psoa& call, std::optional<Term> result) {
  if (!call.predicate.is_constant() || !call.predicate.constant().is_iri())
    throw ConversionError("External call needs an IRI predicate: " + print_atom(call));
  auto args = tuple_args(call);
  if (result) args.push_back(*result);
  return make(RuntimePredicate::Builtin, std::move(args), call.predicate.constant());
}

RuntimeAtom map_leaf(const Formula& f) {
  return std::visit(
      overloaded{
          [](const AtomFormula& af) -> RuntimeAtom {
            const Psoa& atom = af.atom;
            if (!atom.oidful()) {
              if (!atom.predicate.is_constant())
                throw ConversionError("oidless atom with a variable predicate: " + print_atom(atom));
              if (atom.descriptors.size() != 1 || !atom.descriptors[0].is_tuple() || !atom.descriptors[0].dependent())
                throw ConversionError("oidless atom was not objectified: " + print_atom(atom));
              return make(RuntimePredicate::Relational, atom.descriptors[0].as_tuple().elements,
                          atom.predicate.constant());
            }
            Psoa a = revert_top_dependents(atom);
            const Term& o = *a.oid;
            if (a.descriptors.empty()) return make(RuntimePredicate::Memterm, {o, a.predicate});
            if (a.descriptors.size() != 1) throw ConversionError("atom was not descributed: " + print_atom(atom));
            const Descriptor& d = a.descriptors[0];
            bool top_pred = is_top(a.predicate);
            if (!d.dependent() && !top_pred)
              throw ConversionError("independent descriptor outside Top was not descributed: " + print_atom(atom));
            if (d.is_tuple()) {
              std::vector<Term> args{o};
              if (d.dependent()) args.push_back(a.predicate);
              for (const auto& e : d.as_tuple().elements) args.push_back(e);
              return make(d.dependent() ? RuntimePredicate::Prdtupterm : RuntimePredicate::Tupterm, std::move(args));
            }
            const Slot& s = d.as_slot();
            if (d.dependent()) return make(RuntimePredicate::Prdsloterm, {o, a.predicate, s.name, s.filler});
            return make(RuntimePredicate::Sloterm, {o, s.name, s.filler});
          },
          [](const ExternalFormula& e) -> RuntimeAtom { return builtin_atom(e.atom, std::nullopt); },
          [](const Equal& e) -> RuntimeAtom {
            if (e.right.is_external() && !e.left.is_external()) return builtin_atom(e.right.external().expr, e.left);
            if (e.left.is_external() && !e.right.is_external()) return builtin_atom(e.left.external().expr, e.right);
            if (e.left.is_external()) throw ConversionError("equation between two External terms is not supported");
            return make(RuntimePredicate::Equal, {e.left, e.right});
          },
          [&](const auto&) -> RuntimeAtom {
            throw ConversionError("not a runtime atom: " + print_formula(f));
          },
      },
      f.node());
}

// Flattens Exists and Or out of conditions; Or becomes auxiliary clauses.
class Compiler {
 public:
  Compiler(FreshNames& fresh, std::string aux_prefix) : fresh_(fresh), prefix_(std::move(aux_prefix)) {}

  void body(const Formula& f, std::vector<RuntimeAtom>& out) {
    std::visit(overloaded{
                   [&](const And& a) {
                     for (const auto& c : a.conjuncts) body(c, out);
                   },
                   [&](const Exists& e) {
                     std::vector<std::pair<Variable, Term>> s;
                     for (const auto& v : e.vars) s.emplace_back(v, Term(fresh_.var("e")));
                     body(substitute(e.body, s), out);
                   },
                   [&](const Or& o) {
                     if (o.disjuncts.size() == 1) return body(o.disjuncts.front(), out);
                     Constant name = Constant::local(prefix_ + std::to_string(++aux_count_));
                     std::vector<Term> args;
                     for (const auto& v : free_variables(f)) args.emplace_back(v);
                     RuntimeAtom head = make(RuntimePredicate::Relational, args, name);
                     for (const auto& d : o.disjuncts) {
                       RuntimeClause c{head, {}};
                       body(d, c.body);
                       aux.push_back(std::move(c));
                     }
                     out.push_back(std::move(head));
                   },
                   [&](const auto&) { leaf(f, out); },
               },
               f.node());
  }

  std::vector<RuntimeClause> aux;

 private:
  // Nested External calls inside built-in arguments are evaluated first.
  Term lift(const Term& t, std::vector<RuntimeAtom>& out) {
    if (t.is_external()) {
      Variable v = fresh_.var("x");
      Psoa call = lift_args(t.external().expr, out);
      out.push_back(builtin_atom(call, Term(v)));
      return Term(v);
    }
    return t;
  }

  Psoa lift_args(const Psoa& p, std::vector<RuntimeAtom>& out) {
    Psoa r = p;
    if (r.descriptors.size() == 1 && r.descriptors[0].is_tuple()) {
      std::vector<Term> es;
      for (const auto& e : r.descriptors[0].as_tuple().elements) es.push_back(lift(e, out));
      r.descriptors[0] = Descriptor::tuple(std::move(es), r.descriptors[0].dependency);
    }
    return r;
  }

  void leaf(const Formula& f, std::vector<RuntimeAtom>& out) {
    Formula g = f;
    if (f.is<ExternalFormula>()) {
      g = ExternalFormula{lift_args(f.as<ExternalFormula>().atom, out)};
    } else if (f.is<Equal>()) {
      const auto& e = f.as<Equal>();
      auto side = [&](const Term& t) {
        return t.is_external() ? Term(ExternalTerm{lift_args(t.external().expr, out)}) : t;
      };
      g = Equal{side(e.left), side(e.right)};
    }
    RuntimeAtom a = map_leaf(g);
    for (const auto& t : a.args) check_runtime_term(t);
    out.push_back(std::move(a));
  }

  FreshNames& fresh_;
  std::string prefix_;
  int aux_count_ = 0;
};

void collect_heads(const Formula& f, std::vector<RuntimeAtom>& out) {
  if (f.is<And>()) {
    for (const auto& c : f.as<And>().conjuncts) collect_heads(c, out);
    return;
  }
  if (!f.is<AtomFormula>()) throw ConversionError("conclusion is not an atom after the pipeline: " + print_formula(f));
  RuntimeAtom a = map_leaf(f);
  for (const auto& t : a.args) check_runtime_term(t);
  out.push_back(std::move(a));
}

// ------------------------------------------------------------ text helpers

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out += '\\';
    out += c;
  }
  return out + "'";
}

std::string mangle_constant(const Constant& c) {
  switch (c.kind()) {
    case Constant::Kind::Number:
      return c.value().to_string();
    case Constant::Kind::Literal:
      return quote("\"" + c.text() + "\"^^<" + c.symspace() + ">");
    default:
      return quote(c.text());
  }
}

Constant unmangle_constant(const std::string& text) {
  static const std::regex iri_like("^[A-Za-z][A-Za-z0-9+.-]*:.*");
  if (!text.empty() && text[0] == '"') {
    auto pos = text.rfind("\"^^<");
    if (pos != std::string::npos && pos > 0 && text.back() == '>')
      return Constant::literal(text.substr(1, pos - 1), text.substr(pos + 4, text.size() - pos - 5));
  }
  if (std::regex_match(text, iri_like)) return Constant::iri(text);
  return Constant::local(text);
}

// Per-clause variable spelling: upper-case first letter, renamed apart.
class VarNames {
 public:
  const std::string& operator()(const std::string& name) {
    auto it = map_.find(name);
    if (it != map_.end()) return it->second;
    std::string base;
    for (char c : name) base += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    if (base.empty() || !std::isalpha(static_cast<unsigned char>(base[0])))
      base = "V" + base;
    else
      base[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
    std::string spelled = base;
    for (int i = 1; used_.count(spelled); ++i) spelled = base + "_" + std::to_string(i);
    used_.insert(spelled);
    return map_.emplace(name, spelled).first->second;
  }

 private:
  std::map<std::string, std::string> map_;
  std::set<std::string> used_;
};

std::string text_term(const Term& t, VarNames& vars) {
  if (t.is_variable()) return vars(t.variable().name);
  if (t.is_constant()) return mangle_constant(t.constant());
  if (!is_function_term(t)) throw ConversionError("term cannot be emitted: " + print_term(t));
  std::string out = mangle_constant(t.psoa().predicate.constant()) + "(";
  const auto& args = function_args(t);
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + text_term(args[i], vars);
  return out + ")";
}

std::string text_args(const std::vector<Term>& args, VarNames& vars) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + text_term(args[i], vars);
  return out;
}

std::string text_predicate(const RuntimeAtom& a, const std::vector<Term>& args, VarNames& vars) {
  std::string name = a.predicate == RuntimePredicate::Relational ? mangle_constant(a.name) : to_string(a.predicate);
  if (args.empty()) return name;
  return name + "(" + text_args(args, vars) + ")";
}

std::string prolog_atom(const RuntimeAtom& a, VarNames& vars) {
  if (a.predicate == RuntimePredicate::Equal)
    return text_term(a.args[0], vars) + " = " + text_term(a.args[1], vars);
  if (a.predicate == RuntimePredicate::Builtin) {
    const BuiltinOp* op = find_builtin(a.name);
    if (!op) throw ConversionError("no Prolog mapping for built-in " + a.name.text());
    if (op->function) {
      if (a.args.size() != 3) throw ConversionError("built-in " + a.name.text() + " expects 2 arguments");
      return text_term(a.args[2], vars) + " is " + text_term(a.args[0], vars) + " " + op->prolog + " " +
             text_term(a.args[1], vars);
    }
    if (a.args.size() != 2) throw ConversionError("built-in " + a.name.text() + " expects 2 arguments");
    return text_term(a.args[0], vars) + " " + op->prolog + " " + text_term(a.args[1], vars);
  }
  return text_predicate(a, a.args, vars);
}

void collect_atom_vars(const Term& t, std::vector<std::string>& out) {
  for (const auto& v : variables_of(t))
    if (std::find(out.begin(), out.end(), v.name) == out.end()) out.push_back(v.name);
}

std::vector<std::string> clause_vars(const RuntimeClause& c) {
  std::vector<std::string> out;
  for (const auto& t : c.head.args) collect_atom_vars(t, out);
  for (const auto& b : c.body)
    for (const auto& t : b.args) collect_atom_vars(t, out);
  return out;
}

std::string tptp_atom(const RuntimeAtom& a, VarNames& vars) {
  if (a.predicate == RuntimePredicate::Builtin)
    throw ConversionError("arithmetic built-in " + a.name.text() + " cannot be expressed in TPTP-FOF");
  if (a.predicate == RuntimePredicate::Equal)
    return text_term(a.args[0], vars) + " = " + text_term(a.args[1], vars);
  return text_predicate(a, a.args, vars);
}

std::string tptp_formula(const Formula& f, VarNames& vars) {
  return std::visit(overloaded{
                        [&](const And& a) -> std::string {
                          if (a.conjuncts.empty()) return "$true";
                          std::string out = "(";
                          for (std::size_t i = 0; i < a.conjuncts.size(); ++i)
                            out += (i ? " & " : "") + tptp_formula(a.conjuncts[i], vars);
                          return out + ")";
                        },
                        [&](const Or& o) -> std::string {
                          if (o.disjuncts.empty()) return "$false";
                          std::string out = "(";
                          for (std::size_t i = 0; i < o.disjuncts.size(); ++i)
                            out += (i ? " | " : "") + tptp_formula(o.disjuncts[i], vars);
                          return out + ")";
                        },
                        [&](const Exists& e) -> std::string {
                          std::string out = "(?[";
                          for (std::size_t i = 0; i < e.vars.size(); ++i) out += (i ? "," : "") + vars(e.vars[i].name);
                          return out + "]: " + tptp_formula(e.body, vars) + ")";
                        },
                        [&](const auto&) -> std::string { return tptp_atom(map_leaf(f), vars); },
                    },
                    f.node());
}

// ------------------------------------------------------------ Prolog reader

class PrologReader {
 public:
  explicit PrologReader(const std::string& text) : s_(text) {}

  std::vector<RuntimeClause> read() {
    std::vector<RuntimeClause> out;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) break;
      if (peek_symbol(":-")) {
        // Directive: checked for syntax, then ignored.
        pos_ += 2;
        skip_term_until_dot();
        continue;
      }
      RuntimeClause c;
      c.head = goal();
      skip();
      if (peek_symbol(":-")) {
        pos_ += 2;
        do {
          c.body.push_back(goal());
          skip();
        } while (accept(','));
      }
      expect('.');
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(ParseDiagnostic{line, col, msg, Severity::Error});
  }

  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '%') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (s_.compare(pos_, 2, "/*") == 0) {
        auto end = s_.find("*/", pos_ + 2);
        if (end == std::string::npos) fail("unterminated block comment");
        pos_ = end + 2;
      } else {
        break;
      }
    }
  }

  bool peek_symbol(const char* sym) const { return s_.compare(pos_, std::strlen(sym), sym) == 0; }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  void skip_term_until_dot() {
    int depth = 0;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) fail("unterminated directive");
      char c = s_[pos_];
      if (c == '\'') {
        quoted();
        continue;
      }
      ++pos_;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == '.' && depth == 0 && (pos_ >= s_.size() || std::isspace(static_cast<unsigned char>(s_[pos_])))) return;
    }
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated quoted atom");
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("bad escape");
        out += s_[pos_++];
      } else if (c == '\'') {
        if (pos_ < s_.size() && s_[pos_] == '\'') {
          out += '\'';
          ++pos_;
        } else {
          return out;
        }
      } else {
        out += c;
      }
    }
  }

  std::string word() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  std::vector<Term> arguments() {
    std::vector<Term> args;
    expect('(');
    do {
      args.push_back(term());
    } while (accept(','));
    expect(')');
    return args;
  }

  Term term() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    bool negative_number =
        c == '-' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative_number) {
      std::size_t start = pos_++;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ + 1 < s_.size() && s_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      auto d = Decimal::parse(s_.substr(start, pos_ - start));
      if (!d) fail("bad number");
      return Term(Constant::number(*d));
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      std::string w = word();
      w[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(w[0])));
      return Term(Variable{w});
    }
    Constant name = Constant::local("");
    if (c == '\'') {
      name = unmangle_constant(quoted());
    } else if (std::islower(static_cast<unsigned char>(c))) {
      name = Constant::local(word());
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    if (pos_ < s_.size() && s_[pos_] == '(') {
      auto args = arguments();
      return Term(Psoa{std::nullopt, Term(name), {Descriptor::tuple(std::move(args), Dependency::Dependent)}});
    }
    return Term(name);
  }

  std::string infix_operator() {
    skip();
    static const char* ops[] = {"=:=", "=\\=", ">=", "=<", "is", ">", "<", "="};
    for (const char* op : ops) {
      if (peek_symbol(op)) {
        if (std::string(op) == "is" && pos_ + 2 < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_ + 2])))
          continue;
        pos_ += std::strlen(op);
        return op;
      }
    }
    return {};
  }

  RuntimeAtom goal() {
    skip();
    std::size_t start = pos_;
    if (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_]))) {
      std::string w = word();
      static const std::map<std::string, RuntimePredicate> reserved = {
          {"memterm", RuntimePredicate::Memterm},       {"tupterm", RuntimePredicate::Tupterm},
          {"prdtupterm", RuntimePredicate::Prdtupterm}, {"sloterm", RuntimePredicate::Sloterm},
          {"prdsloterm", RuntimePredicate::Prdsloterm},
      };
      auto it = reserved.find(w);
      if (it == reserved.end()) fail("unknown predicate '" + w + "'");
      return make(it->second, arguments());
    }
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      std::size_t save = pos_;
      Constant name = unmangle_constant(quoted());
      std::vector<Term> args;
      if (pos_ < s_.size() && s_[pos_] == '(') args = arguments();
      std::size_t after = pos_;
      bool infix = !infix_operator().empty();
      pos_ = after;
      if (!infix) return make(RuntimePredicate::Relational, std::move(args), name);
      pos_ = save;
    }
    pos_ = start;
    Term left = term();
    std::string op = infix_operator();
    if (op.empty()) fail("expected a goal");
    if (op == "=") return make(RuntimePredicate::Equal, {left, term()});
    if (op == "is") {
      Term a = term();
      skip();
      if (pos_ >= s_.size()) fail("unexpected end of input");
      std::string sym(1, s_[pos_++]);
      const BuiltinOp* f = find_prolog_op(sym, true);
      if (!f) fail("unsupported arithmetic operator '" + sym + "'");
      Term b = term();
      return make(RuntimePredicate::Builtin, {a, b, left}, Constant::iri(builtin_iri(*f)));
    }
    const BuiltinOp* p = find_prolog_op(op, false);
    return make(RuntimePredicate::Builtin, {left, term()}, Constant::iri(builtin_iri(*p)));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

bool alpha_terms(const Term& a, const Term& b, std::map<std::string, std::string>& fw,
                 std::map<std::string, std::string>& bw) {
  if (a.is_variable() && b.is_variable()) {
    const auto& x = a.variable().name;
    const auto& y = b.variable().name;
    auto [i, fresh_x] = fw.emplace(x, y);
    auto [j, fresh_y] = bw.emplace(y, x);
    return i->second == y && j->second == x;
  }
  if (is_function_term(a) && is_function_term(b)) {
    if (!(a.psoa().predicate == b.psoa().predicate)) return false;
    const auto& xs = function_args(a);
    const auto& ys = function_args(b);
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!alpha_terms(xs[i], ys[i], fw, bw)) return false;
    return true;
  }
  return !a.is_variable() && !b.is_variable() && a == b;
}

bool alpha_atoms(const RuntimeAtom& a, const RuntimeAtom& b, std::map<std::string, std::string>& fw,
                 std::map<std::string, std::string>& bw) {
  if (a.predicate != b.predicate || !(a.name == b.name) || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_terms(a.args[i], b.args[i], fw, bw)) return false;
  return true;
}

}  // namespace

// ==================================================================== public

const char* to_string(RuntimePredicate p) {
  switch (p) {
    case RuntimePredicate::Memterm: return "memterm";
    case RuntimePredicate::Tupterm: return "tupterm";
    case RuntimePredicate::Prdtupterm: return "prdtupterm";
    case RuntimePredicate::Sloterm: return "sloterm";
    case RuntimePredicate::Prdsloterm: return "prdsloterm";
    case RuntimePredicate::Relational: return "relational";
    case RuntimePredicate::Builtin: return "builtin";
    case RuntimePredicate::Equal: return "=";
  }
  return "?";
}

std::string RuntimeAtom::key() const {
  std::string base = to_string(predicate);
  if (predicate == RuntimePredicate::Relational || predicate == RuntimePredicate::Builtin)
    base = mangle_constant(name);
  return base + "/" + std::to_string(args.size());
}

bool operator==(const RuntimeAtom& a, const RuntimeAtom& b) {
  return a.predicate == b.predicate && a.name == b.name && a.args == b.args;
}

RuntimeAtom to_runtime_atom(const Formula& f) { return map_leaf(f); }

namespace {

// memterm(O, p) with O still unbound would enumerate every object; when a
// later descriptor goal on O follows (past non-builtin goals only), call it
// after that goal instead.
void order_memberships(std::vector<RuntimeAtom>& body) {
  auto mentions = [](const RuntimeAtom& a, const Term& v) {
    return std::find(a.args.begin(), a.args.end(), v) != a.args.end();
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i].predicate != RuntimePredicate::Memterm || !body[i].args[0].is_variable()) continue;
    const Term o = body[i].args[0];
    bool bound = false;
    for (std::size_t j = 0; j < i && !bound; ++j) bound = mentions(body[j], o);
    if (bound) continue;
    for (std::size_t j = i + 1; j < body.size(); ++j) {
      auto p = body[j].predicate;
      if (p == RuntimePredicate::Builtin || p == RuntimePredicate::Equal || p == RuntimePredicate::Memterm) break;
      if (p != RuntimePredicate::Relational && body[j].args[0] == o) {
        RuntimeAtom m = body[i];
        body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
        body.insert(body.begin() + static_cast<std::ptrdiff_t>(j), std::move(m));
        break;
      }
    }
  }
}

}  // namespace

std::vector<RuntimeClause> to_runtime(const KnowledgeBase& kb) {
  std::vector<RuntimeClause> out;
  out.push_back({make(RuntimePredicate::Memterm, {Term(Variable{"X"}), top()}), {}});
  FreshNames fresh(kb);
  Compiler compiler(fresh, "$or");
  for (const auto& st : kb.asserts) {
    const auto* c = std::get_if<Clause>(&st);
    if (!c) throw ConversionError("default fact reached runtime conversion; run the pipeline first");
    std::vector<RuntimeAtom> heads;
    collect_heads(c->head, heads);
    std::vector<RuntimeAtom> body;
    if (c->condition) compiler.body(*c->condition, body);
    for (auto& h : heads) out.push_back({std::move(h), body});
  }
  for (auto& a : compiler.aux) out.push_back(std::move(a));
  for (auto& c : out) order_memberships(c.body);
  return out;
}

RuntimeQuery to_runtime_query(const Formula& prepared) {
  FreshNames fresh(prepared);
  Compiler compiler(fresh, "$qor");
  RuntimeQuery q;
  compiler.body(prepared, q.body);
  q.aux = std::move(compiler.aux);
  order_memberships(q.body);
  for (auto& c : q.aux) order_memberships(c.body);
  return q;
}

std::string emit_prolog(const std::vector<RuntimeClause>& clauses) {
  if (clauses.empty()) return {};
  std::vector<std::string> defined;
  std::set<std::string> defined_set;
  std::vector<std::string> called;
  auto indicator = [](const RuntimeAtom& a) {
    std::string name = a.predicate == RuntimePredicate::Relational ? mangle_constant(a.name) : to_string(a.predicate);
    return name + "/" + std::to_string(a.args.size());
  };
  for (const auto& c : clauses) {
    std::string ind = indicator(c.head);
    if (defined_set.insert(ind).second) defined.push_back(ind);
  }
  for (const auto& c : clauses)
    for (const auto& b : c.body) {
      if (b.predicate == RuntimePredicate::Builtin || b.predicate == RuntimePredicate::Equal) continue;
      std::string ind = indicator(b);
      if (!defined_set.count(ind) && std::find(called.begin(), called.end(), ind) == called.end())
        called.push_back(ind);
    }

  std::string out;
  for (const auto& d : defined) out += ":- table " + d + ".\n";
  for (const auto& d : called) out += ":- dynamic " + d + ".\n";
  for (const auto& c : clauses) {
    VarNames vars;
    out += prolog_atom(c.head, vars);
    for (std::size_t i = 0; i < c.body.size(); ++i) out += (i ? ", " : " :- ") + prolog_atom(c.body[i], vars);
    out += ".\n";
  }
  return out;
}

std::string emit_tptp(const std::vector<RuntimeClause>& clauses) {
  std::string out;
  int n = 0;
  for (const auto& c : clauses) {
    VarNames vars;
    auto names = clause_vars(c);
    std::string prefix;
    if (!names.empty()) {
      prefix = "![";
      for (std::size_t i = 0; i < names.size(); ++i) prefix += (i ? "," : "") + vars(names[i]);
      prefix += "]: ";
    }
    std::string core = tptp_atom(c.head, vars);
    if (!c.body.empty()) {
      std::string body = "(";
      for (std::size_t i = 0; i < c.body.size(); ++i) body += (i ? " & " : "") + tptp_atom(c.body[i], vars);
      core = body + ") => " + core;
    }
    std::string formula = names.empty() ? (c.body.empty() ? core : "(" + core + ")") : prefix + "(" + core + ")";
    out += "fof(ax" + std::to_string(++n) + ", axiom, " + formula + ").\n";
  }
  return out;
}

std::string emit_tptp(const KnowledgeBase& kb) {
  std::string out = "fof(ax1, axiom, ![X]: memterm(X,'Top')).\n";
  int n = 1;
  for (const auto& st : kb.asserts) {
    const auto* c = std::get_if<Clause>(&st);
    if (!c) throw ConversionError("default fact reached TPTP emission; run the pipeline first");
    VarNames vars;
    std::string prefix;
    if (!c->forall.empty()) {
      prefix = "![";
      for (std::size_t i = 0; i < c->forall.size(); ++i) prefix += (i ? "," : "") + vars(c->forall[i].name);
      prefix += "]: ";
    }
    std::string core = tptp_formula(c->head, vars);
    if (c->condition) core = "(" + tptp_formula(*c->condition, vars) + " => " + core + ")";
    out += "fof(ax" + std::to_string(++n) + ", axiom, " + prefix + core + ").\n";
  }
  return out;
}

std::string emit_tptp_query(const Formula& prepared) {
  VarNames vars;
  auto free = free_variables(prepared);
  std::string prefix;
  if (!free.empty()) {
    prefix = "?[";
    for (std::size_t i = 0; i < free.size(); ++i) prefix += (i ? "," : "") + vars(free[i].name);
    prefix += "]: ";
  }
  return "fof(q, conjecture, " + prefix + tptp_formula(prepared, vars) + ").\n";
}

std::vector<RuntimeClause> read_prolog(const std::string& text) { return PrologReader(text).read(); }

bool alpha_equivalent(const RuntimeClause& a, const RuntimeClause& b) {
  if (a.body.size() != b.body.size()) return false;
  std::map<std::string, std::string> fw, bw;
  if (!alpha_atoms(a.head, b.head, fw, bw)) return false;
  for (std::size_t i = 0; i < a.body.size(); ++i)
    if (!alpha_atoms(a.body[i], b.body[i], fw, bw)) return false;
  return true;
}

std::string print_runtime_atom(const RuntimeAtom& a) {
  PrintOptions opt;
  std::string out;
  if (a.predicate == RuntimePredicate::Relational || a.predicate == RuntimePredicate::Builtin)
    out = print_constant(a.name, opt);
  else
    out = to_string(a.predicate);
  out += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) out += (i ? ", " : "") + print_term(a.args[i], opt);
  return out + ")";
}

std::string print_runtime_clause(const RuntimeClause& c) {
  std::string out = print_runtime_atom(c.head);
  for (std::size_t i = 0; i < c.body.size(); ++i) out += (i ? ", " : " :- ") + print_runtime_atom(c.body[i]);
  return out;
}

}  // namespace psoa
