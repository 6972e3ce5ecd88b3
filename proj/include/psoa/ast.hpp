// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "psoa/decimal.hpp"
#include "psoa/error.hpp"

namespace psoa {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline constexpr const char* kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr const char* kPredNs = "http://www.w3.org/2007/rif-builtin-predicate#";
inline constexpr const char* kFuncNs = "http://www.w3.org/2007/rif-builtin-function#";

// Presentation syntax flavour. Auto (parser only) picks Unabridged when the
// text starts with `RuleML(`.
enum class SyntaxMode { Unabridged, Abridged, Auto };

// ---------------------------------------------------------------- constants

class Constant {
 public:
  enum class Kind { Local, Iri, Literal, Number };

  static Constant local(std::string name) { return Constant(Kind::Local, std::move(name)); }
  static Constant iri(std::string iri) { return Constant(Kind::Iri, std::move(iri)); }
  static Constant literal(std::string lexical, std::string symspace) {
    Constant c(Kind::Literal, std::move(lexical));
    c.symspace_ = std::move(symspace);
    return c;
  }
  static Constant string(std::string lexical) { return literal(std::move(lexical), std::string(kXsdNs) + "string"); }
  static Constant number(Decimal v) {
    Constant c(Kind::Number, {});
    c.number_ = std::move(v);
    return c;
  }
  static Constant number(long long v) { return number(Decimal(v)); }
  static Constant top() { return local("Top"); }

  Kind kind() const { return kind_; }
  bool is_local() const { return kind_ == Kind::Local; }
  bool is_iri() const { return kind_ == Kind::Iri; }
  bool is_literal() const { return kind_ == Kind::Literal; }
  bool is_number() const { return kind_ == Kind::Number; }
  bool is_top() const { return kind_ == Kind::Local && text_ == "Top"; }

  // Local name, IRI, or literal lexical form. Empty for numbers.
  const std::string& text() const { return text_; }
  const std::string& symspace() const { return symspace_; }
  const Decimal& value() const { return number_; }

  friend int compare(const Constant& a, const Constant& b);
  friend bool operator==(const Constant& a, const Constant& b) { return compare(a, b) == 0; }
  friend bool operator<(const Constant& a, const Constant& b) { return compare(a, b) < 0; }

 private:
  Constant(Kind k, std::string text) : kind_(k), text_(std::move(text)) {}

  Kind kind_;
  std::string text_;
  std::string symspace_;
  Decimal number_;
};

struct Variable {
  std::string name;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

// -------------------------------------------------------------------- terms

struct Psoa;
struct ExternalTerm;

// Immutable, cheaply copyable term handle.
class Term {
 public:
  using Node = std::variant<Constant, Variable, Psoa, ExternalTerm>;

  Term() = default;
  Term(Constant c);
  Term(Variable v);
  Term(Psoa p);
  Term(ExternalTerm e);

  inline const Node& node() const;
  bool valid() const { return static_cast<bool>(node_); }

  bool is_constant() const;
  bool is_variable() const;
  bool is_psoa() const;
  bool is_external() const;
  const Constant& constant() const;
  const Variable& variable() const;
  const Psoa& psoa() const;
  const ExternalTerm& external() const;

  friend int compare(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

 private:
  std::shared_ptr<const Node> node_;
};

enum class Dependency { Dependent, Independent };

struct Tuple {
  std::vector<Term> elements;
};

struct Slot {
  Term name;
  Term filler;
};

struct Descriptor {
  std::variant<Tuple, Slot> body;
  Dependency dependency = Dependency::Dependent;

  static Descriptor tuple(std::vector<Term> elems, Dependency d) { return {Tuple{std::move(elems)}, d}; }
  static Descriptor slot(Term name, Term filler, Dependency d) { return {Slot{std::move(name), std::move(filler)}, d}; }

  bool is_tuple() const { return std::holds_alternative<Tuple>(body); }
  bool is_slot() const { return std::holds_alternative<Slot>(body); }
  bool dependent() const { return dependency == Dependency::Dependent; }
  const Tuple& as_tuple() const { return std::get<Tuple>(body); }
  const Slot& as_slot() const { return std::get<Slot>(body); }

  friend int compare(const Descriptor& a, const Descriptor& b);
  friend bool operator==(const Descriptor& a, const Descriptor& b) { return compare(a, b) == 0; }
  friend bool operator<(const Descriptor& a, const Descriptor& b) { return compare(a, b) < 0; }
};

// A psoa atom: optional OID, predicate, descriptors. Oidless ones double as
// expressions (function applications) when used in term position.
struct Psoa {
  std::optional<Term> oid;
  Term predicate;
  std::vector<Descriptor> descriptors;

  bool oidful() const { return oid.has_value(); }

  friend int compare(const Psoa& a, const Psoa& b);
  friend bool operator==(const Psoa& a, const Psoa& b) { return compare(a, b) == 0; }
  friend bool operator<(const Psoa& a, const Psoa& b) { return compare(a, b) < 0; }
};

struct ExternalTerm {
  Psoa expr;
};

// ----------------------------------------------------------------- formulas

struct And;
struct Or;
struct Exists;
struct AtomFormula;
struct Equal;
struct Subclass;
struct ExternalFormula;

class Formula {
 public:
  using Node = std::variant<And, Or, Exists, AtomFormula, Equal, Subclass, ExternalFormula>;

  Formula() = default;
  Formula(And f);
  Formula(Or f);
  Formula(Exists f);
  Formula(AtomFormula f);
  Formula(Equal f);
  Formula(Subclass f);
  Formula(ExternalFormula f);
  Formula(Psoa atom);

  inline const Node& node() const;
  bool valid() const { return static_cast<bool>(node_); }

  template <class T>
  bool is() const;
  template <class T>
  const T& as() const;

  friend int compare(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

 private:
  std::shared_ptr<const Node> node_;
};

struct And {
  std::vector<Formula> conjuncts;
};
struct Or {
  std::vector<Formula> disjuncts;
};
struct Exists {
  std::vector<Variable> vars;
  Formula body;
};
struct AtomFormula {
  Psoa atom;
};
struct Equal {
  Term left;
  Term right;
};
struct Subclass {
  Term sub;
  Term super;
};
struct ExternalFormula {
  Psoa atom;
};

inline const Term::Node& Term::node() const { return *node_; }
inline const Formula::Node& Formula::node() const { return *node_; }
template <class T>
bool Formula::is() const {
  return std::holds_alternative<T>(*node_);
}
template <class T>
const T& Formula::as() const {
  return std::get<T>(*node_);
}

// ------------------------------------------------------------ KB structure

struct Clause {
  std::vector<Variable> forall;
  Formula head;
  std::optional<Formula> condition;

  bool is_fact() const { return !condition.has_value(); }
  friend bool operator==(const Clause& a, const Clause& b);
};

// f{...}: every member of f has these descriptors unless overridden.
struct DefaultFact {
  Term predicate;
  std::vector<Descriptor> descriptors;
  friend bool operator==(const DefaultFact& a, const DefaultFact& b);
};

using Statement = std::variant<Clause, DefaultFact>;

struct Prefix {
  std::string name;
  std::string iri;
  friend bool operator==(const Prefix&, const Prefix&) = default;
};

struct Import {
  std::string iri;
  std::optional<std::string> profile;
  friend bool operator==(const Import&, const Import&) = default;
};

struct KnowledgeBase {
  std::optional<std::string> base;
  std::vector<Prefix> prefixes;
  std::vector<Import> imports;
  std::vector<Statement> asserts;
  std::vector<Formula> queries;

  friend bool operator==(const KnowledgeBase& a, const KnowledgeBase& b);
};

// ------------------------------------------------------------------ helpers

inline Term local(std::string name) { return Term(Constant::local(std::move(name))); }
inline Term var(std::string name) { return Term(Variable{std::move(name)}); }
inline Term num(long long v) { return Term(Constant::number(v)); }
inline Term top() { return Term(Constant::top()); }

Psoa make_atom(std::optional<Term> oid, Term predicate, std::vector<Descriptor> descriptors = {});
Formula make_and(std::vector<Formula> conjuncts);
Clause make_fact(Formula head);

bool is_top(const Term& t);
bool is_ground(const Term& t);
bool is_ground(const Psoa& p);

// Canonical order: dependent tuples, independent tuples, dependent slots,
// independent slots; stable within each group.
std::vector<Descriptor> canonical_order(const std::vector<Descriptor>& ds);
Psoa canonicalize(const Psoa& p);

Descriptor reverse_descriptor(const Descriptor& d);
// With predicate Top every dependent descriptor becomes independent.
Psoa revert_top_dependents(const Psoa& p);

// Equality with descriptors compared as bags (order-insensitive, duplicates counted).
bool same_bag(const Psoa& a, const Psoa& b);

// Free variables in first-occurrence order.
std::vector<Variable> free_variables(const Formula& f);
std::vector<Variable> variables_of(const Term& t);
void collect_variables(const Term& t, std::vector<Variable>& out);
void collect_variables(const Psoa& p, std::vector<Variable>& out);

// Every variable name and every Local name occurring anywhere (for fresh-name generation).
void collect_names(const KnowledgeBase& kb, std::set<std::string>& var_names, std::set<std::string>& local_names);
void collect_names(const Formula& f, std::set<std::string>& var_names, std::set<std::string>& local_names);

// Closes a statement over its free variables: Forall ?x...(...) gains any missing ones.
std::vector<Variable> clause_free_variables(const Clause& c);

// Applies `fn` to every atom (AtomFormula) in a formula, rebuilding the tree.
template <class Fn>
Formula map_atoms(const Formula& f, Fn&& fn);

// Term substitution.
Term substitute(const Term& t, const std::vector<std::pair<Variable, Term>>& s);
Psoa substitute(const Psoa& p, const std::vector<std::pair<Variable, Term>>& s);
Formula substitute(const Formula& f, const std::vector<std::pair<Variable, Term>>& s);

// Π{Δ...} to Forall ?o (?o#Π'(Δ...) :- ?o#Π), Π' = Π if some Δ is dependent,
// else Top. ?o is renamed if the descriptors already use it.
Clause expand_default_fact(const DefaultFact& d);

// Atoms appearing as formulas, in left-to-right order (not nested term atoms).
std::vector<Psoa> formula_atoms(const Formula& f);

// ----------------------------------------------------------- implementation

template <class Fn>
Formula map_atoms(const Formula& f, Fn&& fn) {
  return std::visit(
      overloaded{
          [&](const And& a) -> Formula {
            And out;
            for (const auto& c : a.conjuncts) out.conjuncts.push_back(map_atoms(c, fn));
            return out;
          },
          [&](const Or& o) -> Formula {
            Or out;
            for (const auto& c : o.disjuncts) out.disjuncts.push_back(map_atoms(c, fn));
            return out;
          },
          [&](const Exists& e) -> Formula { return Exists{e.vars, map_atoms(e.body, fn)}; },
          [&](const AtomFormula& a) -> Formula { return fn(a.atom); },
          [&](const auto&) -> Formula { return f; },
      },
      f.node());
}

}  // namespace psoa
