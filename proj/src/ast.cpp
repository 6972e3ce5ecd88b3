// SPDX-License-Identifier: Apache-2.0
#include "psoa/ast.hpp"

#include <algorithm>

namespace psoa {

std::string ParseDiagnostic::to_string() const {
  std::string sev = severity == Severity::Warning ? "warning" : "error";
  return std::to_string(line) + ":" + std::to_string(column) + ": " + sev + ": " + message;
}

// ---------------------------------------------------------------- compare

namespace {

template <class T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

template <class T>
int compare_vec(const std::vector<T>& a, const std::vector<T>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a[i], b[i])) return c;
  return cmp3(a.size(), b.size());
}

int compare_vars(const std::vector<Variable>& a, const std::vector<Variable>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = a[i].name.compare(b[i].name)) return c < 0 ? -1 : 1;
  return cmp3(a.size(), b.size());
}

int compare_str(const std::string& a, const std::string& b) {
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

int compare(const Constant& a, const Constant& b) {
  if (a.kind_ != b.kind_) return cmp3(static_cast<int>(a.kind_), static_cast<int>(b.kind_));
  switch (a.kind_) {
    case Constant::Kind::Number:
      return a.number_ == b.number_ ? 0 : (a.number_ < b.number_ ? -1 : 1);
    case Constant::Kind::Literal:
      if (int c = compare_str(a.text_, b.text_)) return c;
      return compare_str(a.symspace_, b.symspace_);
    default:
      return compare_str(a.text_, b.text_);
  }
}

int compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.index() != y.index()) return cmp3(x.index(), y.index());
  return std::visit(
      overloaded{
          [&](const Constant& c) { return compare(c, std::get<Constant>(y)); },
          [&](const Variable& v) { return compare_str(v.name, std::get<Variable>(y).name); },
          [&](const Psoa& p) { return compare(p, std::get<Psoa>(y)); },
          [&](const ExternalTerm& e) { return compare(e.expr, std::get<ExternalTerm>(y).expr); },
      },
      x);
}

int compare(const Descriptor& a, const Descriptor& b) {
  if (a.is_tuple() != b.is_tuple()) return a.is_tuple() ? -1 : 1;
  if (a.dependency != b.dependency) return a.dependent() ? -1 : 1;
  if (a.is_tuple()) return compare_vec(a.as_tuple().elements, b.as_tuple().elements);
  if (int c = compare(a.as_slot().name, b.as_slot().name)) return c;
  return compare(a.as_slot().filler, b.as_slot().filler);
}

int compare(const Psoa& a, const Psoa& b) {
  if (a.oid.has_value() != b.oid.has_value()) return a.oid.has_value() ? 1 : -1;
  if (a.oid)
    if (int c = compare(*a.oid, *b.oid)) return c;
  if (int c = compare(a.predicate, b.predicate)) return c;
  return compare_vec(a.descriptors, b.descriptors);
}

int compare(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return 0;
  const auto& x = a.node();
  const auto& y = b.node();
  if (x.index() != y.index()) return cmp3(x.index(), y.index());
  return std::visit(
      overloaded{
          [&](const And& f) { return compare_vec(f.conjuncts, std::get<And>(y).conjuncts); },
          [&](const Or& f) { return compare_vec(f.disjuncts, std::get<Or>(y).disjuncts); },
          [&](const Exists& f) {
            const auto& g = std::get<Exists>(y);
            if (int c = compare_vars(f.vars, g.vars)) return c;
            return compare(f.body, g.body);
          },
          [&](const AtomFormula& f) { return compare(f.atom, std::get<AtomFormula>(y).atom); },
          [&](const Equal& f) {
            const auto& g = std::get<Equal>(y);
            if (int c = compare(f.left, g.left)) return c;
            return compare(f.right, g.right);
          },
          [&](const Subclass& f) {
            const auto& g = std::get<Subclass>(y);
            if (int c = compare(f.sub, g.sub)) return c;
            return compare(f.super, g.super);
          },
          [&](const ExternalFormula& f) { return compare(f.atom, std::get<ExternalFormula>(y).atom); },
      },
      x);
}

bool operator==(const Clause& a, const Clause& b) {
  if (compare_vars(a.forall, b.forall) != 0) return false;
  if (a.head != b.head) return false;
  if (a.condition.has_value() != b.condition.has_value()) return false;
  return !a.condition || *a.condition == *b.condition;
}

bool operator==(const DefaultFact& a, const DefaultFact& b) {
  return a.predicate == b.predicate && a.descriptors == b.descriptors;
}

bool operator==(const KnowledgeBase& a, const KnowledgeBase& b) {
  return a.base == b.base && a.prefixes == b.prefixes && a.imports == b.imports && a.asserts == b.asserts &&
         a.queries == b.queries;
}

// ------------------------------------------------------------ constructors

Term::Term(Constant c) : node_(std::make_shared<const Node>(std::move(c))) {}
Term::Term(Variable v) : node_(std::make_shared<const Node>(std::move(v))) {}
Term::Term(Psoa p) : node_(std::make_shared<const Node>(std::move(p))) {}
Term::Term(ExternalTerm e) : node_(std::make_shared<const Node>(std::move(e))) {}

bool Term::is_constant() const { return std::holds_alternative<Constant>(*node_); }
bool Term::is_variable() const { return std::holds_alternative<Variable>(*node_); }
bool Term::is_psoa() const { return std::holds_alternative<Psoa>(*node_); }
bool Term::is_external() const { return std::holds_alternative<ExternalTerm>(*node_); }
const Constant& Term::constant() const { return std::get<Constant>(*node_); }
const Variable& Term::variable() const { return std::get<Variable>(*node_); }
const Psoa& Term::psoa() const { return std::get<Psoa>(*node_); }
const ExternalTerm& Term::external() const { return std::get<ExternalTerm>(*node_); }

Formula::Formula(And f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(Or f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(Exists f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(AtomFormula f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(Equal f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(Subclass f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(ExternalFormula f) : node_(std::make_shared<const Node>(std::move(f))) {}
Formula::Formula(Psoa atom) : Formula(AtomFormula{std::move(atom)}) {}

// ------------------------------------------------------------------ helpers

Psoa make_atom(std::optional<Term> oid, Term predicate, std::vector<Descriptor> descriptors) {
  return Psoa{std::move(oid), std::move(predicate), std::move(descriptors)};
}

Formula make_and(std::vector<Formula> conjuncts) { return And{std::move(conjuncts)}; }

Clause make_fact(Formula head) { return Clause{{}, std::move(head), std::nullopt}; }

bool is_top(const Term& t) { return t.valid() && t.is_constant() && t.constant().is_top(); }

bool is_ground(const Psoa& p) {
  if (p.oid && !is_ground(*p.oid)) return false;
  if (!is_ground(p.predicate)) return false;
  for (const auto& d : p.descriptors) {
    if (d.is_tuple()) {
      for (const auto& e : d.as_tuple().elements)
        if (!is_ground(e)) return false;
    } else if (!is_ground(d.as_slot().name) || !is_ground(d.as_slot().filler)) {
      return false;
    }
  }
  return true;
}

bool is_ground(const Term& t) {
  return std::visit(overloaded{
                        [](const Constant&) { return true; },
                        [](const Variable&) { return false; },
                        [](const Psoa& p) { return is_ground(p); },
                        [](const ExternalTerm& e) { return is_ground(e.expr); },
                    },
                    t.node());
}

std::vector<Descriptor> canonical_order(const std::vector<Descriptor>& ds) {
  std::vector<Descriptor> out;
  out.reserve(ds.size());
  auto take = [&](bool tuple, bool dependent) {
    for (const auto& d : ds)
      if (d.is_tuple() == tuple && d.dependent() == dependent) out.push_back(d);
  };
  take(true, true);
  take(true, false);
  take(false, true);
  take(false, false);
  return out;
}

Psoa canonicalize(const Psoa& p) { return Psoa{p.oid, p.predicate, canonical_order(p.descriptors)}; }

Descriptor reverse_descriptor(const Descriptor& d) {
  Descriptor r = d;
  r.dependency = d.dependent() ? Dependency::Independent : Dependency::Dependent;
  return r;
}

Psoa revert_top_dependents(const Psoa& p) {
  if (!is_top(p.predicate)) return p;
  Psoa r = p;
  for (auto& d : r.descriptors) d.dependency = Dependency::Independent;
  return r;
}

bool same_bag(const Psoa& a, const Psoa& b) {
  if (a.oid.has_value() != b.oid.has_value()) return false;
  if (a.oid && *a.oid != *b.oid) return false;
  if (a.predicate != b.predicate) return false;
  auto x = a.descriptors;
  auto y = b.descriptors;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

namespace {

void add_unique(std::vector<Variable>& out, const Variable& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

void free_vars_rec(const Formula& f, std::vector<Variable> bound, std::vector<Variable>& out);

void free_vars_term(const Term& t, const std::vector<Variable>& bound, std::vector<Variable>& out) {
  std::vector<Variable> vs;
  collect_variables(t, vs);
  for (const auto& v : vs)
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) add_unique(out, v);
}

void free_vars_psoa(const Psoa& p, const std::vector<Variable>& bound, std::vector<Variable>& out) {
  std::vector<Variable> vs;
  collect_variables(p, vs);
  for (const auto& v : vs)
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) add_unique(out, v);
}

void free_vars_rec(const Formula& f, std::vector<Variable> bound, std::vector<Variable>& out) {
  std::visit(overloaded{
                 [&](const And& a) {
                   for (const auto& c : a.conjuncts) free_vars_rec(c, bound, out);
                 },
                 [&](const Or& o) {
                   for (const auto& c : o.disjuncts) free_vars_rec(c, bound, out);
                 },
                 [&](const Exists& e) {
                   auto b = bound;
                   b.insert(b.end(), e.vars.begin(), e.vars.end());
                   free_vars_rec(e.body, b, out);
                 },
                 [&](const AtomFormula& a) { free_vars_psoa(a.atom, bound, out); },
                 [&](const Equal& e) {
                   free_vars_term(e.left, bound, out);
                   free_vars_term(e.right, bound, out);
                 },
                 [&](const Subclass& s) {
                   free_vars_term(s.sub, bound, out);
                   free_vars_term(s.super, bound, out);
                 },
                 [&](const ExternalFormula& e) { free_vars_psoa(e.atom, bound, out); },
             },
             f.node());
}

}  // namespace

void collect_variables(const Psoa& p, std::vector<Variable>& out) {
  if (p.oid) collect_variables(*p.oid, out);
  collect_variables(p.predicate, out);
  for (const auto& d : p.descriptors) {
    if (d.is_tuple()) {
      for (const auto& e : d.as_tuple().elements) collect_variables(e, out);
    } else {
      collect_variables(d.as_slot().name, out);
      collect_variables(d.as_slot().filler, out);
    }
  }
}

void collect_variables(const Term& t, std::vector<Variable>& out) {
  std::visit(overloaded{
                 [](const Constant&) {},
                 [&](const Variable& v) { add_unique(out, v); },
                 [&](const Psoa& p) { collect_variables(p, out); },
                 [&](const ExternalTerm& e) { collect_variables(e.expr, out); },
             },
             t.node());
}

std::vector<Variable> variables_of(const Term& t) {
  std::vector<Variable> out;
  collect_variables(t, out);
  return out;
}

std::vector<Variable> free_variables(const Formula& f) {
  std::vector<Variable> out;
  free_vars_rec(f, {}, out);
  return out;
}

std::vector<Variable> clause_free_variables(const Clause& c) {
  std::vector<Variable> out;
  free_vars_rec(c.head, c.forall, out);
  if (c.condition) free_vars_rec(*c.condition, c.forall, out);
  return out;
}

namespace {

struct NameCollector {
  std::set<std::string>& vars;
  std::set<std::string>& locals;

  void term(const Term& t) {
    std::visit(overloaded{
                   [&](const Constant& c) {
                     if (c.is_local()) locals.insert(c.text());
                   },
                   [&](const Variable& v) { vars.insert(v.name); },
                   [&](const Psoa& p) { psoa(p); },
                   [&](const ExternalTerm& e) { psoa(e.expr); },
               },
               t.node());
  }
  void psoa(const Psoa& p) {
    if (p.oid) term(*p.oid);
    term(p.predicate);
    descriptors(p.descriptors);
  }
  void descriptors(const std::vector<Descriptor>& ds) {
    for (const auto& d : ds) {
      if (d.is_tuple()) {
        for (const auto& e : d.as_tuple().elements) term(e);
      } else {
        term(d.as_slot().name);
        term(d.as_slot().filler);
      }
    }
  }
  void formula(const Formula& f) {
    std::visit(overloaded{
                   [&](const And& a) {
                     for (const auto& c : a.conjuncts) formula(c);
                   },
                   [&](const Or& o) {
                     for (const auto& c : o.disjuncts) formula(c);
                   },
                   [&](const Exists& e) {
                     for (const auto& v : e.vars) vars.insert(v.name);
                     formula(e.body);
                   },
                   [&](const AtomFormula& a) { psoa(a.atom); },
                   [&](const Equal& e) {
                     term(e.left);
                     term(e.right);
                   },
                   [&](const Subclass& s) {
                     term(s.sub);
                     term(s.super);
                   },
                   [&](const ExternalFormula& e) { psoa(e.atom); },
               },
               f.node());
  }
};

}  // namespace

void collect_names(const Formula& f, std::set<std::string>& var_names, std::set<std::string>& local_names) {
  NameCollector{var_names, local_names}.formula(f);
}

void collect_names(const KnowledgeBase& kb, std::set<std::string>& var_names, std::set<std::string>& local_names) {
  NameCollector nc{var_names, local_names};
  for (const auto& st : kb.asserts) {
    if (const auto* c = std::get_if<Clause>(&st)) {
      for (const auto& v : c->forall) var_names.insert(v.name);
      nc.formula(c->head);
      if (c->condition) nc.formula(*c->condition);
    } else {
      const auto& d = std::get<DefaultFact>(st);
      nc.term(d.predicate);
      nc.descriptors(d.descriptors);
    }
  }
  for (const auto& q : kb.queries) nc.formula(q);
}

Term substitute(const Term& t, const std::vector<std::pair<Variable, Term>>& s) {
  return std::visit(overloaded{
                        [&](const Constant&) { return t; },
                        [&](const Variable& v) {
                          for (const auto& [k, val] : s)
                            if (k == v) return val;
                          return t;
                        },
                        [&](const Psoa& p) { return Term(substitute(p, s)); },
                        [&](const ExternalTerm& e) { return Term(ExternalTerm{substitute(e.expr, s)}); },
                    },
                    t.node());
}

Psoa substitute(const Psoa& p, const std::vector<std::pair<Variable, Term>>& s) {
  Psoa r;
  if (p.oid) r.oid = substitute(*p.oid, s);
  r.predicate = substitute(p.predicate, s);
  r.descriptors.reserve(p.descriptors.size());
  for (const auto& d : p.descriptors) {
    if (d.is_tuple()) {
      std::vector<Term> es;
      for (const auto& e : d.as_tuple().elements) es.push_back(substitute(e, s));
      r.descriptors.push_back(Descriptor::tuple(std::move(es), d.dependency));
    } else {
      r.descriptors.push_back(
          Descriptor::slot(substitute(d.as_slot().name, s), substitute(d.as_slot().filler, s), d.dependency));
    }
  }
  return r;
}

Formula substitute(const Formula& f, const std::vector<std::pair<Variable, Term>>& s) {
  return std::visit(
      overloaded{
          [&](const And& a) -> Formula {
            And out;
            for (const auto& c : a.conjuncts) out.conjuncts.push_back(substitute(c, s));
            return out;
          },
          [&](const Or& o) -> Formula {
            Or out;
            for (const auto& c : o.disjuncts) out.disjuncts.push_back(substitute(c, s));
            return out;
          },
          [&](const Exists& e) -> Formula {
            std::vector<std::pair<Variable, Term>> inner;
            for (const auto& kv : s)
              if (std::find(e.vars.begin(), e.vars.end(), kv.first) == e.vars.end()) inner.push_back(kv);
            return Exists{e.vars, substitute(e.body, inner)};
          },
          [&](const AtomFormula& a) -> Formula { return AtomFormula{substitute(a.atom, s)}; },
          [&](const Equal& e) -> Formula { return Equal{substitute(e.left, s), substitute(e.right, s)}; },
          [&](const Subclass& c) -> Formula { return Subclass{substitute(c.sub, s), substitute(c.super, s)}; },
          [&](const ExternalFormula& e) -> Formula { return ExternalFormula{substitute(e.atom, s)}; },
      },
      f.node());
}

Clause expand_default_fact(const DefaultFact& d) {
  std::vector<Variable> used;
  Psoa probe{std::nullopt, d.predicate, d.descriptors};
  collect_variables(probe, used);
  std::string name = "o";
  for (int i = 1; std::find(used.begin(), used.end(), Variable{name}) != used.end(); ++i) name = "o" + std::to_string(i);
  Variable o{name};
  bool any_dependent = std::any_of(d.descriptors.begin(), d.descriptors.end(), [](const Descriptor& x) { return x.dependent(); });
  Term pred = any_dependent ? d.predicate : top();
  Clause c;
  c.forall.push_back(o);
  for (const auto& v : used) c.forall.push_back(v);
  c.head = Formula(Psoa{Term(o), pred, d.descriptors});
  c.condition = Formula(Psoa{Term(o), d.predicate, {}});
  return c;
}

namespace {
void atoms_rec(const Formula& f, std::vector<Psoa>& out) {
  std::visit(overloaded{
                 [&](const And& a) {
                   for (const auto& c : a.conjuncts) atoms_rec(c, out);
                 },
                 [&](const Or& o) {
                   for (const auto& c : o.disjuncts) atoms_rec(c, out);
                 },
                 [&](const Exists& e) { atoms_rec(e.body, out); },
                 [&](const AtomFormula& a) { out.push_back(a.atom); },
                 [](const auto&) {},
             },
             f.node());
}
}  // namespace

std::vector<Psoa> formula_atoms(const Formula& f) {
  std::vector<Psoa> out;
  atoms_rec(f, out);
  return out;
}

}  // namespace psoa
