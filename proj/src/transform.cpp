// SPDX-License-Identifier: Apache-2.0
#include "psoa/transform.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace psoa {

// ------------------------------------------------------------ FreshNames

FreshNames::FreshNames(const KnowledgeBase& kb) { reserve(kb); }
FreshNames::FreshNames(const Formula& f) { reserve(f); }

void FreshNames::reserve(const KnowledgeBase& kb) { collect_names(kb, vars_, locals_); }
void FreshNames::reserve(const Formula& f) { collect_names(f, vars_, locals_); }

Variable FreshNames::var(const std::string& stem) {
  for (;;) {
    std::string name = "_" + stem + std::to_string(next_var_++);
    if (vars_.insert(name).second) return Variable{name};
  }
}

Constant FreshNames::integer_local() {
  for (;;) {
    std::string name = std::to_string(next_int_++);
    if (locals_.insert(name).second) return Constant::local(name);
  }
}

Constant FreshNames::skolem_symbol() {
  for (;;) {
    std::string name = "skolem" + std::to_string(next_skolem_++);
    if (locals_.insert(name).second) return Constant::local(name);
  }
}

bool RelationalPredicateSet::contains(const Term& predicate) const {
  return predicate.is_constant() && arities.count(predicate.constant()) > 0;
}

namespace {

template <class Fn>
KnowledgeBase map_clauses(const KnowledgeBase& kb, Fn&& fn) {
  KnowledgeBase out = kb;
  out.asserts.clear();
  for (const auto& st : kb.asserts) {
    if (const auto* c = std::get_if<Clause>(&st)) {
      for (auto& r : fn(*c)) out.asserts.emplace_back(std::move(r));
    } else {
      out.asserts.push_back(st);
    }
  }
  return out;
}

std::vector<Descriptor> map_descriptor_terms(const std::vector<Descriptor>& ds, const std::function<Term(const Term&)>& fn) {
  std::vector<Descriptor> out;
  out.reserve(ds.size());
  for (const auto& d : ds) {
    if (d.is_tuple()) {
      std::vector<Term> es;
      for (const auto& e : d.as_tuple().elements) es.push_back(fn(e));
      out.push_back(Descriptor::tuple(std::move(es), d.dependency));
    } else {
      out.push_back(Descriptor::slot(fn(d.as_slot().name), fn(d.as_slot().filler), d.dependency));
    }
  }
  return out;
}

Psoa map_psoa_terms(const Psoa& p, const std::function<Term(const Term&)>& fn) {
  Psoa r;
  if (p.oid) r.oid = fn(*p.oid);
  r.predicate = fn(p.predicate);
  r.descriptors = map_descriptor_terms(p.descriptors, fn);
  return r;
}

// Generic bottom-up formula rewrite over the leaves (atoms, equations, ...).
Formula map_leaves(const Formula& f, const std::function<Formula(const Formula&)>& fn) {
  return std::visit(overloaded{
                        [&](const And& a) -> Formula {
                          And out;
                          for (const auto& c : a.conjuncts) out.conjuncts.push_back(map_leaves(c, fn));
                          return out;
                        },
                        [&](const Or& o) -> Formula {
                          Or out;
                          for (const auto& c : o.disjuncts) out.disjuncts.push_back(map_leaves(c, fn));
                          return out;
                        },
                        [&](const Exists& e) -> Formula { return Exists{e.vars, map_leaves(e.body, fn)}; },
                        [&](const auto&) -> Formula { return fn(f); },
                    },
                    f.node());
}

bool contains_subclass(const Formula& f) {
  return std::visit(overloaded{
                        [](const And& a) {
                          return std::any_of(a.conjuncts.begin(), a.conjuncts.end(), contains_subclass);
                        },
                        [](const Or& o) {
                          return std::any_of(o.disjuncts.begin(), o.disjuncts.end(), contains_subclass);
                        },
                        [](const Exists& e) { return contains_subclass(e.body); },
                        [](const Subclass&) { return true; },
                        [](const auto&) { return false; },
                    },
                    f.node());
}

bool term_has_external(const Term& t);

bool psoa_has_external(const Psoa& p) {
  if (p.oid && term_has_external(*p.oid)) return true;
  if (term_has_external(p.predicate)) return true;
  for (const auto& d : p.descriptors) {
    if (d.is_tuple()) {
      for (const auto& e : d.as_tuple().elements)
        if (term_has_external(e)) return true;
    } else if (term_has_external(d.as_slot().name) || term_has_external(d.as_slot().filler)) {
      return true;
    }
  }
  return false;
}

bool term_has_external(const Term& t) {
  return std::visit(overloaded{
                        [](const Psoa& p) { return psoa_has_external(p); },
                        [](const ExternalTerm&) { return true; },
                        [](const auto&) { return false; },
                    },
                    t.node());
}

bool formula_has_external_term(const Formula& f) {
  return std::visit(overloaded{
                        [](const And& a) {
                          return std::any_of(a.conjuncts.begin(), a.conjuncts.end(), formula_has_external_term);
                        },
                        [](const Or& o) {
                          return std::any_of(o.disjuncts.begin(), o.disjuncts.end(), formula_has_external_term);
                        },
                        [](const Exists& e) { return formula_has_external_term(e.body); },
                        [](const AtomFormula& a) { return psoa_has_external(a.atom); },
                        [](const Equal& e) { return term_has_external(e.left) || term_has_external(e.right); },
                        [](const Subclass& s) { return term_has_external(s.sub) || term_has_external(s.super); },
                        [](const ExternalFormula&) { return true; },
                    },
                    f.node());
}

// ---------------------------------------------------------------- unnest

// Replaces embedded oidful atoms by their OIDs, collecting the atoms
// innermost-first.
Term strip_term(const Term& t, std::vector<Formula>& hoisted);

Psoa strip_psoa(const Psoa& p, std::vector<Formula>& hoisted) {
  return map_psoa_terms(p, [&](const Term& t) { return strip_term(t, hoisted); });
}

Term strip_term(const Term& t, std::vector<Formula>& hoisted) {
  return std::visit(overloaded{
                        [&](const Psoa& p) -> Term {
                          Psoa inner = strip_psoa(p, hoisted);
                          if (!inner.oidful()) return Term(inner);
                          Term oid = *inner.oid;
                          hoisted.emplace_back(std::move(inner));
                          return oid;
                        },
                        [&](const ExternalTerm& e) -> Term { return Term(ExternalTerm{strip_psoa(e.expr, hoisted)}); },
                        [&](const auto&) -> Term { return t; },
                    },
                    t.node());
}

Formula unnest_leaf(const Formula& f) {
  std::vector<Formula> hoisted;
  Formula rebuilt = std::visit(
      overloaded{
          [&](const AtomFormula& a) -> Formula { return AtomFormula{strip_psoa(a.atom, hoisted)}; },
          [&](const ExternalFormula& e) -> Formula { return ExternalFormula{strip_psoa(e.atom, hoisted)}; },
          [&](const Equal& e) -> Formula {
            Term l = strip_term(e.left, hoisted);
            Term r = strip_term(e.right, hoisted);
            return Equal{l, r};
          },
          [&](const Subclass& s) -> Formula {
            Term a = strip_term(s.sub, hoisted);
            Term b = strip_term(s.super, hoisted);
            return Subclass{a, b};
          },
          [&](const auto&) -> Formula { return f; },
      },
      f.node());
  if (hoisted.empty()) return f;
  hoisted.push_back(rebuilt);
  return And{std::move(hoisted)};
}

// ------------------------------------------------------------- describute

void describe_into(const Formula& f, std::vector<Formula>& out);

bool is_top_membership(const Formula& f) {
  if (!f.is<AtomFormula>()) return false;
  const Psoa& a = f.as<AtomFormula>().atom;
  return a.oidful() && a.descriptors.empty() && is_top(a.predicate);
}

// o#Top holds for every o, so it adds nothing next to another atom about o.
// Repeated conjuncts are dropped too.
void drop_redundant_conjuncts(std::vector<Formula>& cs) {
  auto implied = [&](const Formula& m) {
    if (!is_top_membership(m)) return false;
    const Term& o = *m.as<AtomFormula>().atom.oid;
    return std::any_of(cs.begin(), cs.end(), [&](const Formula& f) {
      return !is_top_membership(f) && f.is<AtomFormula>() && f.as<AtomFormula>().atom.oid == o;
    });
  };
  std::vector<Formula> kept;
  for (const auto& f : cs)
    if (!implied(f) && std::find(kept.begin(), kept.end(), f) == kept.end()) kept.push_back(f);
  cs = std::move(kept);
}

Formula describe_rec(const Formula& f) {
  return std::visit(overloaded{
                        [&](const And&) -> Formula {
                          std::vector<Formula> cs;
                          describe_into(f, cs);
                          drop_redundant_conjuncts(cs);
                          return And{std::move(cs)};
                        },
                        [&](const Or& o) -> Formula {
                          Or out;
                          for (const auto& d : o.disjuncts) out.disjuncts.push_back(describe_rec(d));
                          return out;
                        },
                        [&](const Exists& e) -> Formula { return Exists{e.vars, describe_rec(e.body)}; },
                        [&](const AtomFormula& a) -> Formula {
                          if (!a.atom.oidful()) return f;
                          auto cs = describute_atom(a.atom);
                          drop_redundant_conjuncts(cs);
                          if (cs.size() == 1) return cs.front();
                          return And{std::move(cs)};
                        },
                        [&](const auto&) -> Formula { return f; },
                    },
                    f.node());
}

void push_unique(std::vector<Formula>& out, const Formula& f) {
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
}

// Flattens nested Ands and drops repeated conjuncts.
void describe_into(const Formula& f, std::vector<Formula>& out) {
  if (f.is<And>()) {
    for (const auto& c : f.as<And>().conjuncts) describe_into(c, out);
    return;
  }
  Formula d = describe_rec(f);
  if (d.is<And>()) {
    for (const auto& c : d.as<And>().conjuncts) push_unique(out, c);
  } else {
    push_unique(out, d);
  }
}

// ------------------------------------------------------------- objectify

struct Objectifier {
  ObjectificationMode mode;
  const RelationalPredicateSet& relational;
  FreshNames& fresh;

  bool keep_oidless(const Psoa& a) const {
    return mode == ObjectificationMode::StaticDynamic && relational.contains(a.predicate) &&
           a.descriptors.size() == 1 && a.descriptors[0].is_tuple() && a.descriptors[0].dependent();
  }

  // Head of a fact/rule. Without universals an OID constant is chosen directly.
  Formula head(const Formula& f, bool has_universals) {
    return map_atoms(f, [&](const Psoa& a) -> Formula {
      if (a.oidful() || keep_oidless(a)) return Formula(a);
      if (!has_universals) return Formula(Psoa{Term(fresh.integer_local()), a.predicate, a.descriptors});
      Variable o = fresh.var("o");
      return Exists{{o}, Formula(Psoa{Term(o), a.predicate, a.descriptors})};
    });
  }

  Formula condition(const Formula& f) {
    return map_atoms(f, [&](const Psoa& a) -> Formula {
      if (a.oidful() || keep_oidless(a)) return Formula(a);
      Variable o = fresh.var("o");
      return Exists{{o}, Formula(Psoa{Term(o), a.predicate, a.descriptors})};
    });
  }
};

// ------------------------------------------------------------- flatten

Formula flatten_leaf(const Formula& f, FreshNames& fresh) {
  std::vector<Variable> vars;
  std::vector<Formula> eqs;
  std::function<Term(const Term&)> lift = [&](const Term& t) -> Term {
    return std::visit(overloaded{
                          [&](const ExternalTerm&) -> Term {
                            Variable v = fresh.var("v");
                            vars.push_back(v);
                            eqs.emplace_back(Equal{Term(v), t});
                            return Term(v);
                          },
                          [&](const Psoa& p) -> Term { return Term(map_psoa_terms(p, lift)); },
                          [&](const auto&) -> Term { return t; },
                      },
                      t.node());
  };
  Formula rebuilt = std::visit(overloaded{
                                   [&](const AtomFormula& a) -> Formula { return AtomFormula{map_psoa_terms(a.atom, lift)}; },
                                   [&](const ExternalFormula& e) -> Formula {
                                     return ExternalFormula{map_psoa_terms(e.atom, lift)};
                                   },
                                   [&](const auto&) -> Formula { return f; },
                               },
                               f.node());
  if (vars.empty()) return f;
  eqs.push_back(rebuilt);
  return Exists{vars, And{std::move(eqs)}};
}

// --------------------------------------------------------------- skolem

Formula skolem_head(const Formula& f, const std::vector<Variable>& universals, FreshNames& fresh) {
  return std::visit(overloaded{
                        [&](const And& a) -> Formula {
                          And out;
                          for (const auto& c : a.conjuncts) out.conjuncts.push_back(skolem_head(c, universals, fresh));
                          return out;
                        },
                        [&](const Exists& e) -> Formula {
                          std::vector<std::pair<Variable, Term>> s;
                          for (const auto& v : e.vars) {
                            Constant fn = fresh.skolem_symbol();
                            if (universals.empty()) {
                              s.emplace_back(v, Term(fn));
                            } else {
                              std::vector<Term> args;
                              for (const auto& u : universals) args.emplace_back(u);
                              s.emplace_back(v, Term(Psoa{std::nullopt, Term(fn),
                                                          {Descriptor::tuple(std::move(args), Dependency::Dependent)}}));
                            }
                          }
                          return skolem_head(substitute(e.body, s), universals, fresh);
                        },
                        [&](const auto&) -> Formula { return f; },
                    },
                    f.node());
}

void split_head(const Formula& f, std::vector<Formula>& out) {
  if (f.is<And>()) {
    for (const auto& c : f.as<And>().conjuncts) split_head(c, out);
  } else {
    out.push_back(f);
  }
}

}  // namespace

// =================================================================== stages

KnowledgeBase expand_defaults(const KnowledgeBase& kb) {
  KnowledgeBase out = kb;
  out.asserts.clear();
  for (const auto& st : kb.asserts) {
    if (const auto* d = std::get_if<DefaultFact>(&st))
      out.asserts.emplace_back(expand_default_fact(*d));
    else
      out.asserts.push_back(st);
  }
  return out;
}

Formula unnest_formula(const Formula& f) { return map_leaves(f, unnest_leaf); }

KnowledgeBase unnest(const KnowledgeBase& kb) {
  return map_clauses(kb, [](const Clause& c) {
    Clause r = c;
    r.head = unnest_formula(c.head);
    if (c.condition) r.condition = unnest_formula(*c.condition);
    return std::vector<Clause>{r};
  });
}

KnowledgeBase rewrite_subpredicates(const KnowledgeBase& kb) {
  return map_clauses(kb, [](const Clause& c) {
    if (c.head.is<Subclass>() && !c.condition) {
      const auto& s = c.head.as<Subclass>();
      if (!is_ground(s.sub) || !is_ground(s.super))
        throw TransformError("subclass formula with variables is not supported: only ground f##g facts");
      Variable o{"o"};
      Clause r;
      r.forall = {o};
      r.head = Formula(Psoa{Term(o), s.super, {}});
      r.condition = Formula(Psoa{Term(o), s.sub, {}});
      return std::vector<Clause>{r};
    }
    if (contains_subclass(c.head) || (c.condition && contains_subclass(*c.condition)))
      throw TransformError("subclass formula is only supported as a ground fact");
    return std::vector<Clause>{c};
  });
}

RelationalPredicateSet detect_relational_predicates(const KnowledgeBase& kb) {
  std::map<Constant, std::set<std::size_t>> candidates;
  std::set<Constant> disqualified;
  auto scan = [&](const Formula& f) {
    for (const auto& a : formula_atoms(f)) {
      if (!a.predicate.is_constant()) continue;
      const Constant& p = a.predicate.constant();
      bool relational_shape =
          !a.oidful() && a.descriptors.size() == 1 && a.descriptors[0].is_tuple() && a.descriptors[0].dependent();
      if (relational_shape && !p.is_top())
        candidates[p].insert(a.descriptors[0].as_tuple().elements.size());
      else
        disqualified.insert(p);
    }
  };
  for (const auto& st : kb.asserts) {
    if (const auto* c = std::get_if<Clause>(&st)) {
      scan(c->head);
      if (c->condition) scan(*c->condition);
    } else {
      const auto& d = std::get<DefaultFact>(st);
      if (d.predicate.is_constant()) disqualified.insert(d.predicate.constant());
    }
  }
  RelationalPredicateSet out;
  for (auto& [p, ar] : candidates)
    if (!disqualified.count(p)) out.arities[p] = ar;
  return out;
}

KnowledgeBase objectify(const KnowledgeBase& kb, ObjectificationMode mode) {
  RelationalPredicateSet rel = detect_relational_predicates(kb);
  FreshNames fresh(kb);
  Objectifier obj{mode, rel, fresh};
  return map_clauses(kb, [&](const Clause& c) {
    Clause r = c;
    r.head = obj.head(c.head, !c.forall.empty());
    if (c.condition) r.condition = obj.condition(*c.condition);
    return std::vector<Clause>{r};
  });
}

std::vector<Formula> describute_atom(const Psoa& atom) {
  std::vector<Formula> out;
  const Term& o = *atom.oid;
  out.emplace_back(Psoa{o, atom.predicate, {}});
  for (const auto& d : canonical_order(atom.descriptors)) {
    Term pred = d.dependent() ? atom.predicate : top();
    out.emplace_back(Psoa{o, pred, {d}});
  }
  return out;
}

Formula describute(const Formula& f) { return describe_rec(f); }

KnowledgeBase describute(const KnowledgeBase& kb) {
  return map_clauses(kb, [](const Clause& c) {
    Clause r = c;
    r.head = describe_rec(c.head);
    if (c.condition) r.condition = describe_rec(*c.condition);
    return std::vector<Clause>{r};
  });
}

KnowledgeBase skolemize(const KnowledgeBase& kb) {
  FreshNames fresh(kb);
  return map_clauses(kb, [&](const Clause& c) {
    // Variables that occur only in the condition are existential there, so
    // Skolem terms range over the conclusion's variables alone.
    std::vector<Variable> in_head;
    auto head_vars = free_variables(c.head);
    for (const auto& v : c.forall)
      if (std::find(head_vars.begin(), head_vars.end(), v) != head_vars.end()) in_head.push_back(v);
    Clause r = c;
    r.head = skolem_head(c.head, in_head, fresh);
    return std::vector<Clause>{r};
  });
}

KnowledgeBase split_conjunctive_conclusions(const KnowledgeBase& kb) {
  return map_clauses(kb, [](const Clause& c) {
    std::vector<Formula> heads;
    split_head(c.head, heads);
    if (heads.size() == 1 && !c.head.is<And>()) return std::vector<Clause>{c};
    std::vector<Clause> out;
    for (const auto& h : heads) {
      Clause r{{}, h, c.condition};
      auto used = clause_free_variables(Clause{{}, h, c.condition});
      for (const auto& v : c.forall)
        if (std::find(used.begin(), used.end(), v) != used.end()) r.forall.push_back(v);
      out.push_back(std::move(r));
    }
    return out;
  });
}

KnowledgeBase flatten_externals(const KnowledgeBase& kb) {
  FreshNames fresh(kb);
  return map_clauses(kb, [&](const Clause& c) {
    if (formula_has_external_term(c.head))
      throw TransformError("External in a conclusion cannot be evaluated");
    Clause r = c;
    if (c.condition) r.condition = map_leaves(*c.condition, [&](const Formula& f) { return flatten_leaf(f, fresh); });
    return std::vector<Clause>{r};
  });
}

// ================================================================= pipeline

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"defaults", "unnest", "subclass", "objectify",
                                                 "describute", "skolemize", "split", "flatten"};
  return names;
}

bool is_stage_name(const std::string& name) {
  const auto& n = stage_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

KnowledgeBase run_until(const KnowledgeBase& kb, ObjectificationMode mode, const std::string& stage) {
  if (!is_stage_name(stage)) throw TransformError("unknown stage '" + stage + "'");
  KnowledgeBase k = kb;
  for (const auto& s : stage_names()) {
    if (s == "defaults") k = expand_defaults(k);
    else if (s == "unnest") k = unnest(k);
    else if (s == "subclass") k = rewrite_subpredicates(k);
    else if (s == "objectify") k = objectify(k, mode);
    else if (s == "describute") k = describute(k);
    else if (s == "skolemize") k = skolemize(k);
    else if (s == "split") k = split_conjunctive_conclusions(k);
    else if (s == "flatten") k = flatten_externals(k);
    if (s == stage) break;
  }
  return k;
}

KnowledgeBase run_pipeline(const KnowledgeBase& kb, ObjectificationMode mode, Target target) {
  return run_until(kb, mode, target == Target::TPTP ? "describute" : "flatten");
}

// ==================================================================== query

Formula dynamic_objectify_query_atom(const Psoa& atom, const RelationalPredicateSet& relational, bool oid_demanded,
                                     FreshNames& fresh) {
  const Term& oid = *atom.oid;
  if (oid.is_constant()) return Or{};
  const auto& arities = relational.arities.at(atom.predicate.constant());

  // A virtual object has its membership and one dependent tuple, nothing else.
  std::optional<std::vector<Term>> tuple;
  std::vector<Formula> extra;
  for (const auto& d : atom.descriptors) {
    if (!d.is_tuple() || !d.dependent()) return Or{};
    const auto& es = d.as_tuple().elements;
    if (!arities.count(es.size())) return Or{};
    if (!tuple) {
      tuple = es;
    } else {
      if (es.size() != tuple->size()) return Or{};
      for (std::size_t i = 0; i < es.size(); ++i) extra.emplace_back(Equal{es[i], (*tuple)[i]});
    }
  }

  std::vector<Variable> existentials;
  std::vector<Formula> alternatives;
  std::vector<std::size_t> lengths;
  if (tuple)
    lengths.push_back(tuple->size());
  else
    lengths.assign(arities.begin(), arities.end());
  for (std::size_t n : lengths) {
    std::vector<Term> args;
    if (tuple) {
      args = *tuple;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        Variable v = fresh.var("t");
        existentials.push_back(v);
        args.emplace_back(v);
      }
    }
    std::vector<Formula> cs;
    cs.emplace_back(Psoa{std::nullopt, atom.predicate, {Descriptor::tuple(args, Dependency::Dependent)}});
    cs.insert(cs.end(), extra.begin(), extra.end());
    if (oid_demanded) {
      std::vector<Term> oargs{atom.predicate};
      oargs.insert(oargs.end(), args.begin(), args.end());
      Term cons(Psoa{std::nullopt, local(kOidConsFunctor), {Descriptor::tuple(std::move(oargs), Dependency::Dependent)}});
      cs.emplace_back(Equal{oid, cons});
    }
    alternatives.push_back(cs.size() == 1 ? cs.front() : Formula(And{std::move(cs)}));
  }
  Formula body = alternatives.size() == 1 ? alternatives.front() : Formula(Or{std::move(alternatives)});
  if (existentials.empty()) return body;
  return Exists{existentials, body};
}

namespace {

void count_var_occurrences(const Term& t, std::map<std::string, int>& counts) {
  std::visit(overloaded{
                 [&](const Variable& v) { ++counts[v.name]; },
                 [&](const Psoa& p) {
                   if (p.oid) count_var_occurrences(*p.oid, counts);
                   count_var_occurrences(p.predicate, counts);
                   for (const auto& d : p.descriptors) {
                     if (d.is_tuple()) {
                       for (const auto& e : d.as_tuple().elements) count_var_occurrences(e, counts);
                     } else {
                       count_var_occurrences(d.as_slot().name, counts);
                       count_var_occurrences(d.as_slot().filler, counts);
                     }
                   }
                 },
                 [&](const ExternalTerm& e) { count_var_occurrences(Term(e.expr), counts); },
                 [](const Constant&) {},
             },
             t.node());
}

void count_var_occurrences(const Formula& f, std::map<std::string, int>& counts) {
  std::visit(overloaded{
                 [&](const And& a) {
                   for (const auto& c : a.conjuncts) count_var_occurrences(c, counts);
                 },
                 [&](const Or& o) {
                   for (const auto& c : o.disjuncts) count_var_occurrences(c, counts);
                 },
                 [&](const Exists& e) { count_var_occurrences(e.body, counts); },
                 [&](const AtomFormula& a) { count_var_occurrences(Term(a.atom), counts); },
                 [&](const Equal& e) {
                   count_var_occurrences(e.left, counts);
                   count_var_occurrences(e.right, counts);
                 },
                 [&](const Subclass& s) {
                   count_var_occurrences(s.sub, counts);
                   count_var_occurrences(s.super, counts);
                 },
                 [&](const ExternalFormula& e) { count_var_occurrences(Term(e.atom), counts); },
             },
             f.node());
}

}  // namespace

Formula prepare_query(const Formula& query, ObjectificationMode mode, const RelationalPredicateSet& relational) {
  if (contains_subclass(query)) throw TransformError("subclass formulas are not supported in queries");
  FreshNames fresh(query);
  Formula q = unnest_formula(query);

  std::map<std::string, int> counts;
  count_var_occurrences(q, counts);
  std::set<std::string> answer_vars;
  for (const auto& v : free_variables(query))
    if (v.name.rfind("_anon", 0) != 0) answer_vars.insert(v.name);

  Objectifier obj{mode, relational, fresh};
  q = map_atoms(q, [&](const Psoa& a) -> Formula {
    if (a.oidful()) {
      if (mode == ObjectificationMode::StaticDynamic && relational.contains(a.predicate)) {
        bool demanded = true;
        if (a.oid->is_variable()) {
          const auto& n = a.oid->variable().name;
          demanded = answer_vars.count(n) > 0 || counts[n] > 1;
        }
        return dynamic_objectify_query_atom(a, relational, demanded, fresh);
      }
      return Formula(a);
    }
    return obj.condition(Formula(a));
  });
  q = describe_rec(q);
  return map_leaves(q, [&](const Formula& f) { return flatten_leaf(f, fresh); });
}

}  // namespace psoa
