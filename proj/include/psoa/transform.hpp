// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "psoa/ast.hpp"

namespace psoa {

enum class ObjectificationMode { Static, StaticDynamic };
enum class Target { Engine, Prolog, TPTP };

// Predicates occurring only in oidless atoms with exactly one dependent
// tuple, with the tuple lengths seen.
struct RelationalPredicateSet {
  std::map<Constant, std::set<std::size_t>> arities;

  bool contains(const Term& predicate) const;
  bool empty() const { return arities.empty(); }
};

// Generates names that do not clash with anything already in a KB or query.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const KnowledgeBase& kb);
  explicit FreshNames(const Formula& f);

  void reserve(const KnowledgeBase& kb);
  void reserve(const Formula& f);

  Variable var(const std::string& stem);
  Constant integer_local();            // _1, _2, ... minimal unused
  Constant skolem_symbol();            // skolem1, skolem2, ...

 private:
  std::set<std::string> vars_;
  std::set<std::string> locals_;
  int next_var_ = 1;
  int next_int_ = 1;
  int next_skolem_ = 1;
};

KnowledgeBase expand_defaults(const KnowledgeBase& kb);
KnowledgeBase unnest(const KnowledgeBase& kb);
KnowledgeBase rewrite_subpredicates(const KnowledgeBase& kb);
RelationalPredicateSet detect_relational_predicates(const KnowledgeBase& kb);
KnowledgeBase objectify(const KnowledgeBase& kb, ObjectificationMode mode);
KnowledgeBase describute(const KnowledgeBase& kb);
KnowledgeBase skolemize(const KnowledgeBase& kb);
KnowledgeBase split_conjunctive_conclusions(const KnowledgeBase& kb);
KnowledgeBase flatten_externals(const KnowledgeBase& kb);

// Formula-level pieces, shared with query preparation.
Formula unnest_formula(const Formula& f);
Formula describute(const Formula& f);
// 1 + m+ + m- + k+ + k- conjuncts for an oidful atom, in canonical order.
std::vector<Formula> describute_atom(const Psoa& atom);

// Stage names in pipeline order: defaults unnest subclass objectify
// describute skolemize split flatten.
const std::vector<std::string>& stage_names();
bool is_stage_name(const std::string& name);

KnowledgeBase run_pipeline(const KnowledgeBase& kb, ObjectificationMode mode, Target target);
// Runs the Engine chain up to and including `stage`.
KnowledgeBase run_until(const KnowledgeBase& kb, ObjectificationMode mode, const std::string& stage);

// Query-side chain: unnest, objectify (with virtual OIDs for relational
// predicates in StaticDynamic mode), describute, flatten externals. Fresh
// variables are existentially quantified so answer variables are unchanged.
Formula prepare_query(const Formula& query, ObjectificationMode mode, const RelationalPredicateSet& relational);

// Rewrites an oidful query atom over a relational predicate. When the OID is
// demanded it is equated with oidcons(f t1..tn); otherwise the atom is
// queried oidless. A constant OID yields an unsatisfiable Or().
Formula dynamic_objectify_query_atom(const Psoa& atom, const RelationalPredicateSet& relational, bool oid_demanded,
                                     FreshNames& fresh);

// Functor of virtual OIDs built for relational predicates at query time.
inline const char* kOidConsFunctor = "oidcons";

}  // namespace psoa
