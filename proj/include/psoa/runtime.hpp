// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "psoa/ast.hpp"

namespace psoa {

enum class RuntimePredicate { Memterm, Tupterm, Prdtupterm, Sloterm, Prdsloterm, Relational, Builtin, Equal };

// A flat runtime atom. `name` is set for Relational (the KB predicate) and
// Builtin (the RIF IRI). Builtin functions carry their result as the last
// argument. Arguments are constants, variables or positional function terms.
struct RuntimeAtom {
  RuntimePredicate predicate = RuntimePredicate::Memterm;
  Constant name = Constant::local("");
  std::vector<Term> args;

  // "memterm/2", "prdtupterm/5", relational "'r0'/3" in quoted Prolog spelling.
  std::string key() const;

  friend bool operator==(const RuntimeAtom& a, const RuntimeAtom& b);
};

struct RuntimeClause {
  RuntimeAtom head;
  std::vector<RuntimeAtom> body;

  friend bool operator==(const RuntimeClause& a, const RuntimeClause& b) {
    return a.head == b.head && a.body == b.body;
  }
};

// Query body plus auxiliary clauses for its disjunctions.
struct RuntimeQuery {
  std::vector<RuntimeAtom> body;
  std::vector<RuntimeClause> aux;
};

const char* to_string(RuntimePredicate p);

// Maps one single-descriptor, membership, relational, External or Equal atom.
RuntimeAtom to_runtime_atom(const Formula& f);

// Converts a KB that went through the whole Engine pipeline. The first clause
// is always the universal membership memterm(?X, Top).
std::vector<RuntimeClause> to_runtime(const KnowledgeBase& kb);
// Converts a prepared query; Or sub-formulas become `$qorN` clauses.
RuntimeQuery to_runtime_query(const Formula& prepared);

std::string emit_prolog(const std::vector<RuntimeClause>& clauses);
std::string emit_tptp(const std::vector<RuntimeClause>& clauses);
// From a KB taken through the TPTP pipeline (up to describution).
std::string emit_tptp(const KnowledgeBase& kb);
// `fof(q, conjecture, ...)` for a prepared (descributed) query.
std::string emit_tptp_query(const Formula& prepared);

// Reads text produced by emit_prolog back into runtime clauses. Variables come
// back with lower-cased first letters, so clauses agree with the originals up
// to variable renaming. Throws ParseError on malformed input.
std::vector<RuntimeClause> read_prolog(const std::string& text);

// True when two clauses are equal up to a consistent renaming of variables.
bool alpha_equivalent(const RuntimeClause& a, const RuntimeClause& b);

std::string print_runtime_atom(const RuntimeAtom& a);
std::string print_runtime_clause(const RuntimeClause& c);

}  // namespace psoa
