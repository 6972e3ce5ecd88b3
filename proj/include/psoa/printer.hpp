// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "psoa/ast.hpp"

namespace psoa {

// Printing context: syntax flavour plus the prefixes used to abbreviate IRIs.
struct PrintOptions {
  SyntaxMode mode = SyntaxMode::Abridged;
  std::vector<Prefix> prefixes;  // in addition to default_prefixes()
};

std::string print_constant(const Constant& c, const PrintOptions& opt = {});
std::string print_term(const Term& t, const PrintOptions& opt = {});
std::string print_atom(const Psoa& a, const PrintOptions& opt = {});
std::string print_formula(const Formula& f, const PrintOptions& opt = {});
std::string print_clause(const Clause& c, const PrintOptions& opt = {});
std::string print_statement(const Statement& s, const PrintOptions& opt = {});

// Whole KB. Unabridged wraps in RuleML(...)/Assert(...) and prefixes every
// local with '_'; Abridged prints one statement per line with no wrappers.
std::string print_presentation(const KnowledgeBase& kb, SyntaxMode mode);

// RuleML/XML serialization (default facts are expanded to rules first).
std::string emit_xml(const KnowledgeBase& kb);
std::string emit_xml(const Psoa& atom);

}  // namespace psoa
