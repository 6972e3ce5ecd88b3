// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include "psoa/ast.hpp"

namespace psoa {

// Prefixes every parse starts with; an explicit Prefix(...) overrides them.
const std::vector<Prefix>& default_prefixes();

// Throws ParseError on the first error. Warnings (implicit closure of free
// variables, nested Assert, Import profiles) are appended to `warnings`.
KnowledgeBase parse_kb(std::string_view source, SyntaxMode mode = SyntaxMode::Auto,
                       std::vector<ParseDiagnostic>* warnings = nullptr);

// Parses a query formula, optionally wrapped in Query(...). `prefixes` adds
// to the defaults so queries can use a KB's CURIEs.
Formula parse_query(std::string_view source, const std::vector<Prefix>& prefixes = {});

// Single term, e.g. for CLI arguments and tests.
Term parse_term(std::string_view source, const std::vector<Prefix>& prefixes = {});

// True if `name` lexes as a PN_LOCAL that cannot be mistaken for a number or keyword.
bool is_plain_local_name(std::string_view name);
bool is_pn_local(std::string_view name);

}  // namespace psoa
