// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "psoa/ast.hpp"
#include "psoa/error.hpp"

namespace psoa {

// Reads and parses a KB file, then resolves its Import statements as file
// paths relative to the importing file. Each imported file gets its local
// constants renamed apart with an `@kbN` suffix before its statements are
// appended. HTTP(S) imports are rejected.
KnowledgeBase load_kb_file(const std::string& path, std::vector<ParseDiagnostic>* warnings = nullptr);

// Loads several files into one KB without renaming; the first Base wins and
// prefixes accumulate.
KnowledgeBase load_kb_files(const std::vector<std::string>& paths, std::vector<ParseDiagnostic>* warnings = nullptr);
void merge_into(KnowledgeBase& into, const KnowledgeBase& add);

// Appends `suffix` to every local constant except Top.
KnowledgeBase rename_locals_apart(const KnowledgeBase& kb, const std::string& suffix);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace psoa
