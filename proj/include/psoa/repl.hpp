// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "psoa/engine.hpp"

namespace psoa {

// Interactive session over one or more KB files. Files are merged in load
// order; the engine is rebuilt after every :load or :mode.
class Repl {
 public:
  explicit Repl(EngineConfig config = {});

  void load(const std::string& path);
  // Handles one input line (query or meta-command). Returns false on :quit.
  bool handle(const std::string& line, std::ostream& out);
  // Reads lines until EOF or :quit, printing `> ` before each.
  void run(std::istream& in, std::ostream& out);

  const KnowledgeBase& kb() const { return kb_; }
  const Reasoner& reasoner();

 private:
  void emit(const std::string& format, const std::string& path, std::ostream& out);

  EngineConfig config_;
  KnowledgeBase kb_;
  std::unique_ptr<Reasoner> reasoner_;
};

// Writes `kb` in the given format (prolog, tptp, xml). Throws on an unknown format.
std::string emit_kb(const KnowledgeBase& kb, const std::string& format, ObjectificationMode mode);

}  // namespace psoa
