// SPDX-License-Identifier: Apache-2.0
#include "psoa/repl.hpp"

#include <iostream>
#include <sstream>

#include "psoa/parser.hpp"
#include "psoa/printer.hpp"
#include "psoa/session.hpp"

namespace psoa {

std::string emit_kb(const KnowledgeBase& kb, const std::string& format, ObjectificationMode mode) {
  if (format == "prolog") return emit_prolog(to_runtime(run_pipeline(kb, mode, Target::Prolog)));
  if (format == "tptp") return emit_tptp(run_pipeline(kb, mode, Target::TPTP));
  if (format == "xml") return emit_xml(kb);
  throw Error("unknown emit format: " + format);
}

Repl::Repl(EngineConfig config) : config_(config) {}

void Repl::load(const std::string& path) {
  KnowledgeBase merged = kb_;
  merge_into(merged, load_kb_file(path));
  auto r = std::make_unique<Reasoner>(merged, config_);
  kb_ = std::move(merged);
  reasoner_ = std::move(r);
}

const Reasoner& Repl::reasoner() {
  if (!reasoner_) reasoner_ = std::make_unique<Reasoner>(kb_, config_);
  return *reasoner_;
}

void Repl::emit(const std::string& format, const std::string& path, std::ostream& out) {
  write_text_file(path, emit_kb(kb_, format, config_.objectification));
  out << "wrote " << path << "\n";
}

bool Repl::handle(const std::string& raw, std::ostream& out) {
  std::string line = raw;
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
  std::size_t start = line.find_first_not_of(" \t");
  if (start == std::string::npos) return true;
  line = line.substr(start);
  try {
    if (line[0] == ':') {
      std::istringstream ss(line);
      std::string cmd, a, b;
      ss >> cmd >> a >> b;
      if (cmd == ":quit" || cmd == ":q") return false;
      if (cmd == ":load") {
        load(a);
        out << "loaded " << a << "\n";
      } else if (cmd == ":mode") {
        if (a == "static") config_.objectification = ObjectificationMode::Static;
        else if (a == "dynamic") config_.objectification = ObjectificationMode::StaticDynamic;
        else throw Error("usage: :mode static|dynamic");
        reasoner_.reset();
        out << "mode " << a << "\n";
      } else if (cmd == ":emit") {
        if (a.empty() || b.empty()) throw Error("usage: :emit prolog|tptp|xml <file>");
        emit(a, b, out);
      } else if (cmd == ":stage") {
        if (!is_stage_name(a)) throw Error("unknown stage: " + a);
        out << print_presentation(run_until(kb_, config_.objectification, a), SyntaxMode::Abridged);
      } else {
        throw Error("unknown command: " + cmd);
      }
      return true;
    }
    const Reasoner& r = reasoner();
    Formula q = parse_query(line, kb_.prefixes);
    PrintOptions opt;
    opt.prefixes = kb_.prefixes;
    out << answer_format(r.ask(q), opt) << "\n";
  } catch (const ParseError& e) {
    out << "parse error: " << e.diagnostic().to_string() << "\n";
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
  }
  return true;
}

void Repl::run(std::istream& in, std::ostream& out) {
  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    if (!handle(line, out)) break;
  }
}

}  // namespace psoa
