// SPDX-License-Identifier: Apache-2.0
#include "psoa/session.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "psoa/parser.hpp"

namespace psoa {

namespace fs = std::filesystem;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

namespace {

struct Renamer {
  const std::string& suffix;

  Term term(const Term& t) const {
    return std::visit(overloaded{
                          [&](const Constant& c) -> Term {
                            if (c.is_local() && !c.is_top()) return Term(Constant::local(c.text() + suffix));
                            return t;
                          },
                          [&](const Variable&) -> Term { return t; },
                          [&](const Psoa& p) -> Term { return Term(psoa(p)); },
                          [&](const ExternalTerm& e) -> Term { return Term(ExternalTerm{psoa(e.expr)}); },
                      },
                      t.node());
  }

  std::vector<Descriptor> descriptors(const std::vector<Descriptor>& ds) const {
    std::vector<Descriptor> out;
    for (const auto& d : ds) {
      if (d.is_tuple()) {
        std::vector<Term> es;
        for (const auto& e : d.as_tuple().elements) es.push_back(term(e));
        out.push_back(Descriptor::tuple(std::move(es), d.dependency));
      } else {
        out.push_back(Descriptor::slot(term(d.as_slot().name), term(d.as_slot().filler), d.dependency));
      }
    }
    return out;
  }

  Psoa psoa(const Psoa& p) const {
    Psoa r;
    if (p.oid) r.oid = term(*p.oid);
    r.predicate = term(p.predicate);
    r.descriptors = descriptors(p.descriptors);
    return r;
  }

  Formula formula(const Formula& f) const {
    return std::visit(overloaded{
                          [&](const And& a) -> Formula {
                            And out;
                            for (const auto& c : a.conjuncts) out.conjuncts.push_back(formula(c));
                            return out;
                          },
                          [&](const Or& o) -> Formula {
                            Or out;
                            for (const auto& c : o.disjuncts) out.disjuncts.push_back(formula(c));
                            return out;
                          },
                          [&](const Exists& e) -> Formula { return Exists{e.vars, formula(e.body)}; },
                          [&](const AtomFormula& a) -> Formula { return AtomFormula{psoa(a.atom)}; },
                          [&](const Equal& e) -> Formula { return Equal{term(e.left), term(e.right)}; },
                          [&](const Subclass& s) -> Formula { return Subclass{term(s.sub), term(s.super)}; },
                          [&](const ExternalFormula& e) -> Formula { return ExternalFormula{psoa(e.atom)}; },
                      },
                      f.node());
  }
};

bool is_remote(const std::string& iri) { return iri.rfind("http://", 0) == 0 || iri.rfind("https://", 0) == 0; }

void load_into(const fs::path& path, KnowledgeBase& out, std::set<fs::path>& visited, int& counter,
               std::vector<ParseDiagnostic>* warnings, bool is_root) {
  fs::path canonical = fs::weakly_canonical(path);
  if (!visited.insert(canonical).second) return;
  std::string text = read_text_file(path.string());
  KnowledgeBase kb;
  try {
    kb = parse_kb(text, SyntaxMode::Auto, warnings);
  } catch (const ParseError& e) {
    ParseDiagnostic d = e.diagnostic();
    d.message = path.string() + ": " + d.message;
    throw ParseError(d);
  }
  if (!is_root) kb = rename_locals_apart(kb, "@kb" + std::to_string(++counter));
  if (is_root) {
    out.base = kb.base;
    out.prefixes = kb.prefixes;
  }
  out.imports.insert(out.imports.end(), kb.imports.begin(), kb.imports.end());
  out.asserts.insert(out.asserts.end(), kb.asserts.begin(), kb.asserts.end());
  if (is_root) out.queries = kb.queries;
  for (const auto& imp : kb.imports) {
    if (is_remote(imp.iri)) throw Error("remote Import is not supported: " + imp.iri);
    std::string local = imp.iri.rfind("file:", 0) == 0 ? imp.iri.substr(5) : imp.iri;
    fs::path target = fs::path(local).is_absolute() ? fs::path(local) : path.parent_path() / local;
    load_into(target, out, visited, counter, warnings, false);
  }
}

}  // namespace

KnowledgeBase rename_locals_apart(const KnowledgeBase& kb, const std::string& suffix) {
  Renamer r{suffix};
  KnowledgeBase out = kb;
  out.asserts.clear();
  for (const auto& st : kb.asserts) {
    if (const auto* c = std::get_if<Clause>(&st)) {
      Clause n = *c;
      n.head = r.formula(c->head);
      if (c->condition) n.condition = r.formula(*c->condition);
      out.asserts.emplace_back(std::move(n));
    } else {
      const auto& d = std::get<DefaultFact>(st);
      out.asserts.emplace_back(DefaultFact{r.term(d.predicate), r.descriptors(d.descriptors)});
    }
  }
  out.queries.clear();
  for (const auto& q : kb.queries) out.queries.push_back(r.formula(q));
  return out;
}

KnowledgeBase load_kb_file(const std::string& path, std::vector<ParseDiagnostic>* warnings) {
  KnowledgeBase out;
  std::set<fs::path> visited;
  int counter = 0;
  load_into(fs::path(path), out, visited, counter, warnings, true);
  return out;
}

void merge_into(KnowledgeBase& into, const KnowledgeBase& add) {
  if (!into.base) into.base = add.base;
  for (const auto& p : add.prefixes)
    if (std::find(into.prefixes.begin(), into.prefixes.end(), p) == into.prefixes.end()) into.prefixes.push_back(p);
  into.imports.insert(into.imports.end(), add.imports.begin(), add.imports.end());
  into.asserts.insert(into.asserts.end(), add.asserts.begin(), add.asserts.end());
  into.queries.insert(into.queries.end(), add.queries.begin(), add.queries.end());
}

KnowledgeBase load_kb_files(const std::vector<std::string>& paths, std::vector<ParseDiagnostic>* warnings) {
  KnowledgeBase out;
  for (const auto& p : paths) merge_into(out, load_kb_file(p, warnings));
  return out;
}

}  // namespace psoa
