// SPDX-License-Identifier: Apache-2.0
#include "psoa/printer.hpp"

#include "psoa/parser.hpp"

namespace psoa {

namespace {

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string print_iri(const std::string& iri, const PrintOptions& opt) {
  auto try_prefixes = [&](const std::vector<Prefix>& ps) -> std::string {
    for (const auto& p : ps) {
      if (iri.size() > p.iri.size() && iri.compare(0, p.iri.size(), p.iri) == 0) {
        std::string rest = iri.substr(p.iri.size());
        if (is_pn_local(rest)) return p.name + ":" + rest;
      }
    }
    return {};
  };
  // Explicit prefixes shadow the defaults with the same name.
  std::string s = try_prefixes(opt.prefixes);
  if (!s.empty()) return s;
  std::vector<Prefix> defaults;
  for (const auto& d : default_prefixes()) {
    bool shadowed = false;
    for (const auto& p : opt.prefixes) shadowed = shadowed || p.name == d.name;
    if (!shadowed) defaults.push_back(d);
  }
  s = try_prefixes(defaults);
  if (!s.empty()) return s;
  return "<" + iri + ">";
}

std::string print_descriptors(const std::vector<Descriptor>& ds, const PrintOptions& opt, bool allow_bare = true) {
  std::size_t tuples = 0;
  std::size_t first_slot = ds.size();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].is_tuple())
      ++tuples;
    else if (first_slot == ds.size())
      first_slot = i;
  }
  std::string out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& d = ds[i];
    if (i) out += ' ';
    if (d.is_tuple()) {
      const auto& es = d.as_tuple().elements;
      bool bare = allow_bare && tuples == 1 && d.dependent() && !es.empty() && i < first_slot;
      if (!bare) out += d.dependent() ? "+[" : "-[";
      for (std::size_t j = 0; j < es.size(); ++j) {
        if (j) out += ' ';
        out += print_term(es[j], opt);
      }
      if (!bare) out += ']';
    } else {
      out += print_term(d.as_slot().name, opt);
      out += d.dependent() ? "+>" : "->";
      out += print_term(d.as_slot().filler, opt);
    }
  }
  return out;
}

std::string vars_list(const std::vector<Variable>& vs) {
  std::string out;
  for (const auto& v : vs) out += " ?" + v.name;
  return out;
}

}  // namespace

std::string print_constant(const Constant& c, const PrintOptions& opt) {
  switch (c.kind()) {
    case Constant::Kind::Local:
      if (opt.mode != SyntaxMode::Unabridged && is_plain_local_name(c.text())) return c.text();
      return "_" + c.text();
    case Constant::Kind::Iri:
      return print_iri(c.text(), opt);
    case Constant::Kind::Literal:
      if (c.symspace() == std::string(kXsdNs) + "string") return quote_string(c.text());
      return quote_string(c.text()) + "^^" + print_iri(c.symspace(), opt);
    case Constant::Kind::Number:
      return c.value().to_string();
  }
  return {};
}

std::string print_atom(const Psoa& a, const PrintOptions& opt) {
  std::string out;
  if (a.oid) out += print_term(*a.oid, opt) + "#";
  out += print_term(a.predicate, opt);
  if (a.oid && a.descriptors.empty()) return out;
  return out + "(" + print_descriptors(a.descriptors, opt) + ")";
}

std::string print_term(const Term& t, const PrintOptions& opt) {
  return std::visit(overloaded{
                        [&](const Constant& c) { return print_constant(c, opt); },
                        [&](const Variable& v) { return "?" + v.name; },
                        [&](const Psoa& p) { return print_atom(p, opt); },
                        [&](const ExternalTerm& e) { return "External(" + print_atom(e.expr, opt) + ")"; },
                    },
                    t.node());
}

std::string print_formula(const Formula& f, const PrintOptions& opt) {
  return std::visit(
      overloaded{
          [&](const And& a) {
            std::string out = "And(";
            for (std::size_t i = 0; i < a.conjuncts.size(); ++i) out += (i ? " " : "") + print_formula(a.conjuncts[i], opt);
            return out + ")";
          },
          [&](const Or& o) {
            std::string out = "Or(";
            for (std::size_t i = 0; i < o.disjuncts.size(); ++i) out += (i ? " " : "") + print_formula(o.disjuncts[i], opt);
            return out + ")";
          },
          [&](const Exists& e) { return "Exists" + vars_list(e.vars) + " (" + print_formula(e.body, opt) + ")"; },
          [&](const AtomFormula& a) { return print_atom(a.atom, opt); },
          [&](const Equal& e) { return print_term(e.left, opt) + " = " + print_term(e.right, opt); },
          [&](const Subclass& s) { return print_term(s.sub, opt) + "##" + print_term(s.super, opt); },
          [&](const ExternalFormula& e) { return "External(" + print_atom(e.atom, opt) + ")"; },
      },
      f.node());
}

std::string print_clause(const Clause& c, const PrintOptions& opt) {
  std::string body = print_formula(c.head, opt);
  if (c.condition) body += " :- " + print_formula(*c.condition, opt);
  if (c.forall.empty()) return body;
  return "Forall" + vars_list(c.forall) + " (" + body + ")";
}

std::string print_statement(const Statement& s, const PrintOptions& opt) {
  if (const auto* c = std::get_if<Clause>(&s)) return print_clause(*c, opt);
  const auto& d = std::get<DefaultFact>(s);
  return print_term(d.predicate, opt) + "{" + print_descriptors(d.descriptors, opt, false) + "}";
}

std::string print_presentation(const KnowledgeBase& kb, SyntaxMode mode) {
  PrintOptions opt{mode == SyntaxMode::Unabridged ? SyntaxMode::Unabridged : SyntaxMode::Abridged, kb.prefixes};
  bool wrap = opt.mode == SyntaxMode::Unabridged;
  std::string ind = wrap ? "  " : "";
  std::string out;
  if (wrap) out += "RuleML(\n";
  if (kb.base) out += ind + "Base(<" + *kb.base + ">)\n";
  for (const auto& p : kb.prefixes) out += ind + "Prefix(" + p.name + ": <" + p.iri + ">)\n";
  for (const auto& i : kb.imports) {
    out += ind + "Import(<" + i.iri + ">";
    if (i.profile) out += " <" + *i.profile + ">";
    out += ")\n";
  }
  if (wrap && !kb.asserts.empty()) {
    out += ind + "Assert(\n";
    for (const auto& s : kb.asserts) out += ind + ind + print_statement(s, opt) + "\n";
    out += ind + ")\n";
  } else {
    for (const auto& s : kb.asserts) out += print_statement(s, opt) + "\n";
  }
  for (const auto& q : kb.queries) out += ind + "Query(" + print_formula(q, opt) + ")\n";
  if (wrap) out += ")\n";
  return out;
}

// ---------------------------------------------------------------------- XML

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  void open(const std::string& tag, const std::string& attrs = {}) {
    line("<" + tag + attrs + ">");
    ++depth_;
  }
  void close(const std::string& tag) {
    --depth_;
    line("</" + tag + ">");
  }
  void leaf(const std::string& tag, const std::string& text, const std::string& attrs = {}) {
    if (text.empty())
      line("<" + tag + attrs + "/>");
    else
      line("<" + tag + attrs + ">" + xml_escape(text) + "</" + tag + ">");
  }
  void line(const std::string& s) { out_ += std::string(2 * depth_, ' ') + s + "\n"; }
  std::string str() const { return out_; }

 private:
  std::string out_;
  int depth_ = 0;
};

class XmlEmitter {
 public:
  XmlWriter w;

  // `node` is Ind for individuals, Rel/Fun for predicate positions.
  void constant(const Constant& c, const std::string& node) {
    switch (c.kind()) {
      case Constant::Kind::Local:
        w.leaf(node, print_constant(c, {}));
        break;
      case Constant::Kind::Iri:
        w.leaf(node, "", " iri=\"" + xml_escape(c.text()) + "\"");
        break;
      case Constant::Kind::Number:
        w.leaf(node, c.value().to_string());
        break;
      case Constant::Kind::Literal:
        if (c.symspace() == std::string(kXsdNs) + "string")
          w.leaf("Data", c.text());
        else
          w.leaf("Data", c.text(), " type=\"" + xml_escape(c.symspace()) + "\"");
        break;
    }
  }

  void term(const Term& t, const std::string& const_node = "Ind") {
    std::visit(overloaded{
                   [&](const Constant& c) { constant(c, const_node); },
                   [&](const Variable& v) { w.leaf("Var", v.name); },
                   [&](const Psoa& p) {
                     if (p.oidful())
                       atom(p);
                     else
                       psoa("Expr", "Fun", p);
                   },
                   [&](const ExternalTerm& e) {
                     w.open("External");
                     w.open("content");
                     psoa("Expr", "Fun", e.expr);
                     w.close("content");
                     w.close("External");
                   },
               },
               t.node());
  }

  void atom(const Psoa& a) { psoa("Atom", "Rel", a); }

  void psoa(const std::string& tag, const std::string& op_node, const Psoa& a) {
    w.open(tag);
    if (a.oid) {
      w.open("oid");
      term(*a.oid);
      w.close("oid");
    }
    w.open("op");
    term(a.predicate, op_node);
    w.close("op");
    for (const auto& d : canonical_order(a.descriptors)) {
      if (d.is_tuple()) {
        std::string edge = d.dependent() ? "tupdep" : "tup";
        w.open(edge);
        w.open("Tuple");
        for (const auto& e : d.as_tuple().elements) term(e);
        w.close("Tuple");
        w.close(edge);
      } else {
        std::string edge = d.dependent() ? "slotdep" : "slot";
        w.open(edge);
        term(d.as_slot().name);
        term(d.as_slot().filler);
        w.close(edge);
      }
    }
    w.close(tag);
  }

  void declare(const std::vector<Variable>& vs) {
    for (const auto& v : vs) {
      w.open("declare");
      w.leaf("Var", v.name);
      w.close("declare");
    }
  }

  void formula(const Formula& f) {
    std::visit(overloaded{
                   [&](const And& a) { connective("And", a.conjuncts); },
                   [&](const Or& o) { connective("Or", o.disjuncts); },
                   [&](const Exists& e) {
                     w.open("Exists");
                     declare(e.vars);
                     edge("formula", e.body);
                     w.close("Exists");
                   },
                   [&](const AtomFormula& a) { atom(a.atom); },
                   [&](const Equal& e) {
                     w.open("Equal");
                     w.open("left");
                     term(e.left);
                     w.close("left");
                     w.open("right");
                     term(e.right);
                     w.close("right");
                     w.close("Equal");
                   },
                   [&](const Subclass& s) {
                     w.open("Subclass");
                     w.open("sub");
                     term(s.sub);
                     w.close("sub");
                     w.open("super");
                     term(s.super);
                     w.close("super");
                     w.close("Subclass");
                   },
                   [&](const ExternalFormula& e) {
                     w.open("External");
                     w.open("content");
                     atom(e.atom);
                     w.close("content");
                     w.close("External");
                   },
               },
               f.node());
  }

  void connective(const std::string& tag, const std::vector<Formula>& fs) {
    w.open(tag);
    for (const auto& f : fs) edge("formula", f);
    w.close(tag);
  }

  void edge(const std::string& tag, const Formula& f) {
    w.open(tag);
    formula(f);
    w.close(tag);
  }

  void clause(const Clause& c) {
    if (!c.forall.empty()) {
      w.open("Forall");
      declare(c.forall);
      w.open("formula");
    }
    if (c.condition) {
      w.open("Implies");
      edge("if", *c.condition);
      edge("then", c.head);
      w.close("Implies");
    } else {
      formula(c.head);
    }
    if (!c.forall.empty()) {
      w.close("formula");
      w.close("Forall");
    }
  }
};

}  // namespace

std::string emit_xml(const Psoa& atom) {
  XmlEmitter e;
  e.atom(atom);
  return e.w.str();
}

std::string emit_xml(const KnowledgeBase& kb) {
  XmlEmitter e;
  e.w.line("<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
  std::string base = kb.base ? " xml:base=\"" + xml_escape(*kb.base) + "\"" : "";
  e.w.open("RuleML", " xmlns=\"http://ruleml.org/spec\"" + base);
  int index = 0;
  if (!kb.asserts.empty()) {
    e.w.open("act", " index=\"" + std::to_string(++index) + "\"");
    e.w.open("Assert");
    for (const auto& s : kb.asserts) {
      e.w.open("formula");
      if (const auto* c = std::get_if<Clause>(&s))
        e.clause(*c);
      else
        e.clause(expand_default_fact(std::get<DefaultFact>(s)));
      e.w.close("formula");
    }
    e.w.close("Assert");
    e.w.close("act");
  }
  for (const auto& q : kb.queries) {
    e.w.open("act", " index=\"" + std::to_string(++index) + "\"");
    e.w.open("Query");
    e.edge("formula", q);
    e.w.close("Query");
    e.w.close("act");
  }
  e.w.close("RuleML");
  return e.w.str();
}

}  // namespace psoa
