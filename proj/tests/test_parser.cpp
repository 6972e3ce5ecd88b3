// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "psoa/parser.hpp"
#include "psoa/printer.hpp"
#include "psoa/session.hpp"
#include "query_corpus.hpp"

using namespace psoa;

namespace {

const Formula& head(const KnowledgeBase& kb, std::size_t i = 0) { return std::get<Clause>(kb.asserts.at(i)).head; }
const Psoa& atom(const KnowledgeBase& kb, std::size_t i = 0) { return head(kb, i).as<AtomFormula>().atom; }

ParseDiagnostic parse_error(const std::string& text) {
  try {
    parse_kb(text);
  } catch (const ParseError& e) {
    return e.diagnostic();
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return {};
}

}  // namespace

TEST(Parser, OidfulAtomWithAllDescriptorKinds) {
  auto kb = parse_kb("John#Student(+[Mon Tue Fri] -[1995 8 17] dept+>Math gender->male)");
  const Psoa& a = atom(kb);
  ASSERT_TRUE(a.oid);
  EXPECT_EQ(*a.oid, local("John"));
  EXPECT_EQ(a.predicate, local("Student"));
  ASSERT_EQ(a.descriptors.size(), 4u);
  EXPECT_TRUE(a.descriptors[0].is_tuple());
  EXPECT_EQ(a.descriptors[0].dependency, Dependency::Dependent);
  EXPECT_EQ(a.descriptors[1].dependency, Dependency::Independent);
  EXPECT_EQ(a.descriptors[1].as_tuple().elements[0], num(1995));
  EXPECT_EQ(a.descriptors[2].as_slot().name, local("dept"));
  EXPECT_EQ(a.descriptors[2].dependency, Dependency::Dependent);
  EXPECT_EQ(a.descriptors[3].dependency, Dependency::Independent);
}

TEST(Parser, BareTupleIsDependent) {
  auto kb = parse_kb("John#Teacher(Wed Thu)\nfamily(Mary John)");
  EXPECT_EQ(atom(kb).descriptors.at(0).dependency, Dependency::Dependent);
  EXPECT_EQ(atom(kb).descriptors.at(0).as_tuple().elements.size(), 2u);
  EXPECT_FALSE(atom(kb, 1).oid.has_value());
}

TEST(Parser, MembershipWithoutParentheses) {
  auto kb = parse_kb("John#TA");
  EXPECT_TRUE(atom(kb).descriptors.empty());
  EXPECT_TRUE(atom(kb).oidful());
}

TEST(Parser, UnabridgedUsesUnderscoreLocals) {
  auto u = parse_kb("RuleML(Assert(_John#_TA(_workload+>_high)))");
  auto a = parse_kb("John#TA(workload+>high)");
  EXPECT_EQ(u, a);
}

TEST(Parser, ForallRuleWithConjunctiveCondition) {
  auto kb = parse_kb(R"(
    Forall ?o ?ht (
      ?o#TA(workload+>high) :-
        And(?o#Teacher(coursehours+>?ht) External(pred:numeric-greater-than(?ht 10)))
    ))");
  const auto& c = std::get<Clause>(kb.asserts.at(0));
  ASSERT_EQ(c.forall.size(), 2u);
  ASSERT_TRUE(c.condition);
  ASSERT_TRUE(c.condition->is<And>());
  const auto& conj = c.condition->as<And>().conjuncts;
  ASSERT_EQ(conj.size(), 2u);
  ASSERT_TRUE(conj[1].is<ExternalFormula>());
  EXPECT_EQ(conj[1].as<ExternalFormula>().atom.predicate,
            Term(Constant::iri("http://www.w3.org/2007/rif-builtin-predicate#numeric-greater-than")));
}

TEST(Parser, SubclassAndEquality) {
  auto kb = parse_kb("TA##Teacher\nForall ?x (?x = f(a) :- p(?x))");
  EXPECT_TRUE(head(kb).is<Subclass>());
  EXPECT_TRUE(head(kb, 1).is<Equal>());
}

TEST(Parser, LiteralsAndIris) {
  auto kb = parse_kb(R"(Prefix(ex: <http://example.org/>)
    ex:item#p("hello"^^xs:string "x" <http://example.org/y> -3.5))");
  const Psoa& a = atom(kb);
  EXPECT_EQ(*a.oid, Term(Constant::iri("http://example.org/item")));
  const auto& es = a.descriptors[0].as_tuple().elements;
  EXPECT_EQ(es[0], Term(Constant::string("hello")));
  EXPECT_EQ(es[1], Term(Constant::string("x")));
  EXPECT_EQ(es[2], Term(Constant::iri("http://example.org/y")));
  EXPECT_EQ(es[3], Term(Constant::number(*Decimal::parse("-3.5"))));
}

TEST(Parser, DefaultFact) {
  auto kb = parse_kb("Teacher{-[2 3] offer->service aptitude->explanation}");
  const auto& d = std::get<DefaultFact>(kb.asserts.at(0));
  EXPECT_EQ(d.predicate, local("Teacher"));
  EXPECT_EQ(d.descriptors.size(), 3u);
}

TEST(Parser, ImplicitClosureWarns) {
  std::vector<ParseDiagnostic> warnings;
  auto kb = parse_kb("p(?x) :- q(?x)", SyntaxMode::Auto, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(warnings[0].severity, Severity::Warning);
  EXPECT_EQ(std::get<Clause>(kb.asserts[0]).forall.size(), 1u);
}

TEST(Parser, ImportProfileWarns) {
  std::vector<ParseDiagnostic> warnings;
  auto kb = parse_kb("RuleML(Import(<other.psoa> <http://example.org/profile>) Assert(p(a)))", SyntaxMode::Auto,
                     &warnings);
  ASSERT_EQ(kb.imports.size(), 1u);
  EXPECT_EQ(kb.imports[0].iri, "other.psoa");
  EXPECT_FALSE(warnings.empty());
}

TEST(Parser, AnonymousVariablesAreDistinct) {
  Formula q = parse_query("?#p(? ?)");
  EXPECT_EQ(free_variables(q).size(), 3u);
}

TEST(Parser, QueryWrapper) {
  EXPECT_EQ(parse_query("Query(John#TA)"), parse_query("John#TA"));
}

TEST(Parser, CommentsAreSkipped) {
  auto kb = parse_kb("% line comment\np(a) % trailing\n\n  % indented\nq(b)");
  EXPECT_EQ(kb.asserts.size(), 2u);
}

TEST(Parser, ErrorsCarryPosition) {
  auto d = parse_error("p(a)\nq(b c");
  EXPECT_EQ(d.line, 2);
  EXPECT_GT(d.column, 0);
  auto e = parse_error("p(a,b)");
  EXPECT_EQ(e.line, 1);
  EXPECT_EQ(e.column, 4);
}

TEST(Parser, RejectsMalformedInput) {
  EXPECT_THROW(parse_kb("nonsense((("), ParseError);
  EXPECT_THROW(parse_kb("Forall ? (p(?))"), ParseError);
  EXPECT_THROW(parse_kb("p(a) :- "), ParseError);
  EXPECT_THROW(parse_kb("o#p(s->)"), ParseError);
  EXPECT_THROW(parse_kb("RuleML(p(a))"), ParseError);
  EXPECT_THROW(parse_query("p(a) q(b)"), ParseError);
  EXPECT_THROW(parse_kb("ex:item#p"), ParseError);  // undeclared prefix
}

TEST(Parser, CorpusFilesParse) {
  for (const char* f : {"kb1.psoa", "kb2.psoa", "kb3.psoa", "sample.psoa", "person_dates.psoa", "default_rules.psoa",
                        "default_facts.psoa", "rich_ta_atoms.psoa"}) {
    SCOPED_TRACE(f);
    EXPECT_NO_THROW(load_kb_file(fixtures::corpus(f)));
  }
}
