// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "psoa/ast.hpp"
#include "psoa/parser.hpp"
#include "psoa/printer.hpp"

using namespace psoa;

namespace {

Psoa atom_of(const std::string& text) {
  auto kb = parse_kb(text);
  return std::get<Clause>(kb.asserts.at(0)).head.as<AtomFormula>().atom;
}

}  // namespace

TEST(Decimal, ParsesAndPrintsShortestForm) {
  EXPECT_EQ(Decimal::parse("29400")->to_string(), "29400");
  EXPECT_EQ(Decimal::parse("-3.250")->to_string(), "-3.25");
  EXPECT_EQ(Decimal::parse("1.5e2")->to_string(), "150");
  EXPECT_EQ(Decimal::parse("25E-3")->to_string(), "0.025");
  EXPECT_FALSE(Decimal::parse("1.").has_value());
  EXPECT_FALSE(Decimal::parse("abc").has_value());
  EXPECT_FALSE(Decimal::parse("").has_value());
}

TEST(Decimal, ArithmeticIsExact) {
  Decimal a = *Decimal::parse("0.1"), b = *Decimal::parse("0.2");
  EXPECT_EQ((a + b).to_string(), "0.3");
  EXPECT_EQ((a - b).to_string(), "-0.1");
  EXPECT_EQ((a * b).to_string(), "0.02");
  EXPECT_TRUE(Decimal::parse("4.0")->is_integer());
  EXPECT_LT(a, b);
}

TEST(Constant, KindsCompareByKindThenContent) {
  EXPECT_EQ(Constant::local("a"), Constant::local("a"));
  EXPECT_NE(Constant::local("a"), Constant::iri("a"));
  EXPECT_NE(Constant::string("1"), Constant::number(1));
  EXPECT_EQ(Constant::number(*Decimal::parse("2.0")), Constant::number(2));
  EXPECT_TRUE(Constant::top().is_top());
  EXPECT_TRUE(is_top(top()));
}

TEST(Term, GroundnessAndVariables) {
  Psoa a = atom_of("Forall ?x ?y (?x#p(?y f(?x)) :- q(?x ?y))");
  EXPECT_FALSE(is_ground(a));
  auto vs = variables_of(Term(a));
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_EQ(vs[0].name, "x");
  EXPECT_EQ(vs[1].name, "y");
  EXPECT_TRUE(is_ground(atom_of("o#p(a f(b) s->c)")));
}

TEST(Term, SubstituteReplacesEverywhere) {
  Psoa a = atom_of("Forall ?x (?x#p(?x s->g(?x)) :- q(?x))");
  Psoa b = substitute(a, {{Variable{"x"}, local("k")}});
  EXPECT_EQ(print_atom(b), "k#p(k s->g(k))");
}

TEST(Descriptors, CanonicalOrderGroupsByKind) {
  Psoa a = atom_of("o#p(s->1 +[a] t+>2 -[b] +[c])");
  EXPECT_EQ(print_atom(canonicalize(a)), "o#p(+[a] +[c] -[b] t+>2 s->1)");
  EXPECT_TRUE(same_bag(a, canonicalize(a)));
  EXPECT_FALSE(same_bag(a, atom_of("o#p(s->1 +[a] t+>2 -[b])")));
}

TEST(Descriptors, TopDependentsRevert) {
  Psoa a = revert_top_dependents(atom_of("o#Top(+[a] s+>1)"));
  for (const auto& d : a.descriptors) EXPECT_EQ(d.dependency, Dependency::Independent);
  Psoa b = revert_top_dependents(atom_of("o#p(+[a])"));
  EXPECT_EQ(b.descriptors[0].dependency, Dependency::Dependent);
}

TEST(Formula, FreeVariablesInFirstOccurrenceOrder) {
  Formula f = parse_query("And(?b#p(?a) Exists ?c (?c#q(?b ?d)))");
  auto vs = free_variables(f);
  ASSERT_EQ(vs.size(), 3u);
  EXPECT_EQ(vs[0].name, "b");
  EXPECT_EQ(vs[1].name, "a");
  EXPECT_EQ(vs[2].name, "d");
}

TEST(DefaultFact, ExpandsToInheritanceRule) {
  auto kb = parse_kb("Teacher{-[2 3] offer->service}\nStudent{level+>high}");
  Clause a = expand_default_fact(std::get<DefaultFact>(kb.asserts[0]));
  EXPECT_EQ(print_clause(a), "Forall ?o (?o#Top(-[2 3] offer->service) :- ?o#Teacher)");
  Clause b = expand_default_fact(std::get<DefaultFact>(kb.asserts[1]));
  EXPECT_EQ(print_clause(b), "Forall ?o (?o#Student(level+>high) :- ?o#Student)");
}

TEST(DefaultFact, RenamesClashingOidVariable) {
  auto kb = parse_kb("Teacher{knows->?o}", SyntaxMode::Auto);
  Clause c = expand_default_fact(std::get<DefaultFact>(kb.asserts[0]));
  ASSERT_EQ(c.forall.size(), 2u);
  EXPECT_NE(c.forall[0].name, "o");
}
