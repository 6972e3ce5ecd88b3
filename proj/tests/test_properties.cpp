// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "psoa/decimal.hpp"
#include "psoa/parser.hpp"
#include "psoa/printer.hpp"

using namespace psoa;

namespace {

// Every formula-level atom from a batch of fuzzed KBs.
std::vector<Psoa> fuzzed_atoms(unsigned seed, int kbs) {
  std::mt19937 rng(seed);
  std::vector<Psoa> out;
  for (int i = 0; i < kbs; ++i) {
    KnowledgeBase kb = fixtures::random_kb(rng);
    for (const auto& s : kb.asserts) {
      const auto* c = std::get_if<Clause>(&s);
      if (!c) continue;
      for (const auto& a : formula_atoms(c->head)) out.push_back(a);
      if (c->condition)
        for (const auto& a : formula_atoms(*c->condition)) out.push_back(a);
    }
  }
  return out;
}

int group_of(const Descriptor& d) {
  bool tuple = std::holds_alternative<Tuple>(d.body);
  return (tuple ? 0 : 2) + (d.dependent() ? 0 : 1);
}

}  // namespace

TEST(Canonical, OrderIsGroupedStableAndIdempotent) {
  auto atoms = fuzzed_atoms(11, 150);
  ASSERT_GT(atoms.size(), 300u);
  for (const auto& a : atoms) {
    Psoa c = canonicalize(a);
    EXPECT_EQ(canonicalize(c), c);
    EXPECT_TRUE(same_bag(a, c));
    EXPECT_TRUE(std::is_sorted(c.descriptors.begin(), c.descriptors.end(),
                               [](const auto& x, const auto& y) { return group_of(x) < group_of(y); }));
    // stability: within a group the input order survives
    for (int g = 0; g < 4; ++g) {
      std::vector<Descriptor> in, out;
      for (const auto& d : a.descriptors)
        if (group_of(d) == g) in.push_back(d);
      for (const auto& d : c.descriptors)
        if (group_of(d) == g) out.push_back(d);
      EXPECT_EQ(in, out);
    }
  }
}

TEST(Canonical, BagEqualityIgnoresOrderButCountsDuplicates) {
  std::mt19937 rng(3);
  for (const auto& a : fuzzed_atoms(12, 80)) {
    Psoa s = a;
    std::shuffle(s.descriptors.begin(), s.descriptors.end(), rng);
    EXPECT_TRUE(same_bag(a, s));
    EXPECT_TRUE(same_bag(s, a));
    if (a.descriptors.empty()) continue;
    Psoa dup = a;
    dup.descriptors.push_back(a.descriptors.front());
    EXPECT_FALSE(same_bag(a, dup));
    Psoa flipped = a;
    flipped.descriptors.front() = reverse_descriptor(a.descriptors.front());
    EXPECT_FALSE(same_bag(a, flipped));
    EXPECT_EQ(reverse_descriptor(flipped.descriptors.front()), a.descriptors.front());
  }
}

TEST(Canonical, TopRevertIsIdempotentAndOnlyTouchesTop) {
  for (const auto& a : fuzzed_atoms(13, 80)) {
    Psoa r = revert_top_dependents(a);
    EXPECT_EQ(revert_top_dependents(r), r);
    if (!is_top(a.predicate)) {
      EXPECT_EQ(r, a);
      continue;
    }
    for (const auto& d : r.descriptors) EXPECT_FALSE(d.dependent());
  }
}

TEST(Substitution, GroundingAllFreeVariablesGivesGroundAtoms) {
  std::mt19937 rng(21);
  for (int i = 0; i < 100; ++i) {
    KnowledgeBase kb = fixtures::random_kb(rng);
    for (const auto& s : kb.asserts) {
      const auto* c = std::get_if<Clause>(&s);
      if (!c || !c->condition) continue;
      Formula body = *c->condition;
      EXPECT_EQ(substitute(body, {}), body);
      std::vector<std::pair<Variable, Term>> sub;
      for (const auto& v : free_variables(body)) sub.emplace_back(v, local("k" + v.name));
      Formula g = substitute(body, sub);
      EXPECT_TRUE(free_variables(g).empty()) << print_formula(g);
    }
  }
}

TEST(Substitution, BoundVariablesAreNotReplaced) {
  Formula f = parse_query("And(Exists ?x (p(?x ?y)) q(?x))");
  std::vector<std::string> names;
  for (const auto& v : free_variables(f)) names.push_back(v.name);
  EXPECT_EQ(names, (std::vector<std::string>{"y", "x"}));
  EXPECT_EQ(print_formula(substitute(f, {{Variable{"x"}, local("a")}})), "And(Exists ?x (p(?x ?y)) q(a))");
}

TEST(Decimals, LexicalFormsDenoteOneValue) {
  EXPECT_EQ(*Decimal::parse("2"), *Decimal::parse("2.0"));
  EXPECT_EQ(*Decimal::parse("2"), *Decimal::parse("20e-1"));
  EXPECT_EQ(Decimal::parse("-3.250")->to_string(), "-3.25");
  EXPECT_FALSE(Decimal::parse("1.").has_value());
  EXPECT_FALSE(Decimal::parse("e3").has_value());
  std::mt19937 rng(8);
  std::uniform_int_distribution<long long> d(-1000000, 1000000);
  for (int i = 0; i < 500; ++i) {
    Decimal a(d(rng)), b(d(rng));
    Decimal scaled = a * *Decimal::parse("0.001");
    EXPECT_EQ(*Decimal::parse(scaled.to_string()), scaled);
    EXPECT_EQ((a + b) - b, a);
  }
}
