// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "oracles.hpp"
#include "psoa/chain.hpp"
#include "psoa/parser.hpp"
#include "psoa/printer.hpp"
#include "psoa/session.hpp"
#include "psoa/transform.hpp"
#include "query_corpus.hpp"

using namespace psoa;

namespace {

std::string show(const KnowledgeBase& kb) { return print_presentation(kb, SyntaxMode::Abridged); }

std::vector<std::string> lines(const KnowledgeBase& kb) {
  std::vector<std::string> out;
  for (const auto& s : kb.asserts) out.push_back(print_statement(s));
  return out;
}

KnowledgeBase stage(const std::string& name, const KnowledgeBase& kb, ObjectificationMode mode) {
  if (name == "defaults") return expand_defaults(kb);
  if (name == "unnest") return unnest(kb);
  if (name == "subclass") return rewrite_subpredicates(kb);
  if (name == "objectify") return objectify(kb, mode);
  if (name == "describute") return describute(kb);
  if (name == "skolemize") return skolemize(kb);
  if (name == "split") return split_conjunctive_conclusions(kb);
  return flatten_externals(kb);
}

// Independent reading of describution: the membership, then one conjunct per
// descriptor, scoped to the predicate when dependent and to Top otherwise.
std::multiset<std::string> expected_conjuncts(const Psoa& a) {
  std::multiset<std::string> out{print_term(*a.oid) + "#" + print_term(a.predicate)};
  for (const auto& d : a.descriptors) {
    Term p = d.dependency == Dependency::Dependent ? a.predicate : top();
    out.insert(print_atom(Psoa{a.oid, p, {d}}));
  }
  return out;
}

void flatten_and(const Formula& f, std::vector<Formula>& out) {
  if (f.is<And>()) {
    for (const auto& c : f.as<And>().conjuncts) flatten_and(c, out);
  } else {
    out.push_back(f);
  }
}

// Ground data conjuncts of a descributed KB, without memberships and taxonomy.
std::multiset<std::string> data_bag(const KnowledgeBase& kb) {
  std::multiset<std::string> out;
  for (const auto& s : kb.asserts) {
    const auto& c = std::get<Clause>(s);
    if (!c.is_fact()) continue;
    std::vector<Formula> cs;
    flatten_and(c.head, cs);
    for (const auto& f : cs)
      if (f.is<AtomFormula>() && !f.as<AtomFormula>().atom.descriptors.empty()) out.insert(print_formula(f));
  }
  return out;
}

KnowledgeBase corpus_kb(const std::string& name) { return load_kb_file(fixtures::corpus(name)); }

const char* kSample = R"(
Forall ?o (?o#TA(workload+>high) :- And(?o#Teacher(coursehours+>?h) ?o#Student))
family(Mary John)
John#Teacher(+[Wed Thu] dept+>Physics)
TA##Teacher
Forall ?x (Exists ?y (?y#child(of->?x)) :- ?x#Person)
Forall ?x ?y (p(?x) :- q(?x g(q#r(?y))))
)";

}  // namespace

TEST(Stages, NamesInPipelineOrder) {
  std::vector<std::string> expected{"defaults", "unnest", "subclass", "objectify",
                                    "describute", "skolemize", "split", "flatten"};
  EXPECT_EQ(stage_names(), expected);
  EXPECT_TRUE(is_stage_name("split"));
  EXPECT_FALSE(is_stage_name("compile"));
}

TEST(Stages, DefaultFactsBecomeRules) {
  auto kb = expand_defaults(parse_kb("Teacher{offer->service}\nJohn#Teacher"));
  EXPECT_EQ(lines(kb), (std::vector<std::string>{"Forall ?o (?o#Top(offer->service) :- ?o#Teacher)", "John#Teacher"}));
}

TEST(Stages, UnnestLiftsEmbeddedAtoms) {
  auto kb = unnest(parse_kb(kSample));
  EXPECT_EQ(lines(kb).back(), "Forall ?x ?y (p(?x) :- And(q#r(?y) q(?x g(q))))");
  // nothing to lift in a fact
  EXPECT_EQ(lines(kb)[1], "family(Mary John)");
}

TEST(Stages, SubclassBecomesRule) {
  auto kb = rewrite_subpredicates(parse_kb("TA##Teacher"));
  EXPECT_EQ(lines(kb), std::vector<std::string>{"Forall ?o (?o#Teacher :- ?o#TA)"});
}

TEST(Stages, StaticObjectificationNamesFactsAndQuantifiesRules) {
  auto kb = objectify(unnest(parse_kb(kSample)), ObjectificationMode::Static);
  auto ls = lines(kb);
  EXPECT_EQ(ls[1], "_1#family(Mary John)");
  EXPECT_EQ(ls.back(), "Forall ?x ?y (Exists ?_o1 (?_o1#p(?x)) :- And(q#r(?y) Exists ?_o2 (?_o2#q(?x g(q)))))");
}

TEST(Stages, ObjectificationSkipsTakenConstants) {
  auto kb = objectify(parse_kb("_1#p(a)\nr(b)\ns(c)"), ObjectificationMode::Static);
  EXPECT_EQ(lines(kb), (std::vector<std::string>{"_1#p(a)", "_2#r(b)", "_3#s(c)"}));
}

TEST(Stages, StaticDynamicKeepsRelationalAtoms) {
  auto kb = objectify(unnest(parse_kb(kSample)), ObjectificationMode::StaticDynamic);
  auto ls = lines(kb);
  EXPECT_EQ(ls[1], "family(Mary John)");
  EXPECT_EQ(ls.back(), "Forall ?x ?y (p(?x) :- And(q#r(?y) q(?x g(q))))");
}

TEST(Stages, DescributionSplitsEveryOidfulAtom) {
  auto kb = describute(parse_kb(kSample));
  auto ls = lines(kb);
  EXPECT_EQ(ls[0], "Forall ?o ?h (And(?o#TA ?o#TA(workload+>high)) :- And(?o#Teacher ?o#Teacher(coursehours+>?h) ?o#Student))");
  EXPECT_EQ(ls[2], "And(John#Teacher John#Teacher(Wed Thu) John#Teacher(dept+>Physics))");
  EXPECT_EQ(ls[4], "Forall ?x (Exists ?y (And(?y#child ?y#Top(of->?x))) :- ?x#Person)");
}

TEST(Stages, SkolemizeAndSplit) {
  auto kb = split_conjunctive_conclusions(skolemize(describute(parse_kb(kSample))));
  auto ls = lines(kb);
  EXPECT_NE(std::find(ls.begin(), ls.end(), "Forall ?x (skolem1(?x)#child :- ?x#Person)"), ls.end());
  EXPECT_NE(std::find(ls.begin(), ls.end(), "Forall ?x (skolem1(?x)#Top(of->?x) :- ?x#Person)"), ls.end());
  EXPECT_NE(std::find(ls.begin(), ls.end(), "John#Teacher(dept+>Physics)"), ls.end());
  // split drops quantified variables that a head no longer needs
  auto k2 = split_conjunctive_conclusions(parse_kb("Forall ?x ?y (And(p(?x) q(?y)) :- r(?x ?y))"));
  EXPECT_EQ(lines(k2), (std::vector<std::string>{"Forall ?x ?y (p(?x) :- r(?x ?y))", "Forall ?x ?y (q(?y) :- r(?x ?y))"}));
}

TEST(Stages, FlattenExternalsIntoConjuncts) {
  auto kb = flatten_externals(parse_kb("Forall ?x (r(?x) :- q(External(func:numeric-add(?x 1))))"));
  std::string text = print_statement(kb.asserts.at(0));
  SCOPED_TRACE(text);
  EXPECT_EQ(text.find("q(External"), std::string::npos);
  EXPECT_NE(text.find("External(func:numeric-add(?x 1))"), std::string::npos);
  EXPECT_THROW(flatten_externals(parse_kb("Forall ?x (p(External(func:numeric-add(?x 1))) :- q(?x))")),
               TransformError);
}

TEST(Stages, EmptyKbStaysEmpty) {
  KnowledgeBase empty;
  for (auto mode : {ObjectificationMode::Static, ObjectificationMode::StaticDynamic})
    EXPECT_TRUE(run_pipeline(empty, mode, Target::Engine).asserts.empty());
}

TEST(Stages, EachStageIsIdempotentOnFuzzedKbs) {
  std::mt19937 rng(77);
  fixtures::FuzzOptions opt;
  for (int i = 0; i < 200; ++i) {
    KnowledgeBase kb = fixtures::random_kb(rng, opt);
    for (auto mode : {ObjectificationMode::Static, ObjectificationMode::StaticDynamic}) {
      KnowledgeBase cur = kb;
      for (const auto& name : stage_names()) {
        SCOPED_TRACE(name + "\n" + show(cur));
        KnowledgeBase once = stage(name, cur, mode);
        KnowledgeBase twice = stage(name, once, mode);
        ASSERT_EQ(show(twice), show(once));
        cur = once;
      }
    }
  }
}

TEST(Describution, CountLawOnFuzzedAtoms) {
  std::mt19937 rng(4242);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    KnowledgeBase kb = run_until(fixtures::random_kb(rng), ObjectificationMode::Static, "objectify");
    for (const auto& s : kb.asserts) {
      const auto& c = std::get<Clause>(s);
      std::vector<Psoa> atoms = formula_atoms(c.head);
      if (c.condition) {
        auto more = formula_atoms(*c.condition);
        atoms.insert(atoms.end(), more.begin(), more.end());
      }
      for (const auto& a : atoms) {
        if (!a.oidful()) continue;
        auto cs = describute_atom(a);
        ASSERT_EQ(cs.size(), 1 + a.descriptors.size()) << print_atom(a);
        std::multiset<std::string> got;
        for (const auto& f : cs) got.insert(print_formula(f));
        EXPECT_EQ(got, expected_conjuncts(a)) << print_atom(a);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Describution, DuplicateDescriptorsAreCounted) {
  auto kb = parse_kb("o#p(+[a] +[a] s->1 s->1)");
  EXPECT_EQ(describute_atom(std::get<Clause>(kb.asserts[0]).head.as<AtomFormula>().atom).size(), 5u);
}

TEST(Describution, Kb1Kb2Kb3AgreeAsBags) {
  auto b1 = data_bag(describute(corpus_kb("kb1.psoa")));
  auto b2 = data_bag(describute(corpus_kb("kb2.psoa")));
  auto b3 = data_bag(describute(corpus_kb("kb3.psoa")));
  EXPECT_EQ(b1.size(), 9u);
  EXPECT_EQ(b2, b1);
  EXPECT_EQ(b3, b1);
  EXPECT_EQ(b1.count("John#Top(-[1995 8 17])"), 1u);
  EXPECT_EQ(b1.count("John#Teacher(salary+>29400)"), 1u);
}

TEST(Relational, DetectionFollowsDefinition) {
  auto set = detect_relational_predicates(parse_kb(R"(
    family(Mary John)
    family(Ann Bob Cid)
    o#owned(a)
    owned(b)
    likes(a b c->d)
    Forall ?x (anc(?x) :- And(family(?x ?y) likes(?x)))
  )"));
  EXPECT_TRUE(set.contains(local("family")));
  EXPECT_EQ(set.arities.at(Constant::local("family")), (std::set<std::size_t>{2, 3}));
  EXPECT_TRUE(set.contains(local("anc")));
  EXPECT_FALSE(set.contains(local("owned")));
  EXPECT_FALSE(set.contains(local("likes")));
  EXPECT_FALSE(set.contains(var("x")));
}

TEST(Relational, OnlyDependentTupleChainsAreRelational) {
  for (auto g : {ChainGroup::DepTuple, ChainGroup::IndepTuple, ChainGroup::DepSlot, ChainGroup::IndepSlot}) {
    auto [kb, q] = generate_chain({g, 5});
    auto set = detect_relational_predicates(kb);
    EXPECT_EQ(set.contains(local("r3")), g == ChainGroup::DepTuple) << to_string(g);
  }
}

TEST(Relational, DynamicObjectificationOfQueryAtoms) {
  auto set = detect_relational_predicates(parse_kb("family(Mary John)"));
  FreshNames fresh;
  auto atom_of = [](const std::string& q) { return parse_query(q).as<AtomFormula>().atom; };

  // OID not demanded: the atom is asked oidless
  EXPECT_EQ(print_formula(dynamic_objectify_query_atom(atom_of("?o#family(?a ?b)"), set, false, fresh)),
            "family(?a ?b)");
  // demanded: the OID is the virtual oidcons term
  EXPECT_EQ(print_formula(dynamic_objectify_query_atom(atom_of("?o#family(?a ?b)"), set, true, fresh)),
            "And(family(?a ?b) ?o = oidcons(family ?a ?b))");
  // constant OIDs and descriptors a virtual object lacks never match
  EXPECT_EQ(print_formula(dynamic_objectify_query_atom(atom_of("f1#family(?a ?b)"), set, false, fresh)), "Or()");
  EXPECT_EQ(print_formula(dynamic_objectify_query_atom(atom_of("?o#family(s->?a)"), set, false, fresh)), "Or()");
  EXPECT_EQ(print_formula(dynamic_objectify_query_atom(atom_of("?o#family(?a)"), set, false, fresh)), "Or()");
  // bare membership ranges over the known arities
  auto m = dynamic_objectify_query_atom(atom_of("?o#family"), set, false, fresh);
  ASSERT_TRUE(m.is<Exists>());
  EXPECT_EQ(m.as<Exists>().vars.size(), 2u);
}

TEST(Relational, PreparedQueryKeepsAnswerVariables) {
  auto kb = parse_kb("family(Mary John)");
  auto set = detect_relational_predicates(kb);
  Formula q = parse_query("?o#family(?a ?b)");
  Formula p = prepare_query(q, ObjectificationMode::StaticDynamic, set);
  auto vs = free_variables(p);
  std::set<std::string> names;
  for (const auto& v : vs) names.insert(v.name);
  EXPECT_EQ(names, (std::set<std::string>{"o", "a", "b"}));
}
