// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "psoa/ast.hpp"
#include "psoa/printer.hpp"
#include "psoa/runtime.hpp"
#include "psoa/transform.hpp"

namespace psoa {

struct EngineConfig {
  std::optional<int> depth_limit;          // >= 1 when set
  std::optional<std::size_t> max_answers;  // >= 1 when set
  ObjectificationMode objectification = ObjectificationMode::StaticDynamic;
  bool tabling = true;
  bool occurs_check = false;
};

enum class Verdict { Success, Fail };

using Substitution = std::vector<std::pair<Variable, Term>>;

struct Answer {
  Verdict verdict = Verdict::Fail;
  std::vector<Variable> variables;    // answer variables in query order
  std::vector<Substitution> bindings;  // one per distinct answer; empty for ground queries
  bool depth_exceeded = false;
};

// Result of a built-in: truth for predicates, a value for functions.
using BuiltinValue = std::variant<bool, Term>;

// Registry lookup by IRI. Args must be ground numbers (EngineError otherwise).
BuiltinValue evaluate_builtin(const Constant& iri, const std::vector<Term>& args);
bool is_builtin_function(const Constant& iri);
bool is_known_builtin(const Constant& iri);

struct StoreData;

// Immutable indexed clause store; safe to share between concurrent solves.
class Store {
 public:
  explicit Store(const std::vector<RuntimeClause>& clauses);
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  std::size_t size() const;
  // Clauses with conclusion-only variables (other than the Top membership clause).
  const std::vector<std::string>& diagnostics() const;
  const StoreData& data() const { return *data_; }

 private:
  std::unique_ptr<StoreData> data_;
};

// Solves a compiled query. Each call owns its derivation state and runs on a
// private large-stack thread.
Answer solve(const Store& store, const RuntimeQuery& query, const std::vector<Variable>& answer_variables,
             const EngineConfig& config);
// Convenience: answer variables are the free variables of `prepared` that
// are not anonymous.
Answer solve(const std::vector<RuntimeClause>& clauses, const Formula& prepared, const EngineConfig& config);

// `success`, `fail`, or one `?x=v ?y=w` line per answer.
std::string answer_format(const Answer& answer, const PrintOptions& opt = {});

// Free variables of a query that are reported in answers (not `?` anonymous ones).
std::vector<Variable> answer_variables(const Formula& query);

// Loads a KB through the Engine pipeline and answers queries over it.
class Reasoner {
 public:
  explicit Reasoner(KnowledgeBase kb, EngineConfig config = {});

  Answer ask(const Formula& query) const;
  Answer ask(std::string_view query_text) const;

  const KnowledgeBase& source() const { return source_; }
  const KnowledgeBase& transformed() const { return transformed_; }
  const std::vector<RuntimeClause>& clauses() const { return clauses_; }
  const RelationalPredicateSet& relational() const { return relational_; }
  const EngineConfig& config() const { return config_; }
  const Store& store() const { return *store_; }
  Formula prepare(const Formula& query) const;

 private:
  KnowledgeBase source_;
  EngineConfig config_;
  RelationalPredicateSet relational_;
  KnowledgeBase transformed_;
  std::vector<RuntimeClause> clauses_;
  std::shared_ptr<const Store> store_;
};

}  // namespace psoa
