// SPDX-License-Identifier: Apache-2.0
#include "psoa/engine.hpp"

#include <pthread.h>
#include <sys/mman.h>

#include <algorithm>
#include <cstring>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

#include "psoa/error.hpp"
#include "psoa/parser.hpp"

namespace psoa {

// ================================================================ builtins

namespace {

enum class Op { Gt, Lt, Ge, Le, Eq, Ne, Add, Sub, Mul };

const std::map<std::string, Op>& builtin_table() {
  static const std::map<std::string, Op> table = {
      {std::string(kPredNs) + "numeric-greater-than", Op::Gt},
      {std::string(kPredNs) + "numeric-less-than", Op::Lt},
      {std::string(kPredNs) + "numeric-greater-than-or-equal", Op::Ge},
      {std::string(kPredNs) + "numeric-less-than-or-equal", Op::Le},
      {std::string(kPredNs) + "numeric-equal", Op::Eq},
      {std::string(kPredNs) + "numeric-not-equal", Op::Ne},
      {std::string(kFuncNs) + "numeric-add", Op::Add},
      {std::string(kFuncNs) + "numeric-subtract", Op::Sub},
      {std::string(kFuncNs) + "numeric-multiply", Op::Mul},
  };
  return table;
}

const Op* lookup_builtin(const Constant& iri) {
  if (!iri.is_iri()) return nullptr;
  auto it = builtin_table().find(iri.text());
  return it == builtin_table().end() ? nullptr : &it->second;
}

}  // namespace

bool is_known_builtin(const Constant& iri) { return lookup_builtin(iri) != nullptr; }

bool is_builtin_function(const Constant& iri) {
  const Op* op = lookup_builtin(iri);
  return op && (*op == Op::Add || *op == Op::Sub || *op == Op::Mul);
}

BuiltinValue evaluate_builtin(const Constant& iri, const std::vector<Term>& args) {
  const Op* op = lookup_builtin(iri);
  if (!op) throw EngineError(EngineError::Kind::UnknownBuiltin, "unknown built-in " + iri.text());
  if (args.size() != 2)
    throw EngineError(EngineError::Kind::Type, iri.text() + " expects 2 arguments, got " + std::to_string(args.size()));
  for (const auto& a : args) {
    if (!is_ground(a))
      throw EngineError(EngineError::Kind::Instantiation, "unbound argument to " + iri.text());
    if (!a.is_constant() || !a.constant().is_number())
      throw EngineError(EngineError::Kind::Type, iri.text() + " expects numeric arguments, got " + print_term(a));
  }
  const Decimal& x = args[0].constant().value();
  const Decimal& y = args[1].constant().value();
  switch (*op) {
    case Op::Gt: return x > y;
    case Op::Lt: return x < y;
    case Op::Ge: return x >= y;
    case Op::Le: return x <= y;
    case Op::Eq: return x == y;
    case Op::Ne: return !(x == y);
    case Op::Add: return Term(Constant::number(x + y));
    case Op::Sub: return Term(Constant::number(x - y));
    case Op::Mul: return Term(Constant::number(x * y));
  }
  return false;
}

// ============================================================ clause store

namespace detail {

enum class Tag : std::uint8_t { None, Ref, Con, Ptr, Str, Var };

// Ref: variable cell index (self when unbound). Con: constant id.
// Ptr: index of a Str header, whose `arity` arguments follow it.
// Var: clause-local variable number (templates only).
struct Cell {
  Tag tag = Tag::None;
  std::uint32_t arity = 0;
  std::int32_t val = 0;
};

inline Cell make_cell(Tag t, std::int32_t v, std::uint32_t arity = 0) { return Cell{t, arity, v}; }

enum class PredKind { Clauses, Equal, Builtin };

struct TGoal {
  int pred;
  std::uint32_t args;
  std::uint32_t arity;
};

// Clause or answer template: head/answer arguments occupy cells [0, arity).
struct Template {
  std::vector<Cell> cells;
  std::uint32_t arity = 0;
  std::vector<TGoal> body;
  int nvars = 0;
};

struct PredIndex {
  std::vector<const Template*> all;
  std::unordered_map<std::int64_t, std::vector<const Template*>> by_key;
  std::vector<const Template*> var_key;
  int position = -1;
};

struct PredInfo {
  PredKind kind = PredKind::Clauses;
  std::string key;
  Constant name = Constant::local("");
  std::uint32_t arity = 0;
  PredIndex index;
};

std::int64_t index_key(const std::vector<Cell>& cells, Cell c) {
  if (c.tag == Tag::Con) return c.val;
  const Cell& h = cells[c.val];
  return (std::int64_t{1} << 62) | (std::int64_t{h.arity} << 32) | static_cast<std::uint32_t>(h.val);
}

void build_index(PredIndex& idx) {
  if (idx.all.empty()) return;
  std::uint32_t arity = idx.all.front()->arity;
  idx.position = arity >= 2 ? 1 : (arity == 1 ? 0 : -1);
  if (idx.position < 0) return;
  std::set<std::int64_t> keys;
  for (const Template* t : idx.all) {
    Cell c = t->cells[idx.position];
    if (c.tag != Tag::Var) keys.insert(index_key(t->cells, c));
  }
  for (auto k : keys) idx.by_key[k];
  for (const Template* t : idx.all) {
    Cell c = t->cells[idx.position];
    if (c.tag == Tag::Var) {
      idx.var_key.push_back(t);
      for (auto& [k, list] : idx.by_key) list.push_back(t);
    } else {
      idx.by_key[index_key(t->cells, c)].push_back(t);
    }
  }
}

std::string pred_key(const RuntimeAtom& a) {
  switch (a.predicate) {
    case RuntimePredicate::Equal:
      return "=/2";
    case RuntimePredicate::Builtin:
      return "builtin " + a.name.text() + "/" + std::to_string(a.args.size());
    default:
      return a.key();
  }
}

PredKind pred_kind(const RuntimeAtom& a) {
  if (a.predicate == RuntimePredicate::Equal) return PredKind::Equal;
  if (a.predicate == RuntimePredicate::Builtin) return PredKind::Builtin;
  return PredKind::Clauses;
}

// Interning hooks shared by the store and per-solve query compilation.
struct Interner {
  virtual ~Interner() = default;
  virtual int constant(const Constant& c) = 0;
  virtual int predicate(const RuntimeAtom& a) = 0;
};

class TemplateBuilder {
 public:
  TemplateBuilder(Interner& in, Template& t) : in_(in), t_(t) {}

  std::uint32_t args(const std::vector<Term>& terms) {
    auto start = static_cast<std::uint32_t>(t_.cells.size());
    t_.cells.resize(start + terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Cell c = build(terms[i]);
      t_.cells[start + i] = c;
    }
    return start;
  }

  void goal(const RuntimeAtom& a) {
    int pred = in_.predicate(a);
    std::uint32_t start = args(a.args);
    t_.body.push_back(TGoal{pred, start, static_cast<std::uint32_t>(a.args.size())});
  }

  const std::map<std::string, int>& vars() const { return vars_; }

 private:
  Cell build(const Term& t) {
    if (t.is_variable()) {
      auto [it, fresh] = vars_.emplace(t.variable().name, static_cast<int>(vars_.size()));
      if (fresh) t_.nvars = static_cast<int>(vars_.size());
      return make_cell(Tag::Var, it->second);
    }
    if (t.is_constant()) return make_cell(Tag::Con, in_.constant(t.constant()));
    const Psoa& p = t.psoa();
    const auto& es = p.descriptors[0].as_tuple().elements;
    auto h = static_cast<std::int32_t>(t_.cells.size());
    t_.cells.resize(h + 1 + es.size());
    t_.cells[h] = make_cell(Tag::Str, in_.constant(p.predicate.constant()), static_cast<std::uint32_t>(es.size()));
    for (std::size_t i = 0; i < es.size(); ++i) {
      Cell c = build(es[i]);
      t_.cells[h + 1 + i] = c;
    }
    return make_cell(Tag::Ptr, h);
  }

  Interner& in_;
  Template& t_;
  std::map<std::string, int> vars_;
};

}  // namespace detail

using namespace detail;

struct StoreData : Interner {
  std::vector<Constant> constants;
  std::map<Constant, int> constant_ids;
  std::vector<PredInfo> preds;
  std::unordered_map<std::string, int> pred_ids;
  std::deque<Template> clauses;
  std::vector<std::string> diagnostics;

  int constant(const Constant& c) override {
    auto [it, fresh] = constant_ids.emplace(c, static_cast<int>(constants.size()));
    if (fresh) constants.push_back(c);
    return it->second;
  }

  int predicate(const RuntimeAtom& a) override {
    std::string key = pred_key(a);
    auto [it, fresh] = pred_ids.emplace(key, static_cast<int>(preds.size()));
    if (fresh) {
      PredInfo p;
      p.kind = pred_kind(a);
      p.key = key;
      p.name = a.name;
      p.arity = static_cast<std::uint32_t>(a.args.size());
      preds.push_back(std::move(p));
    }
    return it->second;
  }

  int find_constant(const Constant& c) const {
    auto it = constant_ids.find(c);
    return it == constant_ids.end() ? -1 : it->second;
  }

  int find_predicate(const std::string& key) const {
    auto it = pred_ids.find(key);
    return it == pred_ids.end() ? -1 : it->second;
  }
};

namespace {

void compile_clause(Interner& in, const RuntimeClause& c, Template& t, int& head_pred) {
  TemplateBuilder b(in, t);
  head_pred = in.predicate(c.head);
  t.arity = static_cast<std::uint32_t>(c.head.args.size());
  b.args(c.head.args);
  for (const auto& g : c.body) b.goal(g);
}

bool is_top_membership_clause(const RuntimeClause& c) {
  return c.body.empty() && c.head.predicate == RuntimePredicate::Memterm && c.head.args.size() == 2 &&
         c.head.args[0].is_variable() && is_top(c.head.args[1]);
}

}  // namespace

Store::Store(const std::vector<RuntimeClause>& clauses) : data_(std::make_unique<StoreData>()) {
  for (const auto& c : clauses) {
    if (c.head.predicate == RuntimePredicate::Builtin || c.head.predicate == RuntimePredicate::Equal)
      throw ConversionError("built-in or equation in a conclusion: " + print_runtime_clause(c));
    Template& t = data_->clauses.emplace_back();
    int pred = 0;
    compile_clause(*data_, c, t, pred);
    data_->preds[pred].index.all.push_back(&t);

    if (!is_top_membership_clause(c)) {
      std::set<std::string> body_vars;
      for (const auto& b : c.body)
        for (const auto& a : b.args)
          for (const auto& v : variables_of(a)) body_vars.insert(v.name);
      for (const auto& a : c.head.args)
        for (const auto& v : variables_of(a))
          if (!body_vars.count(v.name)) {
            data_->diagnostics.push_back("variable ?" + v.name + " occurs only in the conclusion of " +
                                         print_runtime_clause(c));
            goto next;
          }
    }
  next:;
  }
  for (auto& p : data_->preds) build_index(p.index);
}

Store::~Store() = default;
std::size_t Store::size() const { return data_->clauses.size(); }
const std::vector<std::string>& Store::diagnostics() const { return data_->diagnostics; }

// ================================================================== solver

namespace {

// Non-owning callable reference for continuations.
class Cont {
 public:
  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, Cont>)
  Cont(F& f) : obj_(&f), fn_([](void* o) { return (*static_cast<F*>(o))(); }) {}
  bool operator()() const { return fn_(obj_); }

 private:
  void* obj_;
  bool (*fn_)(void*);
};

struct GoalNode {
  int pred;
  std::uint32_t args;
  std::uint32_t arity;
  int depth;
  std::int32_t next;
};

// Variant key of a call or answer: functor/constant ids with variables
// numbered by first occurrence.
using Key = std::vector<std::int32_t>;
using KeyHash = boost::hash<Key>;

// First-occurrence numbering of heap variables; calls are small, so a flat list beats hashing.
struct VarMap {
  std::vector<std::int32_t> cells;
  int slot(std::int32_t cell) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i] == cell) return static_cast<int>(i);
    cells.push_back(cell);
    return static_cast<int>(cells.size() - 1);
  }
};

struct Table {
  enum class State { New, Evaluating, Incomplete, Complete };
  State state = State::New;
  int dfn = 0;
  int lowlink = 0;
  std::uint64_t pass = 0;  // leader pass in which it was last evaluated
  std::vector<Template> answers;
  std::unordered_set<Key, KeyHash> answer_keys;
};

class Solver : Interner {
 public:
  Solver(const StoreData& store, const EngineConfig& config) : st_(store), cfg_(config) {}

  Answer run(const RuntimeQuery& q, const std::vector<Variable>& answer_vars) {
    Answer result;
    result.variables = answer_vars;

    for (const auto& c : q.aux) {
      Template& t = local_clauses_.emplace_back();
      int pred = 0;
      compile_clause(*this, c, t, pred);
      pred_info(pred).index.all.push_back(&t);
    }
    for (auto& p : local_preds_) build_index(p.index);

    Template query;
    TemplateBuilder b(*this, query);
    for (const auto& g : q.body) b.goal(g);

    std::size_t vbase = bindings_.size();
    bindings_.resize(vbase + query.nvars);
    std::int32_t list = -1;
    for (auto it = query.body.rbegin(); it != query.body.rend(); ++it) list = push_goal(query, *it, vbase, 0, list);

    std::vector<Cell> var_cells;
    for (const auto& v : answer_vars) {
      auto it = b.vars().find(v.name);
      if (it != b.vars().end()) {
        var_cells.push_back(bindings_[vbase + it->second]);
      } else {
        auto i = static_cast<std::int32_t>(heap_.size());
        heap_.push_back(make_cell(Tag::Ref, i));
        var_cells.push_back(heap_.back());
      }
    }

    std::set<std::vector<Term>> seen;
    bool any = false;
    auto on_answer = [&]() -> bool {
      any = true;
      if (answer_vars.empty()) return false;
      std::vector<Term> values;
      for (const auto& c : var_cells) values.push_back(to_term(c));
      if (seen.insert(values).second) {
        Substitution s;
        for (std::size_t i = 0; i < answer_vars.size(); ++i) s.emplace_back(answer_vars[i], values[i]);
        result.bindings.push_back(std::move(s));
        if (cfg_.max_answers && result.bindings.size() >= *cfg_.max_answers) return false;
      }
      return true;
    };
    solve(list, Cont(on_answer));

    result.verdict = any ? Verdict::Success : Verdict::Fail;
    result.depth_exceeded = depth_exceeded_;
    return result;
  }

 private:
  // ------------------------------------------------------------ symbols

  int constant(const Constant& c) override {
    int id = st_.find_constant(c);
    if (id >= 0) return id;
    auto [it, fresh] = local_constant_ids_.emplace(c, static_cast<int>(st_.constants.size() + local_constants_.size()));
    if (fresh) local_constants_.push_back(c);
    return it->second;
  }

  int predicate(const RuntimeAtom& a) override {
    std::string key = pred_key(a);
    int id = st_.find_predicate(key);
    if (id >= 0) return id;
    auto [it, fresh] = local_pred_ids_.emplace(key, static_cast<int>(st_.preds.size() + local_preds_.size()));
    if (fresh) {
      PredInfo p;
      p.kind = pred_kind(a);
      p.key = key;
      p.name = a.name;
      p.arity = static_cast<std::uint32_t>(a.args.size());
      local_preds_.push_back(std::move(p));
    }
    return it->second;
  }

  const Constant& constant_of(int id) const {
    if (id < static_cast<int>(st_.constants.size())) return st_.constants[id];
    return local_constants_[id - st_.constants.size()];
  }

  PredInfo& pred_info(int id) { return local_preds_[id - st_.preds.size()]; }
  const PredInfo& pred(int id) const {
    if (id < static_cast<int>(st_.preds.size())) return st_.preds[id];
    return local_preds_[id - st_.preds.size()];
  }

  // ---------------------------------------------------------- terms

  Cell deref(Cell c) const {
    while (c.tag == Tag::Ref) {
      const Cell& n = heap_[c.val];
      if (n.tag == Tag::Ref && n.val == c.val) return c;
      c = n;
    }
    return c;
  }

  bool occurs(std::int32_t var, Cell c) const {
    c = deref(c);
    if (c.tag == Tag::Ref) return c.val == var;
    if (c.tag != Tag::Ptr) return false;
    const Cell h = heap_[c.val];
    for (std::uint32_t i = 0; i < h.arity; ++i)
      if (occurs(var, heap_[c.val + 1 + i])) return true;
    return false;
  }

  bool bind(std::int32_t var, Cell value) {
    if (cfg_.occurs_check && value.tag == Tag::Ptr && occurs(var, value)) return false;
    heap_[var] = value;
    trail_.push_back(var);
    return true;
  }

  bool unify(Cell a, Cell b) {
    a = deref(a);
    b = deref(b);
    if (a.tag == Tag::Ref && b.tag == Tag::Ref) {
      if (a.val == b.val) return true;
      return a.val > b.val ? bind(a.val, b) : bind(b.val, a);
    }
    if (a.tag == Tag::Ref) return bind(a.val, b);
    if (b.tag == Tag::Ref) return bind(b.val, a);
    if (a.tag == Tag::Con || b.tag == Tag::Con) return a.tag == b.tag && a.val == b.val;
    const Cell ha = heap_[a.val];
    const Cell hb = heap_[b.val];
    if (ha.val != hb.val || ha.arity != hb.arity) return false;
    for (std::uint32_t i = 0; i < ha.arity; ++i)
      if (!unify(heap_[a.val + 1 + i], heap_[b.val + 1 + i])) return false;
    return true;
  }

  // Writes the heap value of template cell `tc` into heap_[dest].
  void instantiate(const std::vector<Cell>& tcells, Cell tc, std::size_t vbase, std::int32_t dest) {
    switch (tc.tag) {
      case Tag::Var: {
        Cell& slot = bindings_[vbase + tc.val];
        if (slot.tag == Tag::None) {
          heap_[dest] = make_cell(Tag::Ref, dest);
          slot = heap_[dest];
        } else {
          heap_[dest] = slot;
        }
        return;
      }
      case Tag::Ptr: {
        const Cell hdr = tcells[tc.val];
        auto h = static_cast<std::int32_t>(heap_.size());
        heap_.resize(h + 1 + hdr.arity);
        heap_[h] = hdr;
        for (std::uint32_t i = 0; i < hdr.arity; ++i) instantiate(tcells, tcells[tc.val + 1 + i], vbase, h + 1 + i);
        heap_[dest] = make_cell(Tag::Ptr, h);
        return;
      }
      default:
        heap_[dest] = tc;
    }
  }

  bool unify_template(const std::vector<Cell>& tcells, Cell tc, Cell hc, std::size_t vbase) {
    switch (tc.tag) {
      case Tag::Con: {
        hc = deref(hc);
        if (hc.tag == Tag::Ref) return bind(hc.val, tc);
        return hc.tag == Tag::Con && hc.val == tc.val;
      }
      case Tag::Var: {
        Cell& slot = bindings_[vbase + tc.val];
        if (slot.tag == Tag::None) {
          slot = deref(hc);
          return true;
        }
        return unify(slot, hc);
      }
      case Tag::Ptr: {
        hc = deref(hc);
        if (hc.tag == Tag::Ref) {
          auto dest = static_cast<std::int32_t>(heap_.size());
          heap_.push_back(Cell{});
          instantiate(tcells, tc, vbase, dest);
          return bind(hc.val, heap_[dest]);
        }
        if (hc.tag != Tag::Ptr) return false;
        const Cell th = tcells[tc.val];
        const Cell hh = heap_[hc.val];
        if (th.val != hh.val || th.arity != hh.arity) return false;
        for (std::uint32_t i = 0; i < th.arity; ++i)
          if (!unify_template(tcells, tcells[tc.val + 1 + i], heap_[hc.val + 1 + i], vbase)) return false;
        return true;
      }
      default:
        return false;
    }
  }

  Term to_term(Cell c) const {
    c = deref(c);
    if (c.tag == Tag::Ref) return Term(Variable{"_G" + std::to_string(c.val)});
    if (c.tag == Tag::Con) return Term(constant_of(c.val));
    const Cell h = heap_[c.val];
    std::vector<Term> args;
    for (std::uint32_t i = 0; i < h.arity; ++i) args.push_back(to_term(heap_[c.val + 1 + i]));
    return Term(Psoa{std::nullopt, Term(constant_of(h.val)), {Descriptor::tuple(std::move(args), Dependency::Dependent)}});
  }

  void serialize(Cell c, Key& out, VarMap& vars) const {
    c = deref(c);
    if (c.tag == Tag::Ref) {
      out.push_back(-1 - vars.slot(c.val));
    } else if (c.tag == Tag::Con) {
      out.push_back(c.val);
    } else {
      const Cell h = heap_[c.val];
      out.push_back(std::numeric_limits<std::int32_t>::min());
      out.push_back(h.val);
      out.push_back(static_cast<std::int32_t>(h.arity));
      for (std::uint32_t i = 0; i < h.arity; ++i) serialize(heap_[c.val + 1 + i], out, vars);
    }
  }

  Cell snapshot(Cell c, Template& t, VarMap& vars) const {
    c = deref(c);
    if (c.tag == Tag::Ref) {
      int slot = vars.slot(c.val);
      t.nvars = static_cast<int>(vars.cells.size());
      return make_cell(Tag::Var, slot);
    }
    if (c.tag == Tag::Con) return c;
    const Cell h = heap_[c.val];
    auto j = static_cast<std::int32_t>(t.cells.size());
    t.cells.resize(j + 1 + h.arity);
    t.cells[j] = h;
    for (std::uint32_t i = 0; i < h.arity; ++i) {
      Cell a = snapshot(heap_[c.val + 1 + i], t, vars);
      t.cells[j + 1 + i] = a;
    }
    return make_cell(Tag::Ptr, j);
  }

  // ------------------------------------------------------- control

  struct Mark {
    std::size_t heap, trail, goals;
  };

  Mark mark() const { return {heap_.size(), trail_.size(), goals_.size()}; }

  void undo(const Mark& m) {
    while (trail_.size() > m.trail) {
      std::int32_t v = trail_.back();
      trail_.pop_back();
      heap_[v] = make_cell(Tag::Ref, v);
    }
    heap_.resize(m.heap);
    goals_.resize(m.goals);
  }

  std::int32_t push_goal(const Template& t, const TGoal& g, std::size_t vbase, int depth, std::int32_t next) {
    auto dest = static_cast<std::int32_t>(heap_.size());
    heap_.resize(dest + g.arity);
    for (std::uint32_t i = 0; i < g.arity; ++i) instantiate(t.cells, t.cells[g.args + i], vbase, dest + i);
    goals_.push_back(GoalNode{g.pred, static_cast<std::uint32_t>(dest), g.arity, depth, next});
    return static_cast<std::int32_t>(goals_.size() - 1);
  }

  bool solve(std::int32_t list, Cont k) {
    if (list < 0) return k();
    const GoalNode g = goals_[list];
    const PredInfo& p = pred(g.pred);
    switch (p.kind) {
      case PredKind::Equal: {
        Mark m = mark();
        bool cont = !unify(heap_[g.args], heap_[g.args + 1]) || solve(g.next, k);
        undo(m);
        return cont;
      }
      case PredKind::Builtin:
        return builtin(g, p, k);
      default:
        return cfg_.tabling ? tabled(g, k) : resolve(g, k);
    }
  }

  std::string describe_goal(const GoalNode& g, const PredInfo& p) const {
    std::string out = print_constant(p.name) + "(";
    for (std::uint32_t i = 0; i < g.arity; ++i) out += (i ? " " : "") + print_term(to_term(heap_[g.args + i]));
    return out + ")";
  }

  bool builtin(const GoalNode& g, const PredInfo& p, Cont k) {
    bool function = is_builtin_function(p.name);
    std::uint32_t inputs = function ? g.arity - 1 : g.arity;
    std::vector<Term> args;
    for (std::uint32_t i = 0; i < inputs; ++i) {
      Term t = to_term(heap_[g.args + i]);
      if (!is_ground(t))
        throw EngineError(EngineError::Kind::Instantiation, "instantiation error in " + describe_goal(g, p));
      args.push_back(std::move(t));
    }
    BuiltinValue v;
    try {
      v = evaluate_builtin(p.name, args);
    } catch (const EngineError& e) {
      throw EngineError(e.kind(), std::string(e.what()) + " in " + describe_goal(g, p));
    }
    if (const bool* truth = std::get_if<bool>(&v)) return !*truth || solve(g.next, k);
    Mark m = mark();
    Cell result = make_cell(Tag::Con, constant(std::get<Term>(v).constant()));
    bool cont = !unify(result, heap_[g.args + g.arity - 1]) || solve(g.next, k);
    undo(m);
    return cont;
  }

  const std::vector<const Template*>& candidates(const GoalNode& g, const PredIndex& idx) const {
    if (idx.position < 0) return idx.all;
    Cell c = deref(heap_[g.args + idx.position]);
    if (c.tag == Tag::Ref) return idx.all;
    std::int64_t key = c.tag == Tag::Con ? c.val : index_key(heap_, c);
    auto it = idx.by_key.find(key);
    return it == idx.by_key.end() ? idx.var_key : it->second;
  }

  // Plain SLD step: try each candidate clause in KB order.
  bool resolve(const GoalNode& g, Cont k) {
    const PredIndex& idx = pred(g.pred).index;
    for (const Template* c : candidates(g, idx)) {
      if (!c->body.empty() && cfg_.depth_limit && g.depth + 1 > *cfg_.depth_limit) {
        depth_exceeded_ = true;
        continue;
      }
      Mark m = mark();
      std::size_t vbase = bindings_.size();
      bindings_.resize(vbase + c->nvars);
      bool ok = true;
      for (std::uint32_t i = 0; i < g.arity && ok; ++i) ok = unify_template(c->cells, c->cells[i], heap_[g.args + i], vbase);
      if (ok) {
        std::int32_t next = g.next;
        for (auto it = c->body.rbegin(); it != c->body.rend(); ++it) next = push_goal(*c, *it, vbase, g.depth + 1, next);
        bindings_.resize(vbase);
        if (!solve(next, k)) {
          undo(m);
          return false;
        }
      } else {
        bindings_.resize(vbase);
      }
      undo(m);
    }
    return true;
  }

  // Linear tabling: a call is evaluated to completion (for its strongly
  // connected component) before its answers are consumed. Recursive variant
  // calls consume the answers found so far; the SCC leader re-runs until no
  // new answers appear.
  bool tabled(const GoalNode& g, Cont k) {
    Key& key = scratch_key_;
    key.assign(1, g.pred);
    scratch_vars_.cells.clear();
    for (std::uint32_t i = 0; i < g.arity; ++i) serialize(heap_[g.args + i], key, scratch_vars_);
    auto found = tables_.find(key);
    if (found == tables_.end()) found = tables_.emplace(key, Table{}).first;
    Table& e = found->second;
    if (e.state == Table::State::New || (e.state == Table::State::Incomplete && e.pass != pass_)) {
      evaluate(e, g);
      if (e.state != Table::State::Complete && !exec_.empty())
        exec_.back()->lowlink = std::min(exec_.back()->lowlink, e.lowlink);
    } else if (e.state == Table::State::Incomplete) {
      // already re-run in this pass; the leader's next pass picks up the rest
      exec_.back()->lowlink = std::min(exec_.back()->lowlink, e.lowlink);
    } else if (e.state == Table::State::Evaluating) {
      exec_.back()->lowlink = std::min(exec_.back()->lowlink, e.dfn);
    }
    if (stopped_) return false;
    if (e.state != Table::State::Complete) incomplete_read_ = true;
    return consume(e, g, k);
  }

  void evaluate(Table& e, const GoalNode& g) {
    // A re-evaluated incomplete table moves to the top of the SCC stack.
    if (e.state == Table::State::Incomplete) scc_.erase(std::remove(scc_.begin(), scc_.end(), &e), scc_.end());
    e.state = Table::State::Evaluating;
    e.pass = pass_;
    e.dfn = e.lowlink = ++dfn_;
    exec_.push_back(&e);
    scc_.push_back(&e);

    GoalNode call = g;
    call.next = -1;
    auto collect = [&]() -> bool {
      Key& key = scratch_key_;
      VarMap& vars = scratch_vars_;
      key.clear();
      vars.cells.clear();
      for (std::uint32_t i = 0; i < call.arity; ++i) serialize(heap_[call.args + i], key, vars);
      if (!e.answer_keys.count(key)) {
        e.answer_keys.insert(key);
        Template t;
        t.arity = call.arity;
        t.cells.resize(call.arity);
        vars.cells.clear();
        for (std::uint32_t i = 0; i < call.arity; ++i) {
          Cell c = snapshot(heap_[call.args + i], t, vars);
          t.cells[i] = c;
        }
        e.answers.push_back(std::move(t));
        ++answer_count_;
      }
      return true;
    };
    // A pass that consumed only completed tables cannot be improved by another.
    bool outer_read = incomplete_read_;
    for (bool first = true;; first = false) {
      if (!first) ++pass_;
      incomplete_read_ = false;
      std::size_t before = answer_count_;
      if (!resolve(call, Cont(collect))) stopped_ = true;
      if (stopped_ || e.lowlink < e.dfn || answer_count_ == before || !incomplete_read_) break;
    }
    incomplete_read_ = outer_read;
    exec_.pop_back();
    if (e.lowlink >= e.dfn) {
      for (;;) {
        Table* t = scc_.back();
        scc_.pop_back();
        t->state = Table::State::Complete;
        if (t == &e) break;
      }
    } else {
      e.state = Table::State::Incomplete;
    }
  }

  bool consume(Table& e, const GoalNode& g, Cont k) {
    for (std::size_t i = 0; i < e.answers.size(); ++i) {
      Mark m = mark();
      std::size_t vbase = bindings_.size();
      bindings_.resize(vbase + e.answers[i].nvars);
      bool ok = true;
      for (std::uint32_t j = 0; j < g.arity && ok; ++j)
        ok = unify_template(e.answers[i].cells, e.answers[i].cells[j], heap_[g.args + j], vbase);
      bindings_.resize(vbase);
      if (ok && !solve(g.next, k)) {
        undo(m);
        return false;
      }
      undo(m);
    }
    return true;
  }

  const StoreData& st_;
  const EngineConfig& cfg_;

  std::vector<Constant> local_constants_;
  std::map<Constant, int> local_constant_ids_;
  std::vector<PredInfo> local_preds_;
  std::unordered_map<std::string, int> local_pred_ids_;
  std::deque<Template> local_clauses_;

  std::vector<Cell> heap_;
  std::vector<std::int32_t> trail_;
  std::vector<GoalNode> goals_;
  std::vector<Cell> bindings_;

  std::unordered_map<Key, Table, KeyHash> tables_;
  Key scratch_key_;
  VarMap scratch_vars_;
  std::vector<Table*> exec_;
  std::vector<Table*> scc_;
  int dfn_ = 0;
  std::uint64_t pass_ = 1;
  std::size_t answer_count_ = 0;
  bool stopped_ = false;
  bool incomplete_read_ = false;
  bool depth_exceeded_ = false;
};

constexpr std::size_t kSolverStack = std::size_t{1} << 30;

constexpr std::size_t kResidentStack = std::size_t{64} << 20;

// glibc caches only small thread stacks, so solver stacks are pooled here.
// Pages touched below the top kResidentStack bytes go back on release.
class StackPool {
 public:
  void* acquire() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (!free_.empty()) {
        void* p = free_.back();
        free_.pop_back();
        return p;
      }
    }
    void* p = mmap(nullptr, kSolverStack, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS | MAP_NORESERVE | MAP_STACK,
                   -1, 0);
    if (p == MAP_FAILED) return nullptr;
    mprotect(p, 4096, PROT_NONE);  // guard page
    return p;
  }

  void release(void* p) {
    madvise(static_cast<char*>(p) + 4096, kSolverStack - kResidentStack - 4096, MADV_DONTNEED);
    std::lock_guard<std::mutex> lock(mu_);
    free_.push_back(p);
  }

 private:
  std::mutex mu_;
  std::vector<void*> free_;
};

StackPool& stack_pool() {
  static StackPool pool;
  return pool;
}

struct SolveJob {
  const StoreData* store;
  const RuntimeQuery* query;
  const std::vector<Variable>* vars;
  const EngineConfig* config;
  Answer answer;
  std::exception_ptr error;
};

void* run_job(void* p) {
  auto* job = static_cast<SolveJob*>(p);
  try {
    Solver s(*job->store, *job->config);
    job->answer = s.run(*job->query, *job->vars);
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

Answer solve(const Store& store, const RuntimeQuery& query, const std::vector<Variable>& answer_vars,
             const EngineConfig& config) {
  if (config.depth_limit && *config.depth_limit < 1) throw Error("depth limit must be at least 1");
  if (config.max_answers && *config.max_answers < 1) throw Error("answer limit must be at least 1");
  SolveJob job{&store.data(), &query, &answer_vars, &config, {}, nullptr};
  void* stack = stack_pool().acquire();
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  if (stack)
    pthread_attr_setstack(&attr, stack, kSolverStack);
  else
    pthread_attr_setstacksize(&attr, kSolverStack);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, run_job, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    run_job(&job);
  } else {
    pthread_join(thread, nullptr);
  }
  if (stack) stack_pool().release(stack);
  if (job.error) std::rethrow_exception(job.error);
  return std::move(job.answer);
}

std::vector<Variable> answer_variables(const Formula& query) {
  std::vector<Variable> out;
  for (const auto& v : free_variables(query))
    if (v.name.rfind("_anon", 0) != 0) out.push_back(v);
  return out;
}

Answer solve(const std::vector<RuntimeClause>& clauses, const Formula& prepared, const EngineConfig& config) {
  Store store(clauses);
  return solve(store, to_runtime_query(prepared), answer_variables(prepared), config);
}

std::string answer_format(const Answer& answer, const PrintOptions& opt) {
  if (answer.verdict == Verdict::Fail) return "fail";
  if (answer.bindings.empty()) return "success";
  std::string out;
  for (std::size_t i = 0; i < answer.bindings.size(); ++i) {
    if (i) out += '\n';
    const auto& s = answer.bindings[i];
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j) out += ' ';
      out += "?" + s[j].first.name + "=" + print_term(s[j].second, opt);
    }
  }
  return out;
}

// ================================================================ reasoner

Reasoner::Reasoner(KnowledgeBase kb, EngineConfig config) : source_(std::move(kb)), config_(config) {
  if (config_.objectification == ObjectificationMode::StaticDynamic)
    relational_ = detect_relational_predicates(run_until(source_, config_.objectification, "subclass"));
  transformed_ = run_pipeline(source_, config_.objectification, Target::Engine);
  clauses_ = to_runtime(transformed_);
  store_ = std::make_shared<const Store>(clauses_);
}

Formula Reasoner::prepare(const Formula& query) const {
  return prepare_query(query, config_.objectification, relational_);
}

Answer Reasoner::ask(const Formula& query) const {
  Formula prepared = prepare(query);
  return solve(*store_, to_runtime_query(prepared), answer_variables(query), config_);
}

Answer Reasoner::ask(std::string_view query_text) const { return ask(parse_query(query_text, source_.prefixes)); }

}  // namespace psoa
