// SPDX-License-Identifier: Apache-2.0
#include "psoa/chain.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <new>
#include <sstream>

#include "json.hpp"

#include "psoa/printer.hpp"

namespace psoa {

const char* to_string(ChainGroup g) {
  switch (g) {
    case ChainGroup::DepTuple: return "DepTuple";
    case ChainGroup::IndepTuple: return "IndepTuple";
    case ChainGroup::DepSlot: return "DepSlot";
    case ChainGroup::IndepSlot: return "IndepSlot";
  }
  return "?";
}

std::optional<ChainGroup> parse_chain_group(std::string_view s) {
  if (s == "dt" || s == "DepTuple") return ChainGroup::DepTuple;
  if (s == "it" || s == "IndepTuple") return ChainGroup::IndepTuple;
  if (s == "ds" || s == "DepSlot") return ChainGroup::DepSlot;
  if (s == "is" || s == "IndepSlot") return ChainGroup::IndepSlot;
  return std::nullopt;
}

const char* to_string(BenchVerdict v) {
  switch (v) {
    case BenchVerdict::Answered: return "answered";
    case BenchVerdict::DepthExceeded: return "depth-err";
    case BenchVerdict::MemoryError: return "query-err";
  }
  return "?";
}

namespace {

Psoa chain_atom(const ChainSpec& spec, int i, const std::vector<Term>& args) {
  bool slotted = spec.group == ChainGroup::DepSlot || spec.group == ChainGroup::IndepSlot;
  Dependency dep = spec.group == ChainGroup::DepTuple || spec.group == ChainGroup::DepSlot ? Dependency::Dependent
                                                                                          : Dependency::Independent;
  std::vector<Descriptor> ds;
  if (slotted) {
    for (std::size_t j = 0; j < args.size(); ++j) ds.push_back(Descriptor::slot(local("p" + std::to_string(j + 1)), args[j], dep));
  } else {
    ds.push_back(Descriptor::tuple(args, dep));
  }
  return make_atom(std::nullopt, local("r" + std::to_string(i)), std::move(ds));
}

}  // namespace

std::pair<KnowledgeBase, Formula> generate_chain(const ChainSpec& spec) {
  std::vector<Term> consts, vars;
  std::vector<Variable> forall;
  for (int j = 1; j <= spec.arity; ++j) {
    consts.push_back(local("a" + std::to_string(j)));
    forall.push_back(Variable{"X" + std::to_string(j)});
    vars.push_back(Term(forall.back()));
  }
  KnowledgeBase kb;
  kb.asserts.emplace_back(make_fact(AtomFormula{chain_atom(spec, 0, consts)}));
  for (int i = 1; i <= spec.k; ++i) {
    Clause c{forall, AtomFormula{chain_atom(spec, i, vars)}, Formula(AtomFormula{chain_atom(spec, i - 1, vars)})};
    kb.asserts.emplace_back(std::move(c));
  }
  return {std::move(kb), Formula(AtomFormula{chain_atom(spec, spec.k, vars)})};
}

std::string chain_text(const ChainSpec& spec) {
  return print_presentation(generate_chain(spec).first, SyntaxMode::Unabridged);
}

std::vector<BenchResult> run_bench(const std::vector<BenchCell>& grid, int repetitions, const EngineConfig& base) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchResult> out;
  for (const auto& cell : grid) {
    BenchResult r{cell.spec, cell.objectification, 0, BenchVerdict::Answered};
    auto [kb, query] = generate_chain(cell.spec);
    EngineConfig cfg = base;
    cfg.objectification = cell.objectification;
    try {
      Reasoner reasoner(std::move(kb), cfg);
      std::vector<double> times;
      for (int rep = 0; rep <= std::max(1, repetitions); ++rep) {
        auto t0 = clock::now();
        Answer a = reasoner.ask(query);
        auto t1 = clock::now();
        if (a.depth_exceeded) {
          r.verdict = BenchVerdict::DepthExceeded;
          break;
        }
        if (a.bindings.size() != 1) throw Error("chain benchmark: expected one answer, got " + answer_format(a));
        for (const auto& [v, t] : a.bindings[0]) {
          Term expect = local("a" + v.name.substr(1));
          if (t != expect) throw Error("chain benchmark: wrong binding " + answer_format(a));
        }
        if (rep > 0) times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      if (!times.empty()) {
        std::sort(times.begin(), times.end());
        std::size_t n = times.size();
        r.wall_millis = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
      }
    } catch (const std::bad_alloc&) {
      r.verdict = BenchVerdict::MemoryError;
    } catch (const EngineError& e) {
      if (e.kind() != EngineError::Kind::Resource) throw;
      r.verdict = BenchVerdict::MemoryError;
    }
    out.push_back(r);
  }
  return out;
}

namespace {

std::string mode_name(ObjectificationMode m) { return m == ObjectificationMode::Static ? "static" : "dynamic"; }

}  // namespace

std::string bench_tsv(const std::vector<BenchResult>& results) {
  std::vector<std::pair<ChainGroup, ObjectificationMode>> columns;
  std::map<int, std::map<std::size_t, const BenchResult*>> rows;
  for (const auto& r : results) {
    std::pair key{r.spec.group, r.objectification};
    auto it = std::find(columns.begin(), columns.end(), key);
    std::size_t col = it - columns.begin();
    if (it == columns.end()) columns.push_back(key);
    rows[r.spec.k][col] = &r;
  }
  std::ostringstream os;
  os << "k";
  for (const auto& [g, m] : columns) os << '\t' << to_string(g) << '/' << mode_name(m);
  os << '\n';
  for (const auto& [k, cells] : rows) {
    os << k;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << '\t';
      auto it = cells.find(c);
      if (it == cells.end()) continue;
      if (it->second->verdict == BenchVerdict::Answered) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", it->second->wall_millis);
        os << buf;
      } else {
        os << to_string(it->second->verdict);
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string bench_json_lines(const std::vector<BenchResult>& results) {
  std::string out;
  for (const auto& r : results) {
    nlohmann::json j{{"group", to_string(r.spec.group)},
                     {"k", r.spec.k},
                     {"mode", mode_name(r.objectification)},
                     {"verdict", to_string(r.verdict)},
                     {"ms", r.wall_millis}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace psoa
