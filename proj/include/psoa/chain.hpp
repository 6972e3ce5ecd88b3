// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psoa/ast.hpp"
#include "psoa/engine.hpp"

namespace psoa {

enum class ChainGroup { DepTuple, IndepTuple, DepSlot, IndepSlot };

struct ChainSpec {
  ChainGroup group = ChainGroup::DepTuple;
  int k = 0;
  int arity = 3;
};

const char* to_string(ChainGroup g);
// Accepts dt, it, ds, is (and the full names).
std::optional<ChainGroup> parse_chain_group(std::string_view s);

// Fact _r0(_a1 _a2 _a3), rules _ri(?X..) :- _r(i-1)(?X..) for i = 1..k, and
// the query _rk(?X1 ?X2 ?X3).
std::pair<KnowledgeBase, Formula> generate_chain(const ChainSpec& spec);
// Unabridged presentation of the generated KB.
std::string chain_text(const ChainSpec& spec);

enum class BenchVerdict { Answered, DepthExceeded, MemoryError };
const char* to_string(BenchVerdict v);

struct BenchResult {
  ChainSpec spec;
  ObjectificationMode objectification = ObjectificationMode::StaticDynamic;
  double wall_millis = 0;  // median query time
  BenchVerdict verdict = BenchVerdict::Answered;
};

struct BenchCell {
  ChainSpec spec;
  ObjectificationMode objectification = ObjectificationMode::StaticDynamic;
};

// Each cell's KB is loaded once; the query is then run reps+1 times and the
// first run is discarded. Throws if an answered cell has the wrong answer.
std::vector<BenchResult> run_bench(const std::vector<BenchCell>& grid, int repetitions,
                                   const EngineConfig& base = {});

// Tab-separated table: one row per k, one column per (group, mode) in grid order.
std::string bench_tsv(const std::vector<BenchResult>& results);
std::string bench_json_lines(const std::vector<BenchResult>& results);

}  // namespace psoa
