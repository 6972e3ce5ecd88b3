// SPDX-License-Identifier: Apache-2.0
// psoa: batch queries, emitters, classification, the Chain benchmark and a REPL.
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "psoa/chain.hpp"
#include "psoa/classify.hpp"
#include "psoa/parser.hpp"
#include "psoa/printer.hpp"
#include "psoa/repl.hpp"
#include "psoa/session.hpp"

using namespace psoa;

namespace {

ObjectificationMode parse_mode(const std::string& s) {
  if (s == "static") return ObjectificationMode::Static;
  if (s == "dynamic") return ObjectificationMode::StaticDynamic;
  throw Error("--mode must be static or dynamic");
}

std::vector<int> parse_k_range(const std::string& s) {
  std::vector<int> out;
  std::vector<int> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stoi(item));
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() != 3 || parts[2] <= 0 || parts[0] > parts[1]) throw Error("--k expects lo:hi:step");
  for (int k = parts[0]; k <= parts[1]; k += parts[2]) out.push_back(k);
  return out;
}

void classify_formula(const Formula& f, std::ostream& out) {
  for (const auto& a : formula_atoms(f)) out << print_atom(a) << "\t" << classify_atom(a).to_string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSOA RuleML reasoner"};
  app.require_subcommand(0, 1);

  std::string mode = "dynamic";
  std::optional<int> depth;
  std::string tabling = "on";
  std::vector<std::string> repl_files;
  app.add_option("kb", repl_files, "KB files to load into the REPL");
  app.add_option("--mode", mode, "objectification: static|dynamic")->check(CLI::IsMember({"static", "dynamic"}));

  auto* run = app.add_subcommand("run", "load a KB and answer queries");
  std::string run_kb, run_query, emit_stage;
  run->add_option("kb", run_kb)->required();
  run->add_option("-q,--query", run_query, "answer one query and exit (1 on fail)");
  run->add_option("--mode", mode)->check(CLI::IsMember({"static", "dynamic"}));
  run->add_option("--depth", depth)->check(CLI::PositiveNumber);
  run->add_option("--tabling", tabling)->check(CLI::IsMember({"on", "off"}));
  run->add_option("--emit-stage", emit_stage, "print the KB after the named stage");

  auto* emit = app.add_subcommand("emit", "translate a KB");
  std::string emit_to, emit_kb_path, emit_out;
  emit->add_option("--to", emit_to)->required()->check(CLI::IsMember({"prolog", "tptp", "xml"}));
  emit->add_option("kb", emit_kb_path)->required();
  emit->add_option("-o,--output", emit_out);
  emit->add_option("--mode", mode)->check(CLI::IsMember({"static", "dynamic"}));

  auto* bench = app.add_subcommand("bench", "Chain benchmark");
  std::string groups = "dt,it,ds,is", krange = "0:500:50", bench_out, bench_json, modes = "static,dynamic";
  int reps = 5;
  bench->add_option("--groups", groups);
  bench->add_option("--k", krange);
  bench->add_option("--modes", modes);
  bench->add_option("--reps", reps)->check(CLI::PositiveNumber);
  bench->add_option("-o,--output", bench_out, "TSV file");
  bench->add_option("--json", bench_json, "JSON lines file");

  auto* classify = app.add_subcommand("classify", "print the category of every atom");
  std::string classify_kb;
  classify->add_option("kb", classify_kb)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    EngineConfig config;
    config.objectification = parse_mode(mode);
    config.depth_limit = depth;
    config.tabling = tabling == "on";

    if (*run) {
      KnowledgeBase kb = load_kb_file(run_kb);
      if (!emit_stage.empty()) {
        if (!is_stage_name(emit_stage)) throw Error("unknown stage: " + emit_stage);
        std::cout << print_presentation(run_until(kb, config.objectification, emit_stage), SyntaxMode::Abridged);
        return 0;
      }
      Reasoner reasoner(kb, config);
      PrintOptions opt;
      opt.prefixes = kb.prefixes;
      if (!run_query.empty()) {
        Answer a = reasoner.ask(parse_query(run_query, kb.prefixes));
        std::cout << answer_format(a, opt) << "\n";
        return a.verdict == Verdict::Success ? 0 : 1;
      }
      bool all = true;
      for (const auto& q : kb.queries) {
        Answer a = reasoner.ask(q);
        std::cout << "> " << print_formula(q, opt) << "\n" << answer_format(a, opt) << "\n";
        all = all && a.verdict == Verdict::Success;
      }
      return all ? 0 : 1;
    }
    if (*emit) {
      std::string text = emit_kb(load_kb_file(emit_kb_path), emit_to, config.objectification);
      if (emit_out.empty()) std::cout << text;
      else write_text_file(emit_out, text);
      return 0;
    }
    if (*bench) {
      std::vector<BenchCell> grid;
      std::vector<ChainGroup> gs;
      std::vector<ObjectificationMode> ms;
      std::stringstream gss(groups), mss(modes);
      std::string item;
      while (std::getline(gss, item, ',')) {
        auto g = parse_chain_group(item);
        if (!g) throw Error("unknown group: " + item);
        gs.push_back(*g);
      }
      while (std::getline(mss, item, ',')) ms.push_back(parse_mode(item));
      for (int k : parse_k_range(krange))
        for (auto g : gs)
          for (auto m : ms) grid.push_back({ChainSpec{g, k, 3}, m});
      auto results = run_bench(grid, reps, config);
      std::string tsv = bench_tsv(results);
      if (bench_out.empty()) std::cout << tsv;
      else write_text_file(bench_out, tsv);
      if (!bench_json.empty()) write_text_file(bench_json, bench_json_lines(results));
      return 0;
    }
    if (*classify) {
      KnowledgeBase kb = load_kb_file(classify_kb);
      for (const auto& st : kb.asserts) {
        if (const auto* c = std::get_if<Clause>(&st)) {
          classify_formula(c->head, std::cout);
          if (c->condition) classify_formula(*c->condition, std::cout);
        }
      }
      return 0;
    }

    Repl repl(config);
    for (const auto& f : repl_files) repl.load(f);
    repl.run(std::cin, std::cout);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
