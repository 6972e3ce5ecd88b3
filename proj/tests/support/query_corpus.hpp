// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

namespace psoa::fixtures {

#ifndef PSOA_CORPUS_DIR
#define PSOA_CORPUS_DIR "corpus"
#endif

inline std::string corpus(const std::string& name) { return std::string(PSOA_CORPUS_DIR) + "/" + name; }

// Expected output lines of answer_format, compared as a set.
struct QueryCase {
  std::string name;
  std::vector<std::string> kbs;
  std::string query;
  std::set<std::string> expected;
};

inline const std::set<std::string> kSuccess{"success"};
inline const std::set<std::string> kFail{"fail"};

inline std::vector<QueryCase> query_corpus() {
  const std::vector<std::string> kb1{"kb1.psoa"}, kb2{"kb2.psoa"}, kb3{"kb3.psoa"}, rev{"kb3_reversed.psoa"};
  const std::vector<std::string> sample{"sample.psoa"}, dated{"sample.psoa", "person_dates.psoa"};
  std::vector<QueryCase> cs = {
      // dependency kinds must agree between KB and query
      {"indep_slot_matches", kb3, "John#Student(gender->male)", kSuccess},
      {"dep_slot_vs_indep_fact", kb3, "John#Student(gender+>male)", kFail},
      {"indep_slot_vs_dep_fact", kb3, "John#Student(dept->Math)", kFail},
      {"dep_slot_matches", kb3, "John#Student(dept+>Math)", kSuccess},
      {"indep_tuple_matches", kb3, "John#Student(-[1995 8 17])", kSuccess},
      {"dep_tuple_vs_indep_fact", kb3, "John#Student(+[1995 8 17])", kFail},
      {"indep_tuple_vs_dep_fact", kb3, "John#Student(-[Mon Tue Fri])", kFail},
      {"dep_tuple_matches", kb3, "John#Student(+[Mon Tue Fri])", kSuccess},
      // Top-dependent descriptors revert to independent ones
      {"reverted_kb_indep_query", rev, "John#Student(gender->male)", kSuccess},
      {"top_dep_query_on_indep_kb", kb2, "John#Top(gender+>male)", kSuccess},
      {"top_dep_query_on_reverted_kb", rev, "John#Top(gender+>male)", kSuccess},
      // perspectives
      {"teacher_dept", kb3, "John#Teacher(dept+>?unit)", {"?unit=Physics"}},
      {"student_dept", kb3, "John#Student(dept+>?unit)", {"?unit=Math"}},
      {"variable_perspective", kb3, "John#?Persp(dept+>?unit)",
       {"?Persp=Teacher ?unit=Physics", "?Persp=Student ?unit=Math"}},
      // the TA workload rule
      {"ta_workload_ground", sample, "_John#_TA(_workload+>_high)", kSuccess},
      {"ta_workload_open", sample, "?who#_TA(_workload+>?level)", {"?who=John ?level=high"}},
      {"ta_workload_reversed_ground", sample, "And(_John#_TA _John#_Top(_workload->_high))", kFail},
      {"ta_workload_reversed_open", sample, "And(?who#_TA ?who#_Top(_workload->?level))", kFail},
      {"ta_workload_indep_ground", sample, "_John#_TA(_workload->_high)", kFail},
      {"ta_workload_indep_open", sample, "?who#_TA(_workload->?level)", kFail},
      // dates: independent tuple to Person slots
      {"person_date_ground", dated, "John#Person(year->1995 month->8 day->17)", kSuccess},
      {"person_date_open", dated, "John#Person(year->?ye month->?mo day->?da)", {"?ye=1995 ?mo=8 ?da=17"}},
      {"ta_date_ground", dated, "John#TA(year->1995 month->8 day->17)", kSuccess},
      {"ta_date_open", dated, "John#TA(year->?ye month->?mo day->?da)", {"?ye=1995 ?mo=8 ?da=17"}},
      {"ta_date_unscoped_ground", dated, "And(John#TA John#Top(year->1995 month->8 day->17))", kSuccess},
      {"ta_date_unscoped_open", dated, "And(John#TA John#Top(year->?ye month->?mo day->?da))",
       {"?ye=1995 ?mo=8 ?da=17"}},
      {"ta_date_split_ground", dated, "And(John#TA John#Top(year->1995) John#Top(month->8) John#Top(day->17))",
       kSuccess},
      {"ta_date_split_open", dated, "And(John#TA John#Top(year->?ye) John#Top(month->?mo) John#Top(day->?da))",
       {"?ye=1995 ?mo=8 ?da=17"}},
      // rescoping independent descriptors between perspectives
      {"rescope_empty_teacher", kb2, "And(John#Teacher() John#Student(income->29400))", kSuccess},
      {"rescope_tuple_to_teacher", kb2, "And(John#Teacher(-[1995 8 17]) John#Student(income->29400))", kSuccess},
      {"rescope_to_ta", kb2, "And(John#Teacher John#TA(-[1995 8 17] income->29400) John#Student)", kSuccess},
      // dependent descriptors stay with their predicate
      {"dep_tuple_wrong_perspective", kb2, "And(John#Teacher(+[Mon Tue Fri]) John#Student)", kFail},
      {"dep_tuple_right_perspective", kb2, "And(John#Teacher(+[Wed Thu]) John#Student)", kSuccess},
      {"dep_slot_wrong_perspective", kb2, "And(John#Teacher John#Student(dept+>Physics))", kFail},
      {"dep_slot_right_perspective", kb2, "And(John#Teacher John#Student(dept+>Math))", kSuccess},
  };
  // default-rule inheritance, on each of the three data KBs and as default facts
  for (const auto& base : {kb1, kb2, kb3, std::vector<std::string>{"kb_ta_only.psoa"}}) {
    for (const char* defaults : {"default_rules.psoa", "default_facts.psoa"}) {
      std::vector<std::string> files = base;
      files.push_back(defaults);
      std::string tag = base[0].substr(0, base[0].size() - 5) + "+" + std::string(defaults).substr(0, 13);
      cs.push_back({"inherit_teacher_" + tag, files, "John#Teacher(-[2 3] offer->service)", kSuccess});
      cs.push_back({"inherit_student_" + tag, files, "John#Student(acquire->KSAs aptitude->?w)",
                    {"?w=explanation", "?w=comprehension"}});
      files.push_back("ta_illustration.psoa");
      cs.push_back({"inherit_ta_" + tag, files, "John#TA(aptitude->?w)",
                    {"?w=illustration", "?w=explanation", "?w=comprehension"}});
    }
  }
  return cs;
}

}  // namespace psoa::fixtures
