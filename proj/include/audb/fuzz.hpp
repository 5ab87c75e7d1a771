#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gen.hpp"
#include "oracle.hpp"
#include "plan.hpp"

namespace audb {

struct FuzzCase {
    nlohmann::json plan;
    int count;
    bool two_relations;
};

// Plans over R(A0, A1), and S(B0, B1) for the join, with instance counts per plan.
inline std::vector<FuzzCase> preservation_cases() {
    using nlohmann::json;
    json scan = {{"op", "scan"}, {"input", "R"}};
    std::vector<FuzzCase> cases;
    cases.push_back({{{"op", "select"}, {"input", scan},
                      {"pred", {{"op", "<="}, {"args", {{{"var", "A0"}}, {{"var", "A1"}}}}}}},
                     50, false});
    cases.push_back({{{"op", "project"}, {"input", scan},
                      {"targets", {{{"expr", {{"op", "+"}, {"args", {{{"var", "A0"}}, {{"var", "A1"}}}}}}, {"as", "X"}}}}},
                     50, false});
    cases.push_back({{{"op", "join"}, {"left", scan}, {"right", {{"op", "scan"}, {"input", "S"}}},
                      {"pred", {{"op", "="}, {"args", {{{"var", "A0"}}, {{"var", "B0"}}}}}}},
                     40, true});
    for (const char* f : {"sum", "count", "min", "max", "avg"}) {
        cases.push_back({{{"op", "aggregate"}, {"input", scan}, {"group_by", {"A0"}}, {"func", f}, {"attr", "A1"}, {"as", "X"}},
                         15, false});
        cases.push_back({{{"op", "aggregate"}, {"input", scan}, {"group_by", json::array()}, {"func", f}, {"attr", "A1"},
                          {"as", "X"}},
                         10, false});
    }
    json order = {{{"attr", "A0"}}};
    cases.push_back({{{"op", "sort"}, {"input", scan}, {"order", order}}, 50, false});
    cases.push_back({{{"op", "topk"}, {"input", scan}, {"order", {{{"attr", "A0"}, {"dir", "desc"}}}}, {"k", 2}}, 50, false});
    for (const char* f : {"sum", "min", "max", "count"})
        for (int n : {1, 2}) {
            json fr = n == 1 ? json::array({-1, 0}) : json::array({0, 2});
            cases.push_back({{{"op", "window"}, {"input", scan}, {"func", f}, {"attr", "A1"}, {"as", "X"}, {"order", order},
                              {"frame", fr}},
                             15, false});
            cases.push_back({{{"op", "window"}, {"input", scan}, {"func", f}, {"attr", "A1"}, {"as", "X"}, {"order", order},
                              {"partition_by", {"A1"}}, {"frame", fr}},
                             5, false});
        }
    return cases;
}

struct FuzzSummary {
    int instances = 0;
    int failed = 0;
    std::string first_failure;
};

// Sort, top-k and unpartitioned windows are checked with both engines.
inline FuzzSummary preservation_fuzz(std::uint64_t seed, int rounds = 1) {
    gen::Rng rng(seed);
    FuzzSummary s;
    for (auto& c : preservation_cases()) {
        Plan p = parse_plan(c.plan);
        const std::string op = c.plan["op"];
        bool physical = op == "sort" || op == "topk" || (op == "window" && !c.plan.contains("partition_by"));
        for (int i = 0; i < c.count * rounds; ++i) {
            DatabaseSpec db;
            gen::SpecParams sp;
            if (c.two_relations) {
                sp.max_rows = 3;
                sp.max_worlds = 30;
                db.emplace("S", gen::random_spec(rng, sp, "B"));
            }
            db.emplace("R", gen::random_spec(rng, sp));
            ++s.instances;
            CheckResult r = check_plan(p, db);
            bool ok = r.report.ok;
            std::string why = r.report.witness;
            if (ok && physical) {
                CheckResult n = check_plan(p, db, Engine::Native);
                ok = n.report.ok;
                why = "native: " + n.report.witness;
            }
            if (!ok) {
                ++s.failed;
                if (s.first_failure.empty()) s.first_failure = c.plan.dump() + " (" + why + ")";
            }
        }
    }
    return s;
}

}  // namespace audb
