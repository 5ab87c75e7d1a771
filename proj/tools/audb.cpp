#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "audb/csv.hpp"
#include "audb/fuzz.hpp"
#include "audb/gen.hpp"
#include "audb/native.hpp"
#include "audb/oracle.hpp"
#include "audb/plan.hpp"

using namespace audb;

namespace {

constexpr int kOk = 0, kViolation = 1, kInputError = 2;

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PlanError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw PlanError(path + ": " + e.what());
    }
}

Engine engine_of(const std::string& s) { return s == "native" ? Engine::Native : Engine::Reference; }

// Writes to path, or stdout when path is empty or "-".
template <class F>
void emit(const std::string& path, F write) {
    if (path.empty() || path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw PlanError("cannot write " + path);
    write(out);
}

std::string interval(double lo, double hi) {
    std::ostringstream o;
    o << '[' << Scalar::format_real(lo) << ',' << Scalar::format_real(hi) << ']';
    return o.str();
}

struct RunOpts {
    std::string plan, engine = "reference", output;
    std::vector<std::string> inputs;
};

int run(const RunOpts& o) {
    Plan plan = parse_plan(read_json(o.plan));
    Database db;
    for (auto& in : o.inputs) {
        auto eq = in.find('=');
        std::string name = eq == std::string::npos ? std::filesystem::path(in).stem().string() : in.substr(0, eq);
        std::string path = eq == std::string::npos ? in : in.substr(eq + 1);
        db.insert_or_assign(name, read_au_csv_file(path));
    }
    AuRelation out = execute(plan, db, engine_of(o.engine));
    emit(o.output, [&](std::ostream& os) { write_au_csv(os, out); });
    return kOk;
}

struct CheckOpts {
    std::string spec, plan, engine = "reference", output, value;
    std::vector<std::string> anchor;
    std::uint64_t world_cap = kDefaultWorldCap;
    bool corrupt = false;
};

// Replaces every range and multiplicity by its selected guess.
AuRelation collapse_to_sg(const AuRelation& r) {
    AuRelation out(r.schema());
    for (auto& [t, m] : r.rows()) {
        RangeTuple c;
        for (auto& v : t) c.emplace_back(v.sg);
        if (m.sg > 0) out.add(std::move(c), {m.sg, m.sg, m.sg});
    }
    return out;
}

int check(const CheckOpts& o) {
    DatabaseSpec spec = parse_spec(read_json(o.spec));
    Plan plan = parse_plan(read_json(o.plan));
    CheckResult r = check_plan(plan, spec, engine_of(o.engine), o.world_cap);
    if (o.corrupt) {
        r.au = collapse_to_sg(r.au);
        r.report = check_preservation(r.au, r.world_results);
    }
    std::cout << "worlds: " << r.report.worlds << '\n';
    if (!o.anchor.empty()) {
        if (o.value.empty()) throw PlanError("--anchor needs --value");
        const Schema& s = r.au.schema();
        std::vector<std::size_t> cols;
        for (auto& a : o.anchor) cols.push_back(s.index_of(a));
        std::size_t vc = s.index_of(o.value);
        TightBounds tb = tight_bounds(r.world_results, o.anchor, o.value);
        for (auto& e : tb.errors) std::cout << "note: " << e << '\n';
        for (auto& [key, tight] : tb.value) {
            Interval au{kInf, -kInf};
            for (auto& [t, m] : r.au.rows()) {
                bool match = true;
                for (std::size_t i = 0; i < cols.size(); ++i) match = match && value_bounds(t[cols[i]], key[i]);
                if (match) au = {std::min(au.lo, t[vc].lb.real()), std::max(au.hi, t[vc].ub.real())};
            }
            std::cout << describe(key) << ' ' << o.value << ": tight " << interval(tight.lo, tight.hi) << ", AU "
                      << interval(au.lo, au.hi);
            if (au.lo <= au.hi) {
                Accuracy acc = bound_accuracy(au, tight);
                std::cout << ", recall " << Scalar::format_real(bound_recall(au, tight)) << ", accuracy "
                          << Scalar::format_real(acc.value) << (acc.disjoint ? " (disjoint)" : "");
            }
            std::cout << '\n';
        }
    }
    if (!o.output.empty()) emit(o.output, [&](std::ostream& os) { write_au_csv(os, r.au); });
    if (r.report.ok) {
        std::cout << "PASS\n";
        return kOk;
    }
    std::cout << "FAIL";
    if (r.report.failing_world) std::cout << " at world " << *r.report.failing_world;
    std::cout << ": " << r.report.witness << '\n';
    return kViolation;
}

struct BenchOpts {
    std::string op = "sort", output;
    std::vector<std::size_t> rows{50000};
    double uncertainty = 0.05;
    long range = 1000;
    std::uint64_t k = 10, seed = 1;
    long frame = 3;
    std::size_t reference_limit = 5000, spot_rows = 2000;
    bool scaling = false;
};

double timed(const std::function<void()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int bench(const BenchOpts& o) {
    if (o.op != "sort" && o.op != "topk" && o.op != "window") throw PlanError("unknown bench op: " + o.op);
    std::vector<SortKey> order{{"A"}};
    WindowSpec ws{AggFunc::Sum, "B", "X", {}, order, -o.frame, 0};
    auto run_op = [&](const AuRelation& r, Engine e) {
        if (o.op == "sort") return e == Engine::Native ? native_sort(r, order, "pos") : sort(r, order, "pos");
        if (o.op == "topk") return e == Engine::Native ? native_topk(r, order, "pos", o.k) : topk(r, order, "pos", o.k);
        return e == Engine::Native ? native_window(r, ws) : window_aggregate(r, ws);
    };
    auto params = [&](std::size_t n) {
        gen::BenchParams p;
        p.rows = n;
        p.uncertainty = o.uncertainty;
        p.range = o.range;
        p.seed = o.seed;
        return p;
    };

    std::vector<std::size_t> sizes = o.rows;
    if (o.scaling)
        for (std::size_t n : o.rows) sizes.push_back(n * 10);

    bool agree = true;
    {
        AuRelation spot = gen::bench_relation(params(o.spot_rows));
        agree = run_op(spot, Engine::Native) == run_op(spot, Engine::Reference);
    }

    std::ostringstream csv;
    csv << "op,rows,uncertainty,range,engine,seconds\n";
    std::map<std::size_t, double> native_time;
    for (std::size_t n : sizes) {
        AuRelation r = gen::bench_relation(params(n));
        for (Engine e : {Engine::Native, Engine::Reference}) {
            if (e == Engine::Reference && n > o.reference_limit) continue;
            double t = timed([&] { run_op(r, e); });
            if (e == Engine::Native) native_time[n] = t;
            csv << o.op << ',' << n << ',' << Scalar::format_real(o.uncertainty) << ',' << o.range << ','
                << (e == Engine::Native ? "native" : "reference") << ',' << t << '\n';
        }
    }
    emit(o.output, [&](std::ostream& os) { os << csv.str(); });
    if (o.scaling)
        for (std::size_t n : o.rows)
            std::cerr << "scaling " << n << " -> " << n * 10 << ": x" << native_time[n * 10] / native_time[n] << '\n';
    std::cerr << "spot check (" << o.spot_rows << " rows): " << (agree ? "engines agree" : "ENGINES DISAGREE") << '\n';
    return agree ? kOk : kViolation;
}

int fuzz(std::uint64_t seed, int rounds) {
    FuzzSummary s = preservation_fuzz(seed, rounds);
    std::cout << s.instances << " instances, " << s.failed << " failing\n";
    if (!s.first_failure.empty()) std::cout << "first failure: " << s.first_failure << '\n';
    return s.failed == 0 ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-annotated query evaluation over uncertain relations"};
    app.require_subcommand(1);

    RunOpts ro;
    auto* run_cmd = app.add_subcommand("run", "Evaluate a plan over CSV relations");
    run_cmd->add_option("plan", ro.plan, "Plan JSON file")->required();
    run_cmd->add_option("inputs", ro.inputs, "Relations as NAME=FILE.csv (or FILE.csv, named by its stem)");
    run_cmd->add_option("--engine", ro.engine)->check(CLI::IsMember({"reference", "native"}));
    run_cmd->add_option("-o,--output", ro.output, "Result CSV (default stdout)");

    CheckOpts co;
    auto* check_cmd = app.add_subcommand("check", "Check bound preservation of a plan against every world of a spec");
    check_cmd->add_option("spec", co.spec, "Spec JSON file")->required();
    check_cmd->add_option("plan", co.plan, "Plan JSON file")->required();
    check_cmd->add_option("--engine", co.engine)->check(CLI::IsMember({"reference", "native"}));
    check_cmd->add_option("--world-cap", co.world_cap, "Maximum number of worlds to enumerate");
    check_cmd->add_option("--anchor", co.anchor, "Attributes identifying a result row for tight bounds");
    check_cmd->add_option("--value", co.value, "Numeric result attribute to report tight bounds for");
    check_cmd->add_flag("--corrupt", co.corrupt, "Collapse the AU result to its selected guess before checking");
    check_cmd->add_option("-o,--output", co.output, "Write the AU result CSV");

    BenchOpts bo;
    auto* bench_cmd = app.add_subcommand("bench", "Time the engines on synthetic data");
    bench_cmd->add_option("--op", bo.op)->check(CLI::IsMember({"sort", "topk", "window"}));
    bench_cmd->add_option("--rows", bo.rows, "Row counts")->delimiter(',');
    bench_cmd->add_option("--uncertainty", bo.uncertainty, "Fraction of uncertain rows");
    bench_cmd->add_option("--range", bo.range, "Maximum width of an uncertain attribute");
    bench_cmd->add_option("--k", bo.k, "k for topk");
    bench_cmd->add_option("--frame", bo.frame, "Window frame N, rows [-N, 0]");
    bench_cmd->add_option("--seed", bo.seed);
    bench_cmd->add_option("--reference-limit", bo.reference_limit, "Largest row count timed with the reference engine");
    bench_cmd->add_option("--spot-rows", bo.spot_rows, "Rows of the engine agreement spot check");
    bench_cmd->add_flag("--scaling", bo.scaling, "Also time 10x each row count and report the ratio");
    bench_cmd->add_option("-o,--output", bo.output, "Timing CSV (default stdout)");

    std::uint64_t fuzz_seed = 1;
    int rounds = 1;
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Bound preservation fuzz over random specs");
    fuzz_cmd->add_option("--seed", fuzz_seed);
    fuzz_cmd->add_option("--rounds", rounds, "Multiplier on the instances per plan")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kInputError;
    }

    try {
        if (*run_cmd) return run(ro);
        if (*check_cmd) return check(co);
        if (*bench_cmd) return bench(bo);
        if (*fuzz_cmd) return fuzz(fuzz_seed, rounds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kOk;
}
