// acceptance gate: one pass/fail line per criterion, nonzero exit on failure
#include <chrono>
#include <iostream>

#include "tlab/verify.hpp"

using namespace tlab;

namespace {

int failures = 0;

double run_ms(const std::function<bool()>& f, bool& ok) {
    auto start = std::chrono::steady_clock::now();
    ok = f();
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count();
}

void report(int criterion, const std::string& what, bool pass) {
    if (!pass) ++failures;
    std::cout << "criterion " << criterion << " (" << what << "): " << (pass ? "PASS" : "FAIL")
              << "\n";
}

void report_timed(int criterion, const std::string& what, bool pass, double ms, double budget_ms) {
    bool ok = pass && ms < budget_ms;
    if (!ok) ++failures;
    std::cout << "criterion " << criterion << " (" << what << "): " << (ok ? "PASS" : "FAIL")
              << "  [" << int(ms) << " ms, budget " << int(budget_ms) << " ms"
              << (pass ? "" : ", checks failed") << "]\n";
}

}  // namespace

int main() {
    json checks = json::array();
    bool ok = false;
    double ms;

    ms = run_ms([&] { return verify::normal_forms(1, checks); }, ok);
    report_timed(1, "HNF/SNF on 1000 random matrices", ok, ms, 10000);

    ms = run_ms([&] { return verify::eventual_image_checks(1, checks); }, ok);
    report_timed(2, "eventual_image on stabilizing samples and diag(2,1)", ok, ms, 30000);

    report(3, "tower invariants: xp, reduce(identity), sum splitting",
           verify::tower_checks(16, checks));

    report(4, "fishbone closed form at lengths 2 and 3", verify::fishbone_checks(12, checks));

    report(5, "index tree ranks and linearization", verify::index_tree_checks(checks));

    ms = run_ms([&] { return verify::game_rank_checks(1, checks); }, ok);
    report_timed(6, "game/tree rank equivalence on 100 random trees", ok, ms, 20000);

    report(7, "Ext invariants: Z[1/p], split colimit, Xi(tau)",
           verify::ext_basic_checks(1, 16, checks));

    report(8, "gap module: tree length 2, projective length 1",
           verify::gap_module_checks(1, 16, checks));

    report(9, "sigma/partial consistency to depth 10", verify::sigma_checks(1, 10, checks));

    bool deterministic = true;
    for (const std::string& name : verify::suite_names()) {
        auto a = verify::run_suite(name, 7, 12);
        auto b = verify::run_suite(name, 7, 12);
        deterministic = deterministic && a.report.dump() == b.report.dump() && a.pass;
    }
    report(10, "verify suites re-run byte-identically", deterministic);

    if (failures) std::cout << failures << " criteria failed\n";
    return failures ? 1 : 0;
}
