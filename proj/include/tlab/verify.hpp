#pragma once

#include <cstdint>

#include "tlab/json_io.hpp"

namespace tlab::verify {

// Each check group appends {"name", "pass", "evidence"} entries to `checks`
// and returns whether all of its checks passed.  Everything is deterministic
// for a fixed seed, and the emitted JSON carries no clocks or addresses, so
// identical requests serialize byte-identically.

bool normal_forms(std::uint64_t seed, json& checks);             // 1000 random HNF/SNF
bool eventual_image_checks(std::uint64_t seed, json& checks);    // 200 stabilizing samples
bool ordinal_checks(std::uint64_t seed, json& checks);           // fundamental-sequence rule
bool index_tree_checks(json& checks);                            // symbolic index trees
bool game_rank_checks(std::uint64_t seed, json& checks);         // game/tree rank equivalence
bool tower_checks(int depth, json& checks);                      // derived-tower invariants
bool fishbone_checks(int depth, json& checks);                   // closed-form verification
bool ext_basic_checks(std::uint64_t seed, int depth, json& checks);  // Z[1/p], split, xi
bool gap_module_checks(std::uint64_t seed, int depth, json& checks);
bool xi_checks(std::uint64_t seed, int depth, json& checks);
bool sigma_checks(std::uint64_t seed, int depth, json& checks);

struct SuiteResult {
    json report;
    bool pass = false;
};

const std::vector<std::string>& suite_names();  // linalg ... sigma
SuiteResult run_suite(const std::string& name, std::uint64_t seed, int depth);

}  // namespace tlab::verify
