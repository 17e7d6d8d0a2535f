#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace cycletab {

enum class BenchMode { coslg, cosld, tabled_cosld };

BenchMode parse_bench_mode(std::string_view name);  // throws std::invalid_argument
std::string bench_mode_name(BenchMode mode);

// The path program over the fully connected graph on nodes 0..n.
std::string bench_program(BenchMode mode, int n);

struct BenchRow {
    BenchMode mode = BenchMode::coslg;
    int n = 0;
    double seconds = 0;
    std::uint64_t answers = 0;
    std::size_t table_nodes = 0;
    bool timeout = false;
    bool truncated = false;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Runs `path(1, P), fail` and counts the answers of path(1, P).
BenchRow run_bench(BenchMode mode, int n, double timeout_seconds);

} // namespace cycletab
