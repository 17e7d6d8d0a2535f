#include "cycletab/bench.hpp"

#include "cycletab/engine.hpp"

#include <chrono>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cycletab {

BenchMode parse_bench_mode(std::string_view name)
{
    if (name == "coslg")
        return BenchMode::coslg;
    if (name == "cosld")
        return BenchMode::cosld;
    if (name == "tabled-cosld")
        return BenchMode::tabled_cosld;
    throw std::invalid_argument("unknown bench mode: " + std::string(name));
}

std::string bench_mode_name(BenchMode mode)
{
    switch (mode) {
    case BenchMode::coslg:
        return "coslg";
    case BenchMode::cosld:
        return "cosld";
    case BenchMode::tabled_cosld:
        return "tabled-cosld";
    }
    return "?";
}

std::string bench_program(BenchMode mode, int n)
{
    std::ostringstream p;
    switch (mode) {
    case BenchMode::coslg:
        p << ":- table(path/2).\n:- tabling_mode(path/2, coinductive).\n";
        break;
    case BenchMode::cosld:
        p << ":- coinductive(path/2).\n";
        break;
    case BenchMode::tabled_cosld:
        p << ":- coinductive(path/2).\n:- table(path/3).\n";
        break;
    }
    p << "path(F, [F|P]) :- edge(F, N), path(N, P).\n"
      << "full_edge_size(" << n << ").\n"
      << "edge(X, Y) :- posint(X), posint(Y), X \\== Y.\n"
      << "posint(N) :- posint(N, 0).\n"
      << "posint(_, I) :- full_edge_size(N), I > N, !, fail.\n"
      << "posint(I, I).\n"
      << "posint(X, I) :- NI is I + 1, posint(X, NI).\n";
    return p.str();
}

nlohmann::json BenchRow::to_json() const
{
    return {{"mode", bench_mode_name(mode)}, {"n", n},           {"seconds", seconds},
            {"answers", answers},            {"table_nodes", table_nodes},
            {"timeout", timeout}};
}

std::string BenchRow::to_text() const
{
    std::ostringstream out;
    out << bench_mode_name(mode) << " n=" << n << ' ';
    if (timeout)
        out << "timeout";
    else
        out << seconds << "s";
    out << " answers=" << answers << " table_nodes=" << table_nodes;
    if (truncated)
        out << " truncated";
    return out.str();
}

BenchRow run_bench(BenchMode mode, int n, double timeout_seconds)
{
    if (n < 2)
        throw std::invalid_argument("bench needs n >= 2");
    EngineOptions opts;
    opts.max_steps = std::numeric_limits<std::uint64_t>::max();
    opts.max_nesting = 100000;
    auto start = std::chrono::steady_clock::now();
    opts.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                std::chrono::duration<double>(timeout_seconds));
    Engine engine(opts);
    engine.consult(bench_program(mode, n));

    BenchRow row;
    row.mode = mode;
    row.n = n;
    auto q = engine.query("path(1, P)");
    SolveStatus status;
    while ((status = q->next()) == SolveStatus::answer)
        ++row.answers;
    row.timeout = status == SolveStatus::timeout;
    row.truncated = status == SolveStatus::truncated;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.table_nodes = engine.tables().node_count();
    return row;
}

} // namespace cycletab
