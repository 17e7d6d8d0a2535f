// Command-line driver: run queries against a program file, canonicalize
// term literals, and run the path benchmark.

#include "cycletab/bench.hpp"
#include "cycletab/canonical.hpp"
#include "cycletab/engine.hpp"
#include "cycletab/errors.hpp"
#include "cycletab/printer.hpp"
#include "cycletab/reader.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cycletab;

namespace {

struct RunArgs {
    std::string file;
    std::string query;
    std::size_t max_answers = 0;
    std::uint64_t max_depth = 1'000'000;
    bool canonical_subgoals = false;
    bool json = false;
    bool all = false;
};

int run(const RunArgs &a)
{
    std::ifstream in(a.file);
    if (!in) {
        std::cerr << "cannot read " << a.file << "\n";
        return 1;
    }
    std::stringstream text;
    text << in.rdbuf();

    EngineOptions opts;
    opts.max_steps = a.max_depth;
    opts.canonical_subgoals = a.canonical_subgoals;
    Engine engine(opts);
    std::unique_ptr<Query> q;
    try {
        engine.consult(text.str());
        q = engine.query(a.query);
    } catch (const SyntaxError &e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConsultError &e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    std::size_t limit = a.max_answers ? a.max_answers : (a.all ? 0 : 1);
    nlohmann::json answers = nlohmann::json::array();
    std::string status = "exhausted";
    try {
        while (true) {
            if (limit && q->answers() >= limit) {
                status = "stopped";
                break;
            }
            auto s = q->next();
            if (s == SolveStatus::answer) {
                if (a.json)
                    answers.push_back(answer_json(engine.store(), q->bindings()));
                else
                    std::cout << q->answer_text().text() << (limit == 1 ? "." : " ;") << "\n";
                continue;
            }
            status = s == SolveStatus::truncated ? "truncated"
                     : s == SolveStatus::timeout ? "timeout"
                                                 : "exhausted";
            break;
        }
    } catch (const PrologError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (a.json) {
        std::cout << nlohmann::json{{"answers", answers}, {"status", status}}.dump() << "\n";
        return 0;
    }
    if (status == "truncated" || status == "timeout")
        std::cout << status << ".\n";
    else if (status == "exhausted")
        std::cout << "false.\n";
    return 0;
}

int canon(const std::string &literal)
{
    Engine engine;
    auto &store = engine.store();
    try {
        auto lit = build_literal(store, literal);
        auto c = canonical_term(store, engine.trail(), lit.root);
        if (lit.labels.empty())
            std::cout << format_term(store, c) << "\n";
        else
            std::cout << print_answer(store, {{lit.labels.front().first, c}}).text() << "\n";
    } catch (const SyntaxError &e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const PrologError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"cycletab: tabled logic programming with rational terms"};
    app.require_subcommand(1);

    RunArgs ra;
    auto *run_cmd = app.add_subcommand("run", "Consult a program and run a query");
    run_cmd->add_option("file", ra.file, "Program file")->required();
    run_cmd->add_option("-q,--query", ra.query, "Query text")->required();
    run_cmd->add_option("--max-answers", ra.max_answers, "Stop after N answers");
    run_cmd->add_option("--max-depth", ra.max_depth, "Resolution step limit");
    run_cmd->add_flag("--canonical-subgoals", ra.canonical_subgoals,
                      "Canonicalize tabled call arguments before lookup");
    run_cmd->add_flag("--json", ra.json, "Emit answers as JSON");
    run_cmd->add_flag("--all", ra.all, "Enumerate every answer");

    std::string literal;
    auto *canon_cmd = app.add_subcommand("canon", "Print the canonical form of a term literal");
    canon_cmd->add_option("literal", literal, "Term, optionally as label equations")->required();

    std::string mode = "coslg";
    int n = 8;
    double timeout = 60;
    bool bench_json = false;
    auto *bench_cmd = app.add_subcommand("bench", "Run the fully connected path benchmark");
    bench_cmd->add_option("--mode", mode, "coslg, cosld or tabled-cosld");
    bench_cmd->add_option("--n", n, "Graph size");
    bench_cmd->add_option("--timeout", timeout, "Seconds before reporting a timeout");
    bench_cmd->add_flag("--json", bench_json, "Emit the row as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (*run_cmd)
        return run(ra);
    if (*canon_cmd)
        return canon(literal);
    try {
        auto row = run_bench(parse_bench_mode(mode), n, timeout);
        std::cout << (bench_json ? row.to_json().dump() : row.to_text()) << "\n";
    } catch (const std::invalid_argument &e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
