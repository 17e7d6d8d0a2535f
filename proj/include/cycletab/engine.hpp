#pragma once

#include "cycletab/printer.hpp"
#include "cycletab/program.hpp"
#include "cycletab/table_space.hpp"
#include "cycletab/term_store.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace cycletab {

struct EngineOptions {
    // Resolution steps (clause tries and tabled calls) allowed per query.
    std::uint64_t max_steps = 1'000'000;
    // Replace tabled call arguments by their canonical form before lookup.
    bool canonical_subgoals = false;
    // Store cyclic answer terms in canonical form, so that differently
    // shaped representations of one rational term are a single answer.
    bool canonical_answers = true;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // Nested generator evaluations allowed before a resource error.
    std::size_t max_nesting = 2000;
};

enum class SolveStatus { answer, exhausted, truncated, timeout };

class Engine;
class Solver;

// Pull stream over the answers of one query.
class Query {
public:
    ~Query();
    Query(const Query &) = delete;
    Query &operator=(const Query &) = delete;

    // Throws PrologError for runtime errors. After anything but `answer`
    // the stream stays finished.
    SolveStatus next();

    // Query variables (named, non-underscore) and their current values.
    const std::vector<NamedBinding> &bindings() const { return bindings_; }
    AnswerText answer_text() const;
    std::size_t answers() const { return answers_; }

private:
    friend class Engine;
    Query(Engine &engine, CellRef goal, std::vector<NamedBinding> bindings, Mark mark);

    Engine &engine_;
    std::unique_ptr<Solver> solver_;
    std::vector<NamedBinding> bindings_;
    Mark mark_;
    bool finished_ = false;
    SolveStatus last_ = SolveStatus::exhausted;
    std::size_t answers_ = 0;
};

class Engine {
public:
    explicit Engine(EngineOptions options = {});
    ~Engine();
    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    // Throws SyntaxError or ConsultError.
    void consult(std::string_view text);

    // Parses the query and starts a fresh step budget. One query at a time.
    std::unique_ptr<Query> query(std::string_view text);

    EngineOptions &options() { return options_; }
    CellStore &store() { return store_; }
    Trail &trail() { return trail_; }
    TableSpace &tables() { return tables_; }
    Program &program() { return program_; }
    std::uint64_t steps() const { return steps_; }

private:
    friend class Solver;
    friend class Query;

    struct ActiveGenerator {
        SubgoalFrame *frame;
        std::uint64_t token;
        std::size_t dep;
        SubstitutionFactor sf;
    };

    struct Builtins;

    EngineOptions options_;
    CellStore store_;
    Trail trail_;
    TableSpace tables_;
    Program program_;
    std::uint64_t steps_ = 0;
    std::uint64_t next_token_ = 0;
    std::vector<ActiveGenerator> active_;
    std::vector<SubgoalFrame *> completion_;
    std::unique_ptr<Builtins> builtins_;

    void tick();
    std::optional<std::size_t> active_index(const SubgoalFrame *f) const;
    std::optional<std::size_t> pass_owner(std::uint64_t stamp) const;
    void depend(std::size_t generator);
    std::vector<CellRef> answer_terms(const SubstitutionFactor &sf);
    void evaluate(SubgoalFrame &frame, CellRef goal, const SubstitutionFactor &sf);
};

} // namespace cycletab
