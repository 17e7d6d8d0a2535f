#include "cycletab/engine.hpp"

#include "cycletab/canonical.hpp"
#include "cycletab/errors.hpp"
#include "cycletab/rational_ops.hpp"
#include "cycletab/reader.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace cycletab {

namespace {

struct StepLimitReached {};
struct DeadlineReached {};

enum class Bi : std::uint8_t {
    conj, disj, ite, soft, neg, true_, fail, cut,
    unify, not_unify, eq, neq, univ, acyclic, cyclic, canonical,
    is, lt, gt, le, ge, ar_eq, ar_ne,
};

std::uint64_t key(SymbolId s, std::uint32_t arity)
{
    return (std::uint64_t{s} << 8) | arity;
}

} // namespace

struct Engine::Builtins {
    std::unordered_map<std::uint64_t, Bi> table;
    SymbolId comma, ite, soft, true_, plus, minus, times, intdiv, mod, abs, min, max;

    explicit Builtins(CellStore &s)
    {
        auto add = [&](const char *n, std::uint32_t a, Bi b) { table.emplace(key(s.intern(n), a), b); };
        add(",", 2, Bi::conj);
        add(";", 2, Bi::disj);
        add("->", 2, Bi::ite);
        add("*->", 2, Bi::soft);
        add("\\+", 1, Bi::neg);
        add("true", 0, Bi::true_);
        add("fail", 0, Bi::fail);
        add("false", 0, Bi::fail);
        add("!", 0, Bi::cut);
        add("=", 2, Bi::unify);
        add("\\=", 2, Bi::not_unify);
        add("==", 2, Bi::eq);
        add("\\==", 2, Bi::neq);
        add("=..", 2, Bi::univ);
        add("acyclic_term", 1, Bi::acyclic);
        add("cyclic_term", 1, Bi::cyclic);
        add("canonical_term", 2, Bi::canonical);
        add("is", 2, Bi::is);
        add("<", 2, Bi::lt);
        add(">", 2, Bi::gt);
        add("=<", 2, Bi::le);
        add(">=", 2, Bi::ge);
        add("=:=", 2, Bi::ar_eq);
        add("=\\=", 2, Bi::ar_ne);
        comma = s.intern(",");
        ite = s.intern("->");
        soft = s.intern("*->");
        true_ = s.intern("true");
        plus = s.intern("+");
        minus = s.intern("-");
        times = s.intern("*");
        intdiv = s.intern("//");
        mod = s.intern("mod");
        abs = s.intern("abs");
        min = s.intern("min");
        max = s.intern("max");
    }
};

// One resolution machine. Continuations are frames in an arena linked by
// index; choice points record the arena height and a store mark.
class Solver {
public:
    Solver(Engine &e, CellRef goal, bool clauses_only)
        : e_(e), s_(e.store_), t_(e.trail_), b_(*e.builtins_)
    {
        cont_ = push(clauses_only ? Op::call_clauses : Op::call, goal, 0, done);
    }

    bool next()
    {
        if (started_ && !backtrack())
            return false;
        started_ = true;
        return run();
    }

private:
    static constexpr std::uint32_t done = ~std::uint32_t{0};

    enum class Op : std::uint8_t { call, call_clauses, cut_to, soft_commit };
    struct Frame {
        Op op;
        CellRef goal;
        std::uint32_t barrier;
        std::uint32_t next;
    };
    enum class CpKind : std::uint8_t { clauses, alternative, answers };
    struct ChoicePoint {
        CpKind kind;
        bool disabled = false;
        Mark mark;
        std::size_t frames;
        std::uint32_t cont;
        CellRef goal;             // clauses: the call; alternative: goal or none
        std::uint32_t barrier = 0;
        Predicate *pred = nullptr;
        std::size_t next = 0;     // clause or answer index
        SubgoalFrame *frame = nullptr;
        SubstitutionFactor sf;
    };

    Engine &e_;
    CellStore &s_;
    Trail &t_;
    Engine::Builtins &b_;
    std::vector<Frame> frames_;
    std::vector<ChoicePoint> cps_;
    std::uint32_t cont_ = done;
    bool started_ = false;

    std::uint32_t push(Op op, CellRef goal, std::uint32_t barrier, std::uint32_t next)
    {
        frames_.push_back({op, goal, barrier, next});
        return static_cast<std::uint32_t>(frames_.size() - 1);
    }

    std::uint32_t height() const { return static_cast<std::uint32_t>(cps_.size()); }

    ChoicePoint &new_cp(CpKind kind)
    {
        ChoicePoint cp;
        cp.kind = kind;
        cp.mark = s_.mark(t_);
        cp.frames = frames_.size();
        cp.cont = cont_;
        cps_.push_back(std::move(cp));
        return cps_.back();
    }

    void cut(std::uint32_t barrier)
    {
        if (barrier < cps_.size())
            cps_.resize(barrier);
    }

    bool run()
    {
        while (cont_ != done) {
            auto f = frames_[cont_];
            cont_ = f.next;
            bool ok = true;
            switch (f.op) {
            case Op::call:
                ok = step(f.goal, f.barrier);
                break;
            case Op::call_clauses:
                ok = resolve(s_.deref(f.goal), false);
                break;
            case Op::cut_to:
                cut(f.barrier);
                break;
            case Op::soft_commit:
                if (f.barrier < cps_.size())
                    cps_[f.barrier].disabled = true;
                break;
            }
            if (!ok && !backtrack())
                return false;
        }
        return true;
    }

    bool backtrack()
    {
        while (!cps_.empty()) {
            if (cps_.back().disabled) {
                cps_.pop_back();
                continue;
            }
            s_.undo_to(t_, cps_.back().mark);
            frames_.resize(cps_.back().frames);
            if (resume())
                return true;
        }
        return false;
    }

    // Tries the next alternative of the top choice point. Pops it once it
    // has none left; a false return leaves the stack ready for another
    // backtrack round.
    bool resume()
    {
        auto &cp = cps_.back();
        switch (cp.kind) {
        case CpKind::alternative: {
            auto goal = cp.goal;
            auto barrier = cp.barrier;
            auto cont = cp.cont;
            cps_.pop_back();
            cont_ = goal.valid() ? push(Op::call, goal, barrier, cont) : cont;
            return true;
        }
        case CpKind::clauses:
            return resume_clauses();
        case CpKind::answers:
            return resume_answers();
        }
        return false;
    }

    static bool may_match(const ArgKey &k, const CellStore &s, CellRef arg)
    {
        if (!k.bound)
            return true;
        auto a = s.deref(arg);
        auto kind = s.kind(a);
        if (kind == CellKind::Var)
            return true;
        if (kind != k.kind)
            return false;
        switch (kind) {
        case CellKind::Atom:
        case CellKind::Int:
            return s.cell(a).value == k.value;
        case CellKind::Compound:
            return s.symbol(a) == static_cast<SymbolId>(k.value) && s.arity(a) == k.arity;
        default:
            return true;
        }
    }

    std::size_t next_candidate(const Predicate &p, CellRef goal, std::size_t from) const
    {
        bool has_arg = p.arity > 0;
        CellRef first = has_arg ? s_.child(goal, 0) : CellRef{};
        for (auto i = from; i < p.clauses.size(); ++i)
            if (!has_arg || may_match(p.clauses[i].first_arg, s_, first))
                return i;
        return p.clauses.size();
    }

    bool resume_clauses()
    {
        e_.tick();
        auto &cp = cps_.back();
        auto *pred = cp.pred;
        auto goal = cp.goal;
        auto i = next_candidate(*pred, goal, cp.next);
        if (i >= pred->clauses.size()) {
            cps_.pop_back();
            return false;
        }
        auto j = next_candidate(*pred, goal, i + 1);
        auto barrier = height() - 1;
        auto cont = cp.cont;
        if (j >= pred->clauses.size())
            cps_.pop_back();
        else
            cp.next = j;
        const auto &clause = pred->clauses[i];
        std::vector<CellRef> vars(clause.var_count);
        auto head = clause.head.instantiate(s_, vars);
        if (!unify(s_, t_, head, goal))
            return false;
        auto body = clause.body.instantiate(s_, vars);
        if (s_.is_atom(body, b_.true_))
            cont_ = cont;
        else
            cont_ = push(Op::call, body, barrier, cont);
        return true;
    }

    bool resume_answers()
    {
        e_.tick();
        auto &cp = cps_.back();
        auto *f = cp.frame;
        if (cp.next >= f->answer_leaves.size()) {
            cps_.pop_back();
            return false;
        }
        auto leaf = f->answer_leaves[cp.next++];
        auto cont = cp.cont;
        auto sf = cp.sf;
        if (cp.next >= f->answer_leaves.size() && f->status == FrameStatus::complete)
            cps_.pop_back();
        auto terms = e_.tables_.reconstruct(leaf, s_, t_);
        for (std::size_t k = 0; k < sf.size(); ++k)
            if (!unify(s_, t_, sf[k], terms[k]))
                return false;
        cont_ = cont;
        return true;
    }

    bool resolve(CellRef goal, bool tabled_dispatch)
    {
        SymbolId name;
        std::uint32_t arity;
        if (s_.kind(goal) == CellKind::Atom) {
            name = s_.symbol(goal);
            arity = 0;
        } else if (s_.kind(goal) == CellKind::Compound) {
            name = s_.symbol(goal);
            arity = s_.arity(goal);
        } else if (s_.kind(goal) == CellKind::Pair) {
            name = s_.dot_symbol();
            arity = 2;
        } else {
            throw PrologError(PrologError::Kind::type, "callable expected, got " + format_term(s_, goal));
        }
        auto *pred = e_.program_.find(name, arity);
        if (!pred)
            throw PrologError(PrologError::Kind::existence,
                              "unknown procedure " + s_.symbol_name(name) + "/" + std::to_string(arity));
        pred->called = true;
        if (tabled_dispatch && pred->mode != TablingMode::plain)
            return tabled_call(*pred, goal);
        auto &cp = new_cp(CpKind::clauses);
        cp.goal = goal;
        cp.pred = pred;
        return false;
    }

    bool tabled_call(Predicate &pred, CellRef goal)
    {
        e_.tick();
        std::vector<CellRef> args;
        for (std::uint32_t i = 0; i < pred.arity; ++i)
            args.push_back(s_.child(goal, i));
        auto call = goal;
        if (e_.options_.canonical_subgoals && pred.arity > 0) {
            for (auto &a : args)
                a = canonical_term(s_, t_, a);
            call = s_.new_compound(pred.name, args);
        }
        auto lookup = e_.tables_.subgoal_check_insert(e_.tables_.entry(pred.id), args, s_);
        auto *f = lookup.frame;
        if (f->status != FrameStatus::complete) {
            if (auto a = e_.active_index(f)) {
                e_.depend(*a);
                if (pred.mode == TablingMode::tabled_coinductive)
                    return coinductive_success(*a, lookup.factor);
            } else if (auto owner = e_.pass_owner(f->stamp)) {
                e_.depend(*owner);
            } else {
                e_.evaluate(*f, call, lookup.factor);
            }
        }
        auto &cp = new_cp(CpKind::answers);
        cp.frame = f;
        cp.sf = std::move(lookup.factor);
        return false;
    }

    // A call variant to a running coinductive generator succeeds by taking
    // the generator's bindings; the resulting (possibly rational) terms are
    // recorded as an answer of that generator.
    bool coinductive_success(std::size_t a, const SubstitutionFactor &sf)
    {
        auto &gen = e_.active_[a];
        auto m = s_.mark(t_);
        for (std::size_t k = 0; k < sf.size(); ++k) {
            if (!unify(s_, t_, sf[k], gen.sf[k])) {
                s_.undo_to(t_, m);
                return false;
            }
        }
        e_.tables_.answer_check_insert(*gen.frame, e_.answer_terms(gen.sf), s_);
        return true;
    }

    bool is_tabled_goal(CellRef g) const
    {
        g = s_.deref(g);
        auto k = s_.kind(g);
        if (k != CellKind::Atom && k != CellKind::Compound)
            return false;
        auto *p = e_.program_.find(s_.symbol(g), s_.arity(g));
        return p && p->mode != TablingMode::plain;
    }

    std::int64_t eval(CellRef t, int depth = 0)
    {
        if (depth > 10000)
            throw PrologError(PrologError::Kind::type, "arithmetic expression too deep or cyclic");
        t = s_.deref(t);
        switch (s_.kind(t)) {
        case CellKind::Var:
            throw PrologError(PrologError::Kind::instantiation, "arithmetic on an unbound variable");
        case CellKind::Int:
            return s_.int_value(t);
        case CellKind::Compound: {
            auto f = s_.symbol(t);
            if (s_.arity(t) == 1) {
                auto x = eval(s_.arg(t, 0), depth + 1);
                if (f == b_.minus)
                    return -x;
                if (f == b_.plus)
                    return x;
                if (f == b_.abs)
                    return x < 0 ? -x : x;
            } else if (s_.arity(t) == 2) {
                auto x = eval(s_.arg(t, 0), depth + 1);
                auto y = eval(s_.arg(t, 1), depth + 1);
                if (f == b_.plus)
                    return x + y;
                if (f == b_.minus)
                    return x - y;
                if (f == b_.times)
                    return x * y;
                if (f == b_.min)
                    return std::min(x, y);
                if (f == b_.max)
                    return std::max(x, y);
                if (f == b_.intdiv || f == b_.mod) {
                    if (y == 0)
                        throw PrologError(PrologError::Kind::evaluation, "division by zero");
                    if (f == b_.intdiv)
                        return x / y;
                    auto r = x % y;
                    return (r != 0 && ((r < 0) != (y < 0))) ? r + y : r;
                }
            }
            break;
        }
        default:
            break;
        }
        throw PrologError(PrologError::Kind::type, "not evaluable: " + format_term(s_, t));
    }

    bool univ_builtin(CellRef lhs, CellRef rhs)
    {
        lhs = s_.deref(lhs);
        if (!s_.is_unbound(lhs)) {
            auto parts = univ(s_, lhs);
            return unify(s_, t_, rhs, s_.make_list(parts));
        }
        std::vector<CellRef> parts;
        std::unordered_set<CellRef, CellRefHash> seen;
        auto l = s_.deref(rhs);
        while (s_.kind(l) == CellKind::Pair) {
            if (!seen.insert(l).second)
                throw PrologError(PrologError::Kind::type, "=.. needs a proper list");
            parts.push_back(s_.deref(s_.head(l)));
            l = s_.deref(s_.tail(l));
        }
        if (s_.is_unbound(l))
            throw PrologError(PrologError::Kind::instantiation, "=.. with a partial list");
        if (!s_.is_nil(l) || parts.empty())
            throw PrologError(PrologError::Kind::type, "=.. needs a non-empty proper list");
        if (s_.is_unbound(parts[0]))
            throw PrologError(PrologError::Kind::instantiation, "=.. with an unbound functor");
        if (parts.size() > 1 && s_.kind(parts[0]) != CellKind::Atom)
            throw PrologError(PrologError::Kind::type, "=.. functor must be an atom");
        return unify(s_, t_, lhs, univ_inverse(s_, parts));
    }

    bool step(CellRef goal, std::uint32_t barrier)
    {
        auto g = s_.deref(goal);
        auto kind = s_.kind(g);
        if (kind == CellKind::Var)
            throw PrologError(PrologError::Kind::instantiation, "goal is an unbound variable");
        if (kind != CellKind::Atom && kind != CellKind::Compound)
            return resolve(g, true);
        auto it = b_.table.find(key(s_.symbol(g), s_.arity(g)));
        if (it == b_.table.end())
            return resolve(g, true);
        auto arg = [&](std::uint32_t i) { return s_.arg(g, i); };
        switch (it->second) {
        case Bi::conj: {
            auto rest = push(Op::call, arg(1), barrier, cont_);
            cont_ = push(Op::call, arg(0), barrier, rest);
            return true;
        }
        case Bi::disj: {
            auto left = s_.deref(arg(0));
            bool is_ite = s_.kind(left) == CellKind::Compound && s_.arity(left) == 2 &&
                          (s_.symbol(left) == b_.ite || s_.symbol(left) == b_.soft);
            if (is_ite)
                return if_then_else(s_.arg(left, 0), s_.arg(left, 1), arg(1), barrier,
                                    s_.symbol(left) == b_.soft);
            auto &cp = new_cp(CpKind::alternative);
            cp.goal = arg(1);
            cp.barrier = barrier;
            cont_ = push(Op::call, left, barrier, cont_);
            return true;
        }
        case Bi::ite:
            return if_then_else(arg(0), arg(1), s_.new_atom("fail"), barrier, false);
        case Bi::soft: {
            auto rest = push(Op::call, arg(1), barrier, cont_);
            cont_ = push(Op::call, arg(0), height(), rest);
            return true;
        }
        case Bi::neg: {
            if (is_tabled_goal(arg(0)))
                throw PrologError(PrologError::Kind::permission,
                                  "negation of a tabled goal is not supported");
            auto b = height();
            auto &cp = new_cp(CpKind::alternative);
            cp.goal = CellRef{};
            auto fail = push(Op::call, s_.new_atom("fail"), 0, done);
            auto commit = push(Op::cut_to, CellRef{}, b, fail);
            cont_ = push(Op::call, arg(0), height(), commit);
            return true;
        }
        case Bi::true_:
            return true;
        case Bi::fail:
            return false;
        case Bi::cut:
            cut(barrier);
            return true;
        case Bi::unify:
            return unify(s_, t_, arg(0), arg(1));
        case Bi::not_unify: {
            auto m = s_.mark(t_);
            bool ok = unify(s_, t_, arg(0), arg(1));
            s_.undo_to(t_, m);
            return !ok;
        }
        case Bi::eq:
            return struct_equal(s_, arg(0), arg(1));
        case Bi::neq:
            return !struct_equal(s_, arg(0), arg(1));
        case Bi::univ:
            return univ_builtin(arg(0), arg(1));
        case Bi::acyclic:
            return is_acyclic(s_, arg(0));
        case Bi::cyclic:
            return !is_acyclic(s_, arg(0));
        case Bi::canonical:
            return unify(s_, t_, arg(1), canonical_term(s_, t_, arg(0)));
        case Bi::is:
            return unify(s_, t_, arg(0), s_.new_int(eval(arg(1))));
        case Bi::lt:
            return eval(arg(0)) < eval(arg(1));
        case Bi::gt:
            return eval(arg(0)) > eval(arg(1));
        case Bi::le:
            return eval(arg(0)) <= eval(arg(1));
        case Bi::ge:
            return eval(arg(0)) >= eval(arg(1));
        case Bi::ar_eq:
            return eval(arg(0)) == eval(arg(1));
        case Bi::ar_ne:
            return eval(arg(0)) != eval(arg(1));
        }
        return false;
    }

    // (C -> T ; E) commits to the first solution of C; (C *-> T ; E) keeps
    // all solutions of C and only drops E.
    bool if_then_else(CellRef c, CellRef then, CellRef otherwise, std::uint32_t barrier, bool soft)
    {
        auto b = height();
        auto &cp = new_cp(CpKind::alternative);
        cp.goal = otherwise;
        cp.barrier = barrier;
        auto t = push(Op::call, then, barrier, cont_);
        auto commit = push(soft ? Op::soft_commit : Op::cut_to, CellRef{}, b, t);
        cont_ = push(Op::call, c, height(), commit);
        return true;
    }
};

Engine::Engine(EngineOptions options)
    : options_(options), program_(store_), builtins_(std::make_unique<Builtins>(store_))
{
}

Engine::~Engine() = default;

void Engine::consult(std::string_view text)
{
    program_.consult(text);
}

void Engine::tick()
{
    ++steps_;
    if (steps_ > options_.max_steps)
        throw StepLimitReached{};
    if (options_.deadline && (steps_ & 1023) == 0 &&
        std::chrono::steady_clock::now() > *options_.deadline)
        throw DeadlineReached{};
}

std::optional<std::size_t> Engine::active_index(const SubgoalFrame *f) const
{
    if (!f->active)
        return std::nullopt;
    for (std::size_t i = active_.size(); i > 0; --i)
        if (active_[i - 1].frame == f)
            return i - 1;
    return std::nullopt;
}

std::optional<std::size_t> Engine::pass_owner(std::uint64_t stamp) const
{
    if (stamp == 0)
        return std::nullopt;
    for (std::size_t i = 0; i < active_.size(); ++i)
        if (active_[i].token == stamp)
            return i;
    return std::nullopt;
}

void Engine::depend(std::size_t generator)
{
    if (!active_.empty())
        active_.back().dep = std::min(active_.back().dep, generator);
}

std::vector<CellRef> Engine::answer_terms(const SubstitutionFactor &sf)
{
    std::vector<CellRef> terms(sf.size());
    for (std::size_t k = 0; k < sf.size(); ++k) {
        terms[k] = store_.deref(sf[k]);
        if (options_.canonical_answers && !is_acyclic(store_, terms[k]))
            terms[k] = canonical_term(store_, trail_, terms[k]);
    }
    return terms;
}

void Engine::evaluate(SubgoalFrame &frame, CellRef goal, const SubstitutionFactor &sf)
{
    if (active_.size() >= options_.max_nesting)
        throw PrologError(PrologError::Kind::resource, "tabled evaluation nested too deeply");

    if (frame.on_completion_stack)
        completion_.erase(std::find(completion_.begin(), completion_.end(), &frame));
    completion_.push_back(&frame);
    frame.on_completion_stack = true;

    auto idx = active_.size();
    active_.push_back({&frame, 0, idx, sf});
    frame.active = true;
    struct Guard {
        Engine &e;
        SubgoalFrame &f;
        bool armed = true;
        ~Guard()
        {
            if (armed) {
                e.active_.pop_back();
                f.active = false;
            }
        }
    } guard{*this, frame};

    auto m = store_.mark(trail_);
    while (true) {
        auto before = tables_.answer_count();
        active_[idx].token = ++next_token_;
        frame.stamp = active_[idx].token;
        {
            Solver pass(*this, goal, true);
            while (pass.next())
                tables_.answer_check_insert(frame, answer_terms(sf), store_);
        }
        store_.undo_to(trail_, m);
        if (active_[idx].dep < idx || tables_.answer_count() == before)
            break;
    }

    auto dep = active_[idx].dep;
    guard.armed = false;
    active_.pop_back();
    frame.active = false;

    auto pos = static_cast<std::size_t>(
        std::find(completion_.begin(), completion_.end(), &frame) - completion_.begin());
    if (dep >= idx) {
        for (auto k = pos; k < completion_.size(); ++k) {
            completion_[k]->status = FrameStatus::complete;
            completion_[k]->on_completion_stack = false;
        }
        completion_.resize(pos);
    } else {
        auto &parent = active_.back();
        for (auto k = pos; k < completion_.size(); ++k)
            completion_[k]->stamp = parent.token;
        parent.dep = std::min(parent.dep, dep);
    }
}

std::unique_ptr<Query> Engine::query(std::string_view text)
{
    auto q = parse_query(text);
    auto m = store_.mark(trail_);
    VarBindings vars;
    CellRef goal;
    for (auto it = q.goals.rbegin(); it != q.goals.rend(); ++it) {
        auto g = build_term(store_, *it, vars);
        goal = goal.valid() ? store_.new_compound(builtins_->comma, std::vector<CellRef>{g, goal}) : g;
    }
    if (!goal.valid())
        goal = store_.new_atom(builtins_->true_);
    std::vector<NamedBinding> bindings;
    for (const auto &name : q.variables)
        if (!name.empty() && name[0] != '_')
            bindings.emplace_back(name, vars.at(name));
    steps_ = 0;
    return std::unique_ptr<Query>(new Query(*this, goal, std::move(bindings), m));
}

Query::Query(Engine &engine, CellRef goal, std::vector<NamedBinding> bindings, Mark mark)
    : engine_(engine), solver_(std::make_unique<Solver>(engine, goal, false)),
      bindings_(std::move(bindings)), mark_(mark)
{
}

Query::~Query()
{
    solver_.reset();
    auto &s = engine_.store_;
    if (mark_.cells <= s.size() && mark_.trail <= engine_.trail_.size())
        s.undo_to(engine_.trail_, mark_);
}

SolveStatus Query::next()
{
    if (finished_)
        return last_;
    try {
        if (solver_->next()) {
            ++answers_;
            return SolveStatus::answer;
        }
        last_ = SolveStatus::exhausted;
    } catch (const StepLimitReached &) {
        last_ = SolveStatus::truncated;
    } catch (const DeadlineReached &) {
        last_ = SolveStatus::timeout;
    } catch (...) {
        finished_ = true;
        throw;
    }
    finished_ = true;
    return last_;
}

AnswerText Query::answer_text() const
{
    return print_answer(engine_.store_, bindings_);
}

} // namespace cycletab
