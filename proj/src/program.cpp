#include "cycletab/program.hpp"

#include "cycletab/errors.hpp"

#include <set>

namespace cycletab {

std::uint32_t TermTemplate::add(const SourceTerm &t, CellStore &store,
                                std::map<std::string, std::uint32_t> &var_index)
{
    Node n{};
    switch (t.kind) {
    case SourceTerm::Kind::Var: {
        auto [it, fresh] = var_index.emplace(t.name, static_cast<std::uint32_t>(var_index.size()));
        n.kind = CellKind::Var;
        n.value = it->second;
        break;
    }
    case SourceTerm::Kind::Atom:
        n.kind = CellKind::Atom;
        n.value = store.intern(t.name);
        break;
    case SourceTerm::Kind::Int:
        n.kind = CellKind::Int;
        n.value = t.value;
        break;
    case SourceTerm::Kind::Compound: {
        std::vector<std::uint32_t> kids;
        kids.reserve(t.args.size());
        for (const auto &a : t.args)
            kids.push_back(add(a, store, var_index));
        n.kind = t.is_compound(".", 2) ? CellKind::Pair : CellKind::Compound;
        n.value = store.intern(t.name);
        n.arity = static_cast<std::uint32_t>(t.args.size());
        n.first_child = static_cast<std::uint32_t>(children_.size());
        children_.insert(children_.end(), kids.begin(), kids.end());
        break;
    }
    }
    nodes_.push_back(n);
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

TermTemplate TermTemplate::compile(const SourceTerm &t, CellStore &store,
                                   std::map<std::string, std::uint32_t> &var_index)
{
    TermTemplate out;
    out.root_ = out.add(t, store, var_index);
    return out;
}

CellRef TermTemplate::build(std::uint32_t n, CellStore &store, std::vector<CellRef> &vars) const
{
    const auto &node = nodes_[n];
    switch (node.kind) {
    case CellKind::Var: {
        auto i = static_cast<std::size_t>(node.value);
        if (vars.size() <= i)
            vars.resize(i + 1);
        if (!vars[i].valid())
            vars[i] = store.new_var();
        return vars[i];
    }
    case CellKind::Atom:
        return store.new_atom(static_cast<SymbolId>(node.value));
    case CellKind::Int:
        return store.new_int(node.value);
    case CellKind::Pair: {
        auto h = build(children_[node.first_child], store, vars);
        auto tl = build(children_[node.first_child + 1], store, vars);
        return store.new_pair(h, tl);
    }
    case CellKind::Compound: {
        std::vector<CellRef> args(node.arity);
        for (std::uint32_t i = 0; i < node.arity; ++i)
            args[i] = build(children_[node.first_child + i], store, vars);
        return store.new_compound(static_cast<SymbolId>(node.value), args);
    }
    }
    return {};
}

CellRef TermTemplate::instantiate(CellStore &store, std::vector<CellRef> &vars) const
{
    return build(root_, store, vars);
}

TermTemplate::Key TermTemplate::first_arg_key() const
{
    const auto &root = nodes_[root_];
    if (root.kind != CellKind::Compound)
        return {};
    const auto &a = nodes_[children_[root.first_child]];
    switch (a.kind) {
    case CellKind::Var:
        return {};
    case CellKind::Atom:
    case CellKind::Int:
        return {true, a.kind, a.value, 0};
    case CellKind::Pair:
        return {true, a.kind, 0, 2};
    case CellKind::Compound:
        return {true, a.kind, a.value, a.arity};
    }
    return {};
}

Predicate *Program::find(SymbolId name, std::uint32_t arity)
{
    auto it = index_.find({name, arity});
    return it == index_.end() ? nullptr : &predicates_[it->second];
}

Predicate &Program::ensure(SymbolId name, std::uint32_t arity)
{
    if (auto *p = find(name, arity))
        return *p;
    Predicate p;
    p.id = static_cast<std::uint32_t>(predicates_.size());
    p.name = name;
    p.arity = arity;
    index_.emplace(std::pair{name, arity}, p.id);
    predicates_.push_back(std::move(p));
    return predicates_.back();
}

void Program::set_mode(SymbolId name, std::uint32_t arity, TablingMode mode)
{
    auto &p = ensure(name, arity);
    if (p.called && p.mode != mode)
        throw PrologError(PrologError::Kind::permission,
                          "tabling mode of " + store_.symbol_name(name) + "/" +
                              std::to_string(arity) + " is fixed after its first call");
    p.mode = mode;
}

namespace {

std::pair<std::string, std::uint32_t> head_key(const SourceTerm &head, int line)
{
    switch (head.kind) {
    case SourceTerm::Kind::Atom:
        return {head.name, 0};
    case SourceTerm::Kind::Compound:
        return {head.name, static_cast<std::uint32_t>(head.args.size())};
    default:
        throw ConsultError("clause head must be an atom or compound term", line);
    }
}

const SourceTerm &clause_head(const SourceTerm &c)
{
    return c.is_compound(":-", 2) ? c.args[0] : c;
}

// Collects name/arity pairs from p/n or a conjunction of them.
void indicators(const SourceTerm &spec, int line,
                std::vector<std::pair<std::string, std::uint32_t>> &out)
{
    if (spec.is_compound(",", 2)) {
        indicators(spec.args[0], line, out);
        indicators(spec.args[1], line, out);
        return;
    }
    if (spec.is_compound("/", 2) && spec.args[0].kind == SourceTerm::Kind::Atom &&
        spec.args[1].kind == SourceTerm::Kind::Int && spec.args[1].value >= 0) {
        out.emplace_back(spec.args[0].name, static_cast<std::uint32_t>(spec.args[1].value));
        return;
    }
    throw ConsultError("expected a predicate indicator Name/Arity", line);
}

SourceTerm rewrite_calls(const SourceTerm &body, const std::string &name, std::uint32_t arity,
                         const std::string &check, const SourceTerm &stack)
{
    static const std::set<std::pair<std::string, std::size_t>> control{
        {",", 2}, {";", 2}, {"->", 2}, {"*->", 2}, {"\\+", 1}};
    if (body.kind == SourceTerm::Kind::Compound && control.count({body.name, body.args.size()})) {
        auto out = body;
        for (auto &a : out.args)
            a = rewrite_calls(a, name, arity, check, stack);
        return out;
    }
    bool self = (arity == 0 && body.is_atom(name)) || body.is_compound(name, arity);
    if (!self)
        return body;
    auto args = body.args;
    args.push_back(stack);
    return SourceTerm::compound(check, std::move(args));
}

SourceTerm with_extra(const std::string &name, std::vector<SourceTerm> args, SourceTerm extra)
{
    args.push_back(std::move(extra));
    return SourceTerm::compound(name, std::move(args));
}

SourceTerm call_term(const std::string &name, const std::vector<SourceTerm> &args)
{
    return args.empty() ? SourceTerm::atom(name) : SourceTerm::compound(name, args);
}

SourceTerm list_cons(SourceTerm h, SourceTerm t)
{
    return SourceTerm::compound(".", {std::move(h), std::move(t)});
}

SourceTerm rule(SourceTerm head, SourceTerm body)
{
    return SourceTerm::compound(":-", {std::move(head), std::move(body)});
}

} // namespace

std::string cosld_check_name(const std::string &name)
{
    return "$cosld_check_" + name;
}

std::vector<SourceClause> transform_coinductive(const std::string &name, std::uint32_t arity,
                                                const std::vector<SourceClause> &clauses)
{
    std::vector<SourceClause> out;
    auto check = cosld_check_name(name);
    std::vector<SourceTerm> xs;
    for (std::uint32_t i = 0; i < arity; ++i)
        xs.push_back(SourceTerm::var("$X" + std::to_string(i)));
    auto stack = SourceTerm::var("$S");
    int line = clauses.empty() ? 0 : clauses.front().line;

    out.push_back({rule(call_term(name, xs), with_extra(name, xs, SourceTerm::atom("[]"))), line});

    for (const auto &c : clauses) {
        const auto &head = clause_head(c.term);
        auto new_head = with_extra(name, head.args, stack);
        if (c.term.is_compound(":-", 2))
            out.push_back({rule(new_head, rewrite_calls(c.term.args[1], name, arity, check, stack)),
                           c.line});
        else
            out.push_back({new_head, c.line});
    }

    auto goal = call_term(name, xs);
    auto member = SourceTerm::compound(cosld_member_name, {goal, stack});
    auto extend = with_extra(name, xs, list_cons(goal, stack));
    auto branch = SourceTerm::compound(
        ";", {SourceTerm::compound("*->", {member, SourceTerm::atom("true")}), extend});
    out.push_back({rule(with_extra(check, xs, stack), branch), line});

    auto e = SourceTerm::var("$E");
    auto t = SourceTerm::var("$T");
    out.push_back({SourceTerm::compound(cosld_member_name,
                                        {e, list_cons(e, SourceTerm::var("_#m1"))}),
                   line});
    out.push_back({rule(SourceTerm::compound(cosld_member_name,
                                             {e, list_cons(SourceTerm::var("_#m2"), t)}),
                        SourceTerm::compound(cosld_member_name, {e, t})),
                   line});
    return out;
}

void Program::add_clause(const SourceTerm &clause, int line)
{
    const auto &head = clause_head(clause);
    auto [name, arity] = head_key(head, line);
    std::map<std::string, std::uint32_t> vars;
    Clause c;
    c.head = TermTemplate::compile(head, store_, vars);
    c.body = TermTemplate::compile(
        clause.is_compound(":-", 2) ? clause.args[1] : SourceTerm::atom("true"), store_, vars);
    c.var_count = static_cast<std::uint32_t>(vars.size());
    c.first_arg = c.head.first_arg_key();
    c.line = line;
    ensure(store_.intern(name), arity).clauses.push_back(std::move(c));
}

void Program::consult(std::string_view text)
{
    auto source = parse_program(text);

    using Key = std::pair<std::string, std::uint32_t>;
    std::vector<std::pair<Key, SourceClause>> clauses;
    std::vector<std::pair<Key, TablingMode>> modes;
    std::vector<Key> cosld;

    for (const auto &c : source.clauses) {
        if (!c.term.is_compound(":-", 1)) {
            clauses.emplace_back(head_key(clause_head(c.term), c.line), c);
            continue;
        }
        const auto &d = c.term.args[0];
        std::vector<Key> keys;
        if (d.is_compound("table", 1)) {
            indicators(d.args[0], c.line, keys);
            for (auto &k : keys)
                modes.emplace_back(k, TablingMode::tabled_inductive);
        } else if (d.is_compound("tabling_mode", 2)) {
            indicators(d.args[0], c.line, keys);
            TablingMode m;
            if (d.args[1].is_atom("coinductive"))
                m = TablingMode::tabled_coinductive;
            else if (d.args[1].is_atom("inductive"))
                m = TablingMode::tabled_inductive;
            else
                throw ConsultError("tabling mode must be inductive or coinductive", c.line);
            for (auto &k : keys)
                modes.emplace_back(k, m);
        } else if (d.is_compound("coinductive", 1)) {
            indicators(d.args[0], c.line, keys);
            cosld.insert(cosld.end(), keys.begin(), keys.end());
        } else {
            throw ConsultError("unknown directive", c.line);
        }
    }

    // A later tabling_mode overrides a plain table directive for the same
    // predicate, whatever their order.
    std::map<Key, TablingMode> final_mode;
    for (auto &[k, m] : modes) {
        auto it = final_mode.find(k);
        if (it == final_mode.end() || m == TablingMode::tabled_coinductive)
            final_mode[k] = m;
    }

    auto *existing = find(store_.intern(cosld_member_name), 2);
    bool have_member = existing && !existing->clauses.empty();
    for (const auto &k : cosld) {
        std::vector<SourceClause> own;
        std::vector<std::pair<Key, SourceClause>> rest;
        for (auto &kc : clauses) {
            if (kc.first == k)
                own.push_back(kc.second);
            else
                rest.push_back(kc);
        }
        auto transformed = transform_coinductive(k.first, k.second, own);
        // The member helper is shared across transformed predicates.
        auto helpers = have_member ? transformed.size() - 2 : transformed.size();
        have_member = true;
        for (std::size_t i = 0; i < helpers; ++i)
            rest.emplace_back(head_key(clause_head(transformed[i].term), transformed[i].line),
                              transformed[i]);
        clauses = std::move(rest);
    }

    for (auto &[k, m] : final_mode)
        set_mode(store_.intern(k.first), k.second, m);
    for (auto &[k, c] : clauses)
        add_clause(c.term, c.line);
}

} // namespace cycletab
