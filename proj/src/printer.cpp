#include "cycletab/printer.hpp"

#include <cctype>
#include <deque>
#include <unordered_map>
#include <unordered_set>

namespace cycletab {

namespace {

using CellSet = std::unordered_set<CellRef, CellRefHash>;

// Structure cells that are the target of a back edge in a DFS from the
// roots. Every cycle passes through at least one of them.
CellSet cycle_targets(const CellStore &store, const std::vector<CellRef> &roots)
{
    enum class Colour : std::uint8_t { grey, black };
    std::unordered_map<CellRef, Colour, CellRefHash> colour;
    CellSet targets;
    for (auto root : roots) {
        auto r = store.deref(root);
        if (!store.is_structure(r) || colour.count(r))
            continue;
        std::vector<std::pair<CellRef, std::uint32_t>> path{{r, 0}};
        colour[r] = Colour::grey;
        while (!path.empty()) {
            auto &[cell, next] = path.back();
            if (next == store.child_count(cell)) {
                colour[cell] = Colour::black;
                path.pop_back();
                continue;
            }
            auto c = store.deref(store.child(cell, next++));
            if (!store.is_structure(c))
                continue;
            auto it = colour.find(c);
            if (it == colour.end()) {
                colour[c] = Colour::grey;
                path.emplace_back(c, 0);
            } else if (it->second == Colour::grey) {
                targets.insert(c);
            }
        }
    }
    return targets;
}

bool is_solo_or_symbolic(const std::string &s)
{
    if (s == "[]" || s == "!" || s == ";" || s == "{}")
        return true;
    for (char c : s)
        if (std::string_view("+-*/\\^<>=~:.?@#&$").find(c) == std::string_view::npos)
            return false;
    return !s.empty() && s != ".";
}

class Renderer {
public:
    Renderer(const CellStore &store, const std::vector<NamedBinding> &bindings) : store_(store)
    {
        std::vector<CellRef> roots;
        for (const auto &[name, cell] : bindings)
            roots.push_back(cell);
        targets_ = cycle_targets(store, roots);
        for (const auto &[name, cell] : bindings) {
            if (hidden(name))
                continue;
            auto r = store.deref(cell);
            if (store.is_structure(r) && !names_.count(r))
                names_.emplace(r, name);
        }
    }

    static bool hidden(const std::string &name) { return !name.empty() && name[0] == '_'; }

    std::string equation(const std::string &name, CellRef cell)
    {
        return name + " = " + render_root(store_.deref(cell), name);
    }

    // Emits the queued _S equations, including ones discovered while
    // printing earlier ones.
    void flush_aux(std::vector<std::string> &out)
    {
        while (!pending_.empty()) {
            auto cell = pending_.front();
            pending_.pop_front();
            const auto &label = aux_.at(cell);
            out.push_back(label + " = " + render_root(cell, label));
        }
    }

    std::string render_root(CellRef root, const std::string &self)
    {
        root_ = root;
        self_ = self;
        std::string out;
        render(root, true, out);
        return out;
    }

private:
    const CellStore &store_;
    CellSet targets_;
    std::unordered_map<CellRef, std::string, CellRefHash> names_;
    std::unordered_map<CellRef, std::string, CellRefHash> aux_;
    std::unordered_map<CellRef, std::string, CellRefHash> unbound_;
    std::deque<CellRef> pending_;
    CellRef root_;
    std::string self_;

    std::string label(CellRef c)
    {
        if (c == root_)
            return self_;
        if (auto it = names_.find(c); it != names_.end())
            return it->second;
        if (auto it = aux_.find(c); it != aux_.end())
            return it->second;
        auto name = "_S" + std::to_string(aux_.size() + 1);
        aux_.emplace(c, name);
        pending_.push_back(c);
        return name;
    }

    void render(CellRef t, bool top, std::string &out)
    {
        t = store_.deref(t);
        const auto &c = store_.cell(t);
        switch (c.kind) {
        case CellKind::Var: {
            auto it = unbound_.find(t);
            if (it == unbound_.end())
                it = unbound_.emplace(t, "_" + std::to_string(unbound_.size() + 1)).first;
            out += it->second;
            return;
        }
        case CellKind::Int:
            out += std::to_string(c.value);
            return;
        case CellKind::Atom:
            out += quote_atom_if_needed(store_.symbol_name(store_.symbol(t)));
            return;
        case CellKind::Pair:
        case CellKind::Compound:
            break;
        }
        if (targets_.count(t) && !top) {
            out += label(t);
            return;
        }
        if (c.kind == CellKind::Pair) {
            out += '[';
            render(store_.head(t), false, out);
            auto rest = store_.deref(store_.tail(t));
            while (store_.kind(rest) == CellKind::Pair && !targets_.count(rest)) {
                out += ',';
                render(store_.head(rest), false, out);
                rest = store_.deref(store_.tail(rest));
            }
            if (!store_.is_nil(rest)) {
                out += '|';
                render(rest, false, out);
            }
            out += ']';
            return;
        }
        out += quote_atom_if_needed(store_.symbol_name(store_.symbol(t)));
        out += '(';
        for (std::uint32_t i = 0; i < c.arity; ++i) {
            if (i)
                out += ',';
            render(store_.arg(t, i), false, out);
        }
        out += ')';
    }
};

} // namespace

std::string quote_atom_if_needed(const std::string &name)
{
    bool plain = !name.empty() && std::islower(static_cast<unsigned char>(name[0]));
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            plain = false;
    if (plain || is_solo_or_symbolic(name))
        return name;
    std::string out = "'";
    for (char c : name) {
        if (c == '\'')
            out += "''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

std::string AnswerText::text() const
{
    if (equations.empty())
        return "true";
    std::string out;
    for (std::size_t i = 0; i < equations.size(); ++i) {
        if (i)
            out += ", ";
        out += equations[i];
    }
    return out;
}

AnswerText print_answer(const CellStore &store, const std::vector<NamedBinding> &bindings)
{
    Renderer r(store, bindings);
    AnswerText out;
    for (const auto &[name, cell] : bindings) {
        if (Renderer::hidden(name))
            continue;
        out.equations.push_back(r.equation(name, cell));
    }
    r.flush_aux(out.equations);
    return out;
}

std::string format_term(const CellStore &store, CellRef t)
{
    std::vector<NamedBinding> none{{"_", t}};
    Renderer r(store, none);
    auto root = store.deref(t);
    std::vector<std::string> parts;
    // A cyclic root gets its own label like any interior cycle.
    parts.push_back(r.render_root(root, "_S0"));
    r.flush_aux(parts);
    if (parts.front().find("_S0") != std::string::npos)
        parts.front() = "_S0, _S0 = " + parts.front();
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ", ";
        out += parts[i];
    }
    return out;
}

namespace {

nlohmann::json json_tree(const CellStore &store, CellRef t, std::vector<int> &path,
                         std::unordered_map<CellRef, std::vector<int>, CellRefHash> &on_path,
                         std::unordered_map<CellRef, std::string, CellRefHash> &unbound,
                         nlohmann::json &cycles)
{
    t = store.deref(t);
    const auto &c = store.cell(t);
    switch (c.kind) {
    case CellKind::Var: {
        auto it = unbound.find(t);
        if (it == unbound.end())
            it = unbound.emplace(t, "_" + std::to_string(unbound.size() + 1)).first;
        return {{"var", it->second}};
    }
    case CellKind::Int:
        return {{"int", c.value}};
    case CellKind::Atom:
        return {{"atom", store.symbol_name(store.symbol(t))}};
    default:
        break;
    }
    if (auto it = on_path.find(t); it != on_path.end()) {
        cycles.push_back({{"at", path}, {"target", it->second}});
        return {{"ref", it->second}};
    }
    on_path.emplace(t, path);
    nlohmann::json args = nlohmann::json::array();
    for (std::uint32_t i = 0; i < store.child_count(t); ++i) {
        path.push_back(static_cast<int>(i));
        args.push_back(json_tree(store, store.child(t, i), path, on_path, unbound, cycles));
        path.pop_back();
    }
    on_path.erase(t);
    std::string functor = c.kind == CellKind::Pair ? "." : store.symbol_name(store.symbol(t));
    return {{"functor", functor}, {"args", args}};
}

} // namespace

nlohmann::json answer_json(const CellStore &store, const std::vector<NamedBinding> &bindings)
{
    nlohmann::json out = nlohmann::json::array();
    std::unordered_map<CellRef, std::string, CellRefHash> unbound;
    for (const auto &[name, cell] : bindings) {
        if (!name.empty() && name[0] == '_')
            continue;
        std::vector<int> path;
        std::unordered_map<CellRef, std::vector<int>, CellRefHash> on_path;
        nlohmann::json cycles = nlohmann::json::array();
        auto tree = json_tree(store, cell, path, on_path, unbound, cycles);
        out.push_back({{"var", name}, {"term", tree}, {"cycles", cycles}});
    }
    return {{"bindings", out}};
}

} // namespace cycletab
