#include "kmismatch/formula.hpp"

#include <algorithm>
#include <set>

namespace kmismatch::prop {

Formula::Formula() : node_(Formula::constant(true).node_) {}

Formula Formula::constant(bool value) {
    static const auto true_node = std::make_shared<const Node>(Node{Kind::True, {}, {}});
    static const auto false_node = std::make_shared<const Node>(Node{Kind::False, {}, {}});
    return Formula(value ? true_node : false_node);
}

Formula Formula::var(Atom a) {
    return Formula(std::make_shared<const Node>(Node{Kind::Var, a, {}}));
}

Formula Formula::negate(Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(f)}}));
}

Formula Formula::make_nary(Kind kind, std::vector<Formula> parts, bool empty_value) {
    std::vector<Formula> flat;
    flat.reserve(parts.size());
    for (auto &p : parts) {
        if (p.kind() == kind) {
            auto kids = p.children();
            flat.insert(flat.end(), kids.begin(), kids.end());
        } else {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty())
        return Formula::constant(empty_value);
    if (flat.size() == 1)
        return flat.front();
    return Formula(std::make_shared<const Node>(Node{kind, {}, std::move(flat)}));
}

Formula Formula::conj(std::vector<Formula> parts) {
    return make_nary(Kind::And, std::move(parts), true);
}

Formula Formula::disj(std::vector<Formula> parts) {
    return make_nary(Kind::Or, std::move(parts), false);
}

Formula Formula::exclusive_or(Formula a, Formula b) {
    return Formula(
        std::make_shared<const Node>(Node{Kind::Xor, {}, {std::move(a), std::move(b)}}));
}

Formula Formula::implies(Formula a, Formula b) {
    return Formula(
        std::make_shared<const Node>(Node{Kind::Implies, {}, {std::move(a), std::move(b)}}));
}

std::size_t Formula::node_count() const {
    std::size_t n = 1;
    for (const auto &k : children())
        n += k.node_count();
    return n;
}

bool evaluate(const Formula &f, const PartialAssignment &a, const AtomTable &table) {
    switch (f.kind()) {
    case Kind::True:
        return true;
    case Kind::False:
        return false;
    case Kind::Var: {
        auto v = a.value(f.atom());
        if (!v)
            throw UnboundAtomError(table.name_of(f.atom()));
        return *v;
    }
    case Kind::Not:
        return !evaluate(f.children()[0], a, table);
    case Kind::And:
        for (const auto &k : f.children())
            if (!evaluate(k, a, table))
                return false;
        return true;
    case Kind::Or:
        for (const auto &k : f.children())
            if (evaluate(k, a, table))
                return true;
        return false;
    case Kind::Xor:
        return evaluate(f.children()[0], a, table) != evaluate(f.children()[1], a, table);
    case Kind::Implies:
        return !evaluate(f.children()[0], a, table) || evaluate(f.children()[1], a, table);
    }
    throw Error("corrupt formula node");
}

Formula substitute(const Formula &f, Atom v, bool value) {
    switch (f.kind()) {
    case Kind::True:
    case Kind::False:
        return f;
    case Kind::Var:
        return f.atom() == v ? Formula::constant(value) : f;
    default:
        break;
    }
    bool changed = false;
    std::vector<Formula> kids;
    kids.reserve(f.children().size());
    for (const auto &k : f.children()) {
        Formula r = substitute(k, v, value);
        changed = changed || !r.same_node(k);
        kids.push_back(std::move(r));
    }
    if (!changed)
        return f;
    switch (f.kind()) {
    case Kind::Not:
        return Formula::negate(std::move(kids[0]));
    case Kind::And:
        return Formula::conj(std::move(kids));
    case Kind::Or:
        return Formula::disj(std::move(kids));
    case Kind::Xor:
        return Formula::exclusive_or(std::move(kids[0]), std::move(kids[1]));
    case Kind::Implies:
        return Formula::implies(std::move(kids[0]), std::move(kids[1]));
    default:
        throw Error("corrupt formula node");
    }
}

static void collect_atoms(const Formula &f, std::set<std::uint32_t> &out) {
    if (f.kind() == Kind::Var) {
        out.insert(f.atom().id);
        return;
    }
    for (const auto &k : f.children())
        collect_atoms(k, out);
}

std::vector<Atom> atoms_of(const Formula &f) {
    std::set<std::uint32_t> ids;
    collect_atoms(f, ids);
    std::vector<Atom> out;
    out.reserve(ids.size());
    for (auto id : ids)
        out.push_back(Atom{id});
    return out;
}

bool contains_atom(const Formula &f, Atom v) {
    if (f.kind() == Kind::Var)
        return f.atom() == v;
    for (const auto &k : f.children())
        if (contains_atom(k, v))
            return true;
    return false;
}

Formula simplify(const Formula &f) {
    switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Var:
        return f;
    case Kind::Not: {
        Formula c = simplify(f.children()[0]);
        if (c.kind() == Kind::True)
            return Formula::constant(false);
        if (c.kind() == Kind::False)
            return Formula::constant(true);
        if (c.kind() == Kind::Not)
            return c.children()[0];
        if (c.same_node(f.children()[0]))
            return f;
        return Formula::negate(std::move(c));
    }
    case Kind::And: {
        std::vector<Formula> kids;
        for (const auto &k : f.children()) {
            Formula c = simplify(k);
            if (c.kind() == Kind::False)
                return Formula::constant(false);
            if (c.kind() == Kind::True)
                continue;
            kids.push_back(std::move(c));
        }
        return Formula::conj(std::move(kids));
    }
    case Kind::Or: {
        std::vector<Formula> kids;
        for (const auto &k : f.children()) {
            Formula c = simplify(k);
            if (c.kind() == Kind::True)
                return Formula::constant(true);
            if (c.kind() == Kind::False)
                continue;
            kids.push_back(std::move(c));
        }
        return Formula::disj(std::move(kids));
    }
    case Kind::Xor: {
        Formula a = simplify(f.children()[0]);
        Formula b = simplify(f.children()[1]);
        if (a.is_constant() && b.is_constant())
            return Formula::constant(a.constant_value() != b.constant_value());
        if (a.kind() == Kind::False)
            return b;
        if (b.kind() == Kind::False)
            return a;
        if (a.kind() == Kind::True)
            return simplify(Formula::negate(std::move(b)));
        if (b.kind() == Kind::True)
            return simplify(Formula::negate(std::move(a)));
        return Formula::exclusive_or(std::move(a), std::move(b));
    }
    case Kind::Implies: {
        Formula a = simplify(f.children()[0]);
        Formula b = simplify(f.children()[1]);
        if (a.kind() == Kind::False || b.kind() == Kind::True)
            return Formula::constant(true);
        if (a.kind() == Kind::True)
            return b;
        if (b.kind() == Kind::False)
            return simplify(Formula::negate(std::move(a)));
        return Formula::implies(std::move(a), std::move(b));
    }
    }
    throw Error("corrupt formula node");
}

namespace {

// Higher binds tighter.
int precedence(Kind k) {
    switch (k) {
    case Kind::Implies:
        return 1;
    case Kind::Xor:
        return 2;
    case Kind::Or:
        return 3;
    case Kind::And:
        return 4;
    case Kind::Not:
        return 5;
    default:
        return 6;
    }
}

void print(const Formula &f, const AtomTable &table, int parent_prec, std::string &out) {
    int prec = precedence(f.kind());
    bool need_parens = prec < parent_prec;
    if (need_parens)
        out += '(';
    switch (f.kind()) {
    case Kind::True:
        out += "true";
        break;
    case Kind::False:
        out += "false";
        break;
    case Kind::Var:
        out += table.name_of(f.atom());
        break;
    case Kind::Not:
        out += '!';
        print(f.children()[0], table, prec + 1, out);
        break;
    case Kind::And:
    case Kind::Or: {
        const char *op = f.kind() == Kind::And ? " && " : " || ";
        bool first = true;
        for (const auto &k : f.children()) {
            if (!first)
                out += op;
            first = false;
            print(k, table, prec, out);
        }
        break;
    }
    case Kind::Xor:
        print(f.children()[0], table, prec + 1, out);
        out += " ^ ";
        print(f.children()[1], table, prec + 1, out);
        break;
    case Kind::Implies:
        // right-associative
        print(f.children()[0], table, prec + 1, out);
        out += " -> ";
        print(f.children()[1], table, prec, out);
        break;
    }
    if (need_parens)
        out += ')';
}

}  // namespace

std::string to_string(const Formula &f, const AtomTable &table) {
    std::string out;
    print(f, table, 0, out);
    return out;
}

}  // namespace kmismatch::prop
