#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kmismatch/atoms.hpp"

namespace kmismatch::prop {

enum class Kind : std::uint8_t {
    True,
    False,
    Var,
    Not,
    And,      // n-ary
    Or,       // n-ary
    Xor,      // binary
    Implies,  // binary
};

/// Immutable propositional formula with value semantics. Copies share nodes;
/// formulas are safe to share across threads once constructed.
///
/// And/Or are n-ary and flatten same-kind children at construction time, so
/// a disjunction assembled from many parts stays one wide node.
class Formula {
public:
    /// Default-constructs the constant true.
    Formula();

    static Formula constant(bool value);
    static Formula var(Atom a);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> parts);  // empty -> true
    static Formula disj(std::vector<Formula> parts);  // empty -> false
    static Formula exclusive_or(Formula a, Formula b);
    static Formula implies(Formula a, Formula b);

    Kind kind() const { return node_->kind; }
    Atom atom() const { return node_->atom; }  // Var nodes only
    std::span<const Formula> children() const { return node_->kids; }

    bool is_constant() const { return kind() == Kind::True || kind() == Kind::False; }
    bool constant_value() const { return kind() == Kind::True; }

    /// Structural identity (same shared node), not semantic equivalence.
    bool same_node(const Formula &other) const { return node_ == other.node_; }

    /// Stable node address; usable as a key for caching over shared subtrees.
    const void *identity() const { return node_.get(); }

    std::size_t node_count() const;

private:
    struct Node {
        Kind kind;
        Atom atom{};
        std::vector<Formula> kids;
    };

    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    static Formula make_nary(Kind kind, std::vector<Formula> parts, bool empty_value);

    std::shared_ptr<const Node> node_;
};

inline Formula operator!(Formula f) { return Formula::negate(std::move(f)); }
inline Formula operator&&(Formula a, Formula b) {
    return Formula::conj({std::move(a), std::move(b)});
}
inline Formula operator||(Formula a, Formula b) {
    return Formula::disj({std::move(a), std::move(b)});
}

/// Classical truth value of `f` under `a`. Every atom of `f` must be bound;
/// otherwise throws UnboundAtomError naming the missing atom (the table is
/// only consulted for the error message).
bool evaluate(const Formula &f, const PartialAssignment &a, const AtomTable &table);

/// Replaces every occurrence of `v` with the constant `value`. Untouched
/// subtrees are shared with the input.
Formula substitute(const Formula &f, Atom v, bool value);

/// Atoms syntactically reachable in `f`, ascending by id.
std::vector<Atom> atoms_of(const Formula &f);

bool contains_atom(const Formula &f, Atom v);

/// Constant folding and unit laws (x&&true -> x, x^true -> !x, !!x -> x, ...).
/// The result contains no constant nodes unless it is itself a constant.
Formula simplify(const Formula &f);

/// Renders with operators !, &&, ||, ^, -> and minimal parentheses.
std::string to_string(const Formula &f, const AtomTable &table);

}  // namespace kmismatch::prop
