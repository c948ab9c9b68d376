#pragma once

#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "kmismatch/formula.hpp"

namespace kmismatch::prop {

/// Clausal form of a formula, equisatisfiable with its source. Variables
/// 1..original_count() stand for source atoms; higher variables are Tseitin
/// auxiliaries. Literals use DIMACS signs.
class CnfInstance {
public:
    using Clause = std::vector<int>;

    int var_count() const { return var_count_; }
    int original_count() const { return static_cast<int>(original_atoms_.size()); }
    int aux_count() const { return var_count_ - original_count(); }

    const std::vector<Clause> &clauses() const { return clauses_; }
    std::span<const Atom> original_atoms() const { return original_atoms_; }

    /// CNF variable for a source atom, or 0 when the atom is not mapped.
    int var_of(Atom a) const;
    Atom atom_of_var(int var) const { return original_atoms_.at(var - 1); }

    int add_original(Atom a);
    int add_aux() { return ++var_count_; }
    void add_clause(Clause c) { clauses_.push_back(std::move(c)); }

    /// Standard DIMACS ("p cnf <vars> <clauses>"), with `c` comment lines
    /// naming the original atoms when a table is supplied.
    void write_dimacs(std::ostream &out, const AtomTable *table = nullptr) const;

private:
    std::vector<Atom> original_atoms_;
    std::unordered_map<std::uint32_t, int> var_by_atom_;
    int var_count_ = 0;
    std::vector<Clause> clauses_;
};

/// Tseitin-style transformation: one auxiliary per composite connective,
/// negations folded into literals, clause count linear in formula size.
/// Every model of the result projects onto the source atoms to a model of
/// `f`, and every model of `f` extends to a model of the result.
///
/// `extra_atoms` are registered as original variables even when they do not
/// occur in `f` (needed when enumerating over a wider projection).
CnfInstance to_cnf(const Formula &f, std::span<const Atom> extra_atoms = {});

}  // namespace kmismatch::prop
