#pragma once

// Shared helpers for the test suites: a seeded random-formula generator and
// brute-force truth-table oracles. These stay independent of the CNF/solver
// path they are used to check.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kmismatch/formula.hpp"

namespace testutil {

using kmismatch::prop::Atom;
using kmismatch::prop::AtomTable;
using kmismatch::prop::Formula;
using kmismatch::prop::PartialAssignment;

inline std::vector<Atom> make_atoms(AtomTable &table, std::size_t n,
                                    const std::string &prefix = "A") {
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        atoms.push_back(table.intern(prefix + std::to_string(i)));
    return atoms;
}

// Random formula over the given atoms. Depth-bounded; all connectives used.
class FormulaGen {
public:
    FormulaGen(std::uint64_t seed, std::vector<Atom> atoms)
        : rng_(seed), atoms_(std::move(atoms)) {}

    Formula next(int max_depth = 5) { return gen(max_depth); }

private:
    Formula gen(int depth) {
        // bias towards leaves as depth runs out
        int pick = depth <= 0 ? static_cast<int>(rng_() % 10)
                              : static_cast<int>(rng_() % 16);
        if (pick < 8 || depth <= 0) {
            if (pick < 1)
                return Formula::constant((rng_() & 1) != 0);
            return Formula::var(atoms_[rng_() % atoms_.size()]);
        }
        switch (pick % 5) {
        case 0:
            return Formula::negate(gen(depth - 1));
        case 1: {
            std::size_t n = 2 + rng_() % 3;
            std::vector<Formula> kids;
            for (std::size_t i = 0; i < n; ++i)
                kids.push_back(gen(depth - 1));
            return Formula::conj(std::move(kids));
        }
        case 2: {
            std::size_t n = 2 + rng_() % 3;
            std::vector<Formula> kids;
            for (std::size_t i = 0; i < n; ++i)
                kids.push_back(gen(depth - 1));
            return Formula::disj(std::move(kids));
        }
        case 3:
            return Formula::exclusive_or(gen(depth - 1), gen(depth - 1));
        default:
            return Formula::implies(gen(depth - 1), gen(depth - 1));
        }
    }

    std::mt19937_64 rng_;
    std::vector<Atom> atoms_;
};

// All 2^n assignments over `atoms`, in mask order (bit i drives atoms[i]).
inline std::vector<PartialAssignment> all_assignments(const std::vector<Atom> &atoms) {
    std::vector<PartialAssignment> out;
    out.reserve(1u << atoms.size());
    for (std::uint64_t mask = 0; mask < (1ull << atoms.size()); ++mask) {
        PartialAssignment a;
        for (std::size_t i = 0; i < atoms.size(); ++i)
            a.bind(atoms[i], (mask >> i) & 1);
        out.push_back(std::move(a));
    }
    return out;
}

inline bool truth_table_satisfiable(const Formula &f, const std::vector<Atom> &atoms,
                                    const AtomTable &table) {
    for (const auto &a : all_assignments(atoms))
        if (kmismatch::prop::evaluate(f, a, table))
            return true;
    return false;
}

// Projected model set by exhaustive enumeration.
inline std::set<PartialAssignment> truth_table_models(const Formula &f,
                                                      const std::vector<Atom> &atoms,
                                                      const std::vector<Atom> &projection,
                                                      const AtomTable &table) {
    std::set<PartialAssignment> out;
    for (const auto &a : all_assignments(atoms)) {
        if (!kmismatch::prop::evaluate(f, a, table))
            continue;
        PartialAssignment p;
        for (Atom x : projection)
            p.bind(x, a.value(x).value_or(false));
        out.insert(std::move(p));
    }
    return out;
}

}  // namespace testutil
