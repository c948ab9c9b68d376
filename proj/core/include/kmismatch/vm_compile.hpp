#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

#include "kmismatch/formula.hpp"
#include "kmismatch/kconfig_model.hpp"

namespace kmismatch::kconfig {

/// Atoms encoding one config option: bool options get `yes` only, tristates
/// get `yes` (permanent selection, X_y) and `mod` (module selection, X_m).
struct VarAtoms {
    prop::Atom yes;
    std::optional<prop::Atom> mod;
};

/// The variability model compiled to a single propositional formula plus
/// the variable dictionary. Immutable after compilation; shareable.
struct PropositionalVM {
    prop::Formula vm_formula;
    std::map<std::string, VarAtoms> atom_map;       // bool/tristate options only
    std::map<std::string, bool> visibility;         // all options
    std::map<std::string, OptionType> type_map;     // all options
    Diagnostics diagnostics;
    std::shared_ptr<prop::AtomTable> atoms;

    /// Atoms interned during compilation (ids below this bound) belong to the
    /// model; higher ids were minted later by solution-space frontends.
    std::size_t declared_atom_count = 0;

    bool is_declared(prop::Atom a) const { return a.id < declared_atom_count; }

    /// Variable name for one of its encoding atoms, if any.
    const std::string *variable_of(prop::Atom a) const;
};

/// Compiles the parsed model: tristate split with mutual exclusion and
/// module gating, dependency clauses with select overriding depends on,
/// select lower-bound propagation, choice exclusivity, and pinning of
/// promptless options without select sources to their first applicable
/// default. Unsupported constructs degrade to diagnostics.
PropositionalVM compile_vm(const KconfigModel &m,
                           std::shared_ptr<prop::AtomTable> table = nullptr);

/// Resolves Kconfig variable names against a compiled VM for the
/// solution-space frontends. Undeclared names get fresh atoms plus a
/// diagnostic; equality tests on non-propositional options become opaque
/// atoms (named with a leading '@').
class AtomResolver {
public:
    AtomResolver(PropositionalVM &vm, std::string origin)
        : vm_(vm), origin_(std::move(origin)) {}

    /// "X is enabled": X for bool, X_y || X_m for tristate.
    prop::Formula enabled(const std::string &name, const std::string &file, int line);

    /// CONFIG_X in a preprocessor test: X for bool, X_y for tristate.
    prop::Formula level_yes(const std::string &name, const std::string &file, int line);

    /// CONFIG_X_MODULE: X_m for tristate X; bools never take the module level.
    prop::Formula level_mod(const std::string &name, const std::string &file, int line);

    /// Fresh free atom for an expression the analysis treats as a black box.
    prop::Atom opaque(const std::string &token);

    Diagnostics take_diagnostics() { return std::move(diags_); }

private:
    prop::Atom fresh(const std::string &name, const std::string &file, int line);

    PropositionalVM &vm_;
    std::string origin_;
    Diagnostics diags_;
    std::map<std::string, prop::Atom> fresh_atoms_;
};

}  // namespace kmismatch::kconfig
