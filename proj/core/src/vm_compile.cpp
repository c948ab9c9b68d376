#include "kmismatch/vm_compile.hpp"

#include <algorithm>
#include <cctype>

#include "kmismatch/errors.hpp"

namespace kmismatch::kconfig {

using prop::Atom;
using prop::AtomTable;
using prop::Formula;
using prop::simplify;

const std::string *PropositionalVM::variable_of(prop::Atom a) const {
    for (const auto &[name, va] : atom_map) {
        if (va.yes == a || (va.mod && *va.mod == a))
            return &name;
    }
    return nullptr;
}

namespace {

bool is_propositional(OptionType t) {
    return t == OptionType::Bool || t == OptionType::Tristate;
}

std::string opaque_name(const std::string &token) {
    std::string out = "@";
    for (char c : token)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out += c;
    return out;
}

// Shared machinery for turning KExprs into formulas over the VM atoms.
class Compiler {
public:
    explicit Compiler(const KconfigModel &m, std::shared_ptr<AtomTable> table)
        : model_(m), table_(std::move(table)) {
        vm_.atoms = table_;
    }

    PropositionalVM run() {
        intern_options();
        const ConfigOption *modules = find_modules();
        for (const auto &name : model_.option_order)
            emit_option_clauses(model_.options.at(name), modules);
        for (const auto &group : model_.choices)
            emit_choice_clauses(group);
        vm_.vm_formula = Formula::conj(std::move(clauses_));
        vm_.declared_atom_count = table_->size();
        return std::move(vm_);
    }

private:
    void diag(const std::string &file, int line, std::string message) {
        vm_.diagnostics.push_back({"kconfig", file, line, std::move(message)});
    }

    void intern_options() {
        for (const auto &name : model_.option_order) {
            const ConfigOption &opt = model_.options.at(name);
            vm_.visibility[name] = opt.visible();
            vm_.type_map[name] = opt.type;
            if (opt.type == OptionType::Bool) {
                vm_.atom_map[name] = VarAtoms{table_->intern(name), std::nullopt};
            } else if (opt.type == OptionType::Tristate) {
                Atom y = table_->intern(name + "_y");
                Atom m = table_->intern(name + "_m");
                vm_.atom_map[name] = VarAtoms{y, m};
            }
            // string/hex/int options stay out of atom_map
            for (const auto &sel : opt.selects) {
                if (!model_.find(sel.target))
                    diag(opt.declaring_file, opt.declaring_line,
                         "select target '" + sel.target + "' is not declared");
                select_sources_[sel.target].push_back({&opt, &sel});
            }
        }
    }

    const ConfigOption *find_modules() const {
        const ConfigOption *opt = model_.find("MODULES");
        if (opt && is_propositional(opt->type))
            return opt;
        return nullptr;
    }

    // "option is selected at any level"
    Formula selected(const std::string &name) const {
        const VarAtoms &va = vm_.atom_map.at(name);
        if (va.mod)
            return Formula::var(va.yes) || Formula::var(*va.mod);
        return Formula::var(va.yes);
    }

    Formula sel_yes(const std::string &name) const {
        return Formula::var(vm_.atom_map.at(name).yes);
    }

    Atom fresh_symbol(const std::string &name, const ConfigOption &ctx) {
        auto it = fresh_.find(name);
        if (it != fresh_.end())
            return it->second;
        diag(ctx.declaring_file, ctx.declaring_line,
             "reference to undeclared option '" + name + "'");
        Atom a = table_->intern(name);
        fresh_.emplace(name, a);
        return a;
    }

    Atom opaque_atom(const std::string &token) {
        return table_->intern(opaque_name(token));
    }

    // Truthiness of a symbol/literal term in a condition position.
    Formula term_truth(const KTerm &t, const ConfigOption &ctx) {
        if (t.kind == KTerm::Kind::Literal) {
            if (t.text == "y")
                return Formula::constant(true);
            if (t.text == "n")
                return Formula::constant(false);
            // bare 'm' and numeric/string literals in truth position are
            // outside the subset
            diag(ctx.declaring_file, ctx.declaring_line,
                 "literal '" + t.text + "' used as a condition; treated as opaque");
            return Formula::var(opaque_atom(t.text));
        }
        auto tm = vm_.type_map.find(t.text);
        if (tm == vm_.type_map.end())
            return Formula::var(fresh_symbol(t.text, ctx));
        if (!is_propositional(tm->second))
            return Formula::var(opaque_atom(t.text));
        return selected(t.text);
    }

    // Level pair (value-at-y, value-at-m) of a symbol/literal in value position.
    std::pair<Formula, Formula> term_levels(const KTerm &t, const ConfigOption &ctx) {
        if (t.kind == KTerm::Kind::Literal) {
            if (t.text == "y")
                return {Formula::constant(true), Formula::constant(false)};
            if (t.text == "m")
                return {Formula::constant(false), Formula::constant(true)};
            if (t.text == "n")
                return {Formula::constant(false), Formula::constant(false)};
            return {Formula::var(opaque_atom(t.text)), Formula::constant(false)};
        }
        auto tm = vm_.type_map.find(t.text);
        if (tm == vm_.type_map.end())
            return {Formula::var(fresh_symbol(t.text, ctx)), Formula::constant(false)};
        if (!is_propositional(tm->second))
            return {Formula::var(opaque_atom(t.text)), Formula::constant(false)};
        const VarAtoms &va = vm_.atom_map.at(t.text);
        if (va.mod)
            return {Formula::var(va.yes), Formula::var(*va.mod)};
        return {Formula::var(va.yes), Formula::constant(false)};
    }

    Formula translate(const KExpr &e, const ConfigOption &ctx) {
        switch (e.kind()) {
        case KExpr::Kind::Term:
            return term_truth(e.lhs(), ctx);
        case KExpr::Kind::Eq:
        case KExpr::Kind::Neq: {
            Formula eq = translate_eq(e.lhs(), e.rhs(), ctx);
            return e.kind() == KExpr::Kind::Eq ? eq : !eq;
        }
        case KExpr::Kind::Not:
            return !translate(e.child(0), ctx);
        case KExpr::Kind::And:
            return translate(e.child(0), ctx) && translate(e.child(1), ctx);
        case KExpr::Kind::Or:
            return translate(e.child(0), ctx) || translate(e.child(1), ctx);
        }
        throw Error("corrupt kconfig expression");
    }

    Formula translate_eq(const KTerm &a, const KTerm &b, const ConfigOption &ctx) {
        auto tristate_literal = [](const KTerm &t) {
            return t.kind == KTerm::Kind::Literal &&
                   (t.text == "y" || t.text == "m" || t.text == "n");
        };
        auto prop_symbol = [&](const KTerm &t) {
            if (t.kind != KTerm::Kind::Symbol)
                return false;
            auto it = vm_.type_map.find(t.text);
            return it != vm_.type_map.end() && is_propositional(it->second);
        };

        // symbol = y/m/n
        const KTerm *sym = nullptr, *lit = nullptr;
        if (prop_symbol(a) && tristate_literal(b)) {
            sym = &a;
            lit = &b;
        } else if (prop_symbol(b) && tristate_literal(a)) {
            sym = &b;
            lit = &a;
        }
        if (sym) {
            const VarAtoms &va = vm_.atom_map.at(sym->text);
            if (lit->text == "y")
                return Formula::var(va.yes);
            if (lit->text == "m")
                return va.mod ? Formula::var(*va.mod) : Formula::constant(false);
            return !selected(sym->text);
        }
        // symbol = symbol over propositional options: level-wise equivalence
        if (prop_symbol(a) && prop_symbol(b)) {
            auto [ay, am] = term_levels(a, ctx);
            auto [by, bm] = term_levels(b, ctx);
            return !Formula::exclusive_or(ay, by) && !Formula::exclusive_or(am, bm);
        }
        // anything touching strings/hex/int or dangling names is opaque
        return Formula::var(opaque_atom(term_str_raw(a) + "=" + term_str_raw(b)));
    }

    static std::string term_str_raw(const KTerm &t) { return t.text; }

    std::optional<Formula> translate_opt(const std::optional<KExpr> &e,
                                         const ConfigOption &ctx) {
        if (!e)
            return std::nullopt;
        return translate(*e, ctx);
    }

    // (value-at-y, value-at-m) of a default entry's value expression.
    std::pair<Formula, Formula> value_levels(const KExpr &e, const ConfigOption &ctx) {
        if (e.kind() == KExpr::Kind::Term)
            return term_levels(e.lhs(), ctx);
        return {translate(e, ctx), Formula::constant(false)};
    }

    void emit_option_clauses(const ConfigOption &opt, const ConfigOption *modules) {
        if (!is_propositional(opt.type))
            return;  // parsed, typed, but not propositionalized
        const VarAtoms &va = vm_.atom_map.at(opt.name);

        // (a) tristate split: never y and m at once; modules only with MODULES
        if (va.mod) {
            clauses_.push_back(!(Formula::var(va.yes) && Formula::var(*va.mod)));
            if (modules && modules->name != opt.name)
                clauses_.push_back(
                    Formula::implies(Formula::var(*va.mod), selected(modules->name)));
        }

        const auto src_it = select_sources_.find(opt.name);
        const bool select_targeted =
            src_it != select_sources_.end() && !src_it->second.empty();

        // (b) dependency clause; select overrides depends on
        if (opt.depends_on) {
            Formula dep = translate(*opt.depends_on, opt);
            if (select_targeted) {
                std::vector<Formula> sources;
                for (const auto &[src, edge] : src_it->second) {
                    if (!is_propositional(src->type))
                        continue;
                    Formula active = selected(src->name);
                    if (edge->condition)
                        active = active && translate(*edge->condition, *src);
                    sources.push_back(std::move(active));
                }
                clauses_.push_back(Formula::implies(
                    selected(opt.name), dep || Formula::disj(std::move(sources))));
            } else {
                clauses_.push_back(Formula::implies(selected(opt.name), std::move(dep)));
            }
        }

        // (c) select propagation: the source level is the target's lower bound
        for (const auto &sel : opt.selects) {
            const ConfigOption *target = model_.find(sel.target);
            if (!target || !is_propositional(target->type))
                continue;  // dangling or non-propositional target: diagnosed earlier
            std::optional<Formula> cond = translate_opt(sel.condition, opt);
            const VarAtoms &tv = vm_.atom_map.at(target->name);

            auto guard = [&](Formula antecedent) {
                return cond ? (std::move(antecedent) && *cond) : std::move(antecedent);
            };
            if (opt.type == OptionType::Bool) {
                clauses_.push_back(
                    Formula::implies(guard(Formula::var(va.yes)), Formula::var(tv.yes)));
            } else {
                clauses_.push_back(
                    Formula::implies(guard(Formula::var(va.yes)), Formula::var(tv.yes)));
                Formula at_least_m = tv.mod
                                         ? Formula::var(tv.yes) || Formula::var(*tv.mod)
                                         : Formula::var(tv.yes);
                clauses_.push_back(
                    Formula::implies(guard(Formula::var(*va.mod)), std::move(at_least_m)));
            }
        }

        // (e) invisible options without select sources are pinned to their
        // first applicable default; visible options stay free
        if (!opt.visible() && !select_targeted) {
            emit_default_pinning(opt, va);
        } else if (opt.visible() && !opt.defaults.empty()) {
            diag(opt.declaring_file, opt.declaring_line,
                 "defaults of visible option '" + opt.name +
                     "' are not encoded (option left configurable)");
        }
    }

    void emit_default_pinning(const ConfigOption &opt, const VarAtoms &va) {
        // Defaults evaluate in document order: value_i applies when its
        // condition holds and no earlier condition held.
        std::vector<Formula> chain_y, chain_m;
        Formula no_earlier = Formula::constant(true);
        for (const auto &def : opt.defaults) {
            Formula cond = def.condition ? translate(*def.condition, opt)
                                         : Formula::constant(true);
            auto [vy, vm] = value_levels(def.value, opt);
            if (!va.mod && def.value.kind() == KExpr::Kind::Term &&
                def.value.lhs().kind == KTerm::Kind::Literal && def.value.lhs().text == "m") {
                diag(opt.declaring_file, opt.declaring_line,
                     "bool option '" + opt.name + "' has a module-valued default; treated as y");
                vy = Formula::constant(true);
                vm = Formula::constant(false);
            }
            chain_y.push_back(no_earlier && cond && vy);
            chain_m.push_back(no_earlier && cond && vm);
            no_earlier = no_earlier && !cond;
        }
        Formula pin_y = simplify(Formula::disj(std::move(chain_y)));
        clauses_.push_back(!Formula::exclusive_or(Formula::var(va.yes), pin_y));
        if (va.mod) {
            Formula pin_m = simplify(Formula::disj(std::move(chain_m)));
            clauses_.push_back(!Formula::exclusive_or(Formula::var(*va.mod), pin_m));
        }
    }

    void emit_choice_clauses(const ChoiceGroup &group) {
        std::vector<Formula> members;
        const ConfigOption *ctx = nullptr;
        for (const auto &name : group.members) {
            const ConfigOption *opt = model_.find(name);
            if (!opt || !is_propositional(opt->type)) {
                diag(group.file, group.line,
                     "choice member '" + name + "' is not a bool/tristate option");
                continue;
            }
            if (!ctx)
                ctx = opt;
            members.push_back(sel_yes(name));
        }
        if (members.size() < 2)
            return;
        std::optional<Formula> cond;
        if (group.condition && ctx)
            cond = translate(*group.condition, *ctx);

        auto guard = [&](Formula f) {
            return cond ? Formula::implies(*cond, std::move(f)) : std::move(f);
        };
        if (!group.optional_flag)
            clauses_.push_back(guard(Formula::disj(members)));
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                clauses_.push_back(guard(!(members[i] && members[j])));
    }

    const KconfigModel &model_;
    std::shared_ptr<AtomTable> table_;
    PropositionalVM vm_;
    std::vector<Formula> clauses_;
    std::map<std::string, std::vector<std::pair<const ConfigOption *, const SelectEdge *>>>
        select_sources_;
    std::map<std::string, Atom> fresh_;
};

}  // namespace

PropositionalVM compile_vm(const KconfigModel &m, std::shared_ptr<AtomTable> table) {
    if (!table)
        table = std::make_shared<AtomTable>();
    Compiler compiler(m, std::move(table));
    return compiler.run();
}

// ---------------------------------------------------------- AtomResolver ----

prop::Formula AtomResolver::enabled(const std::string &name, const std::string &file,
                                    int line) {
    auto it = vm_.atom_map.find(name);
    if (it != vm_.atom_map.end()) {
        if (it->second.mod)
            return Formula::var(it->second.yes) || Formula::var(*it->second.mod);
        return Formula::var(it->second.yes);
    }
    auto tm = vm_.type_map.find(name);
    if (tm != vm_.type_map.end())
        return Formula::var(opaque(name));  // string/hex/int guard
    return Formula::var(fresh(name, file, line));
}

prop::Formula AtomResolver::level_yes(const std::string &name, const std::string &file,
                                      int line) {
    auto it = vm_.atom_map.find(name);
    if (it != vm_.atom_map.end())
        return Formula::var(it->second.yes);
    auto tm = vm_.type_map.find(name);
    if (tm != vm_.type_map.end())
        return Formula::var(opaque(name));
    return Formula::var(fresh(name, file, line));
}

prop::Formula AtomResolver::level_mod(const std::string &name, const std::string &file,
                                      int line) {
    auto it = vm_.atom_map.find(name);
    if (it != vm_.atom_map.end()) {
        if (it->second.mod)
            return Formula::var(*it->second.mod);
        diags_.push_back({origin_, file, line,
                          "CONFIG_" + name + "_MODULE used but '" + name + "' is bool"});
        return Formula::constant(false);
    }
    return Formula::var(fresh(name + "_m", file, line));
}

prop::Atom AtomResolver::opaque(const std::string &token) {
    return vm_.atoms->intern(opaque_name(token));
}

prop::Atom AtomResolver::fresh(const std::string &name, const std::string &file, int line) {
    auto it = fresh_atoms_.find(name);
    if (it != fresh_atoms_.end())
        return it->second;
    diags_.push_back({origin_, file, line,
                      "'" + name + "' is not declared in the variability model"});
    prop::Atom a = vm_.atoms->intern(name);
    fresh_atoms_.emplace(name, a);
    return a;
}

}  // namespace kmismatch::kconfig
