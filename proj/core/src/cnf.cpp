#include "kmismatch/cnf.hpp"

#include <ostream>

namespace kmismatch::prop {

int CnfInstance::var_of(Atom a) const {
    auto it = var_by_atom_.find(a.id);
    return it == var_by_atom_.end() ? 0 : it->second;
}

int CnfInstance::add_original(Atom a) {
    if (int v = var_of(a))
        return v;
    original_atoms_.push_back(a);
    int v = ++var_count_;
    var_by_atom_.emplace(a.id, v);
    return v;
}

void CnfInstance::write_dimacs(std::ostream &out, const AtomTable *table) const {
    if (table) {
        for (std::size_t i = 0; i < original_atoms_.size(); ++i)
            out << "c " << (i + 1) << " " << table->name_of(original_atoms_[i]) << "\n";
    }
    out << "p cnf " << var_count_ << " " << clauses_.size() << "\n";
    for (const auto &clause : clauses_) {
        for (int lit : clause)
            out << lit << " ";
        out << "0\n";
    }
}

namespace {

class TseitinBuilder {
public:
    explicit TseitinBuilder(CnfInstance &cnf) : cnf_(cnf) {}

    // Returns a literal equivalent to `f`; structurally shared subtrees get
    // one auxiliary each.
    int encode(const Formula &f) {
        switch (f.kind()) {
        case Kind::Var:
            return cnf_.add_original(f.atom());
        case Kind::Not:
            return -encode(f.children()[0]);
        case Kind::True:
        case Kind::False:
            // simplify() runs first, so constants can only appear at the root.
            throw Error("constant below the root in Tseitin encoding");
        default:
            break;
        }
        if (auto it = memo_.find(f.identity()); it != memo_.end())
            return it->second;
        std::vector<int> kid_lits;
        kid_lits.reserve(f.children().size());
        for (const auto &k : f.children())
            kid_lits.push_back(encode(k));
        int g = cnf_.add_aux();
        switch (f.kind()) {
        case Kind::And: {
            CnfInstance::Clause all{g};
            for (int x : kid_lits) {
                cnf_.add_clause({-g, x});
                all.push_back(-x);
            }
            cnf_.add_clause(std::move(all));
            break;
        }
        case Kind::Or: {
            CnfInstance::Clause any{-g};
            for (int x : kid_lits) {
                cnf_.add_clause({g, -x});
                any.push_back(x);
            }
            cnf_.add_clause(std::move(any));
            break;
        }
        case Kind::Xor: {
            int a = kid_lits[0], b = kid_lits[1];
            cnf_.add_clause({-g, a, b});
            cnf_.add_clause({-g, -a, -b});
            cnf_.add_clause({g, -a, b});
            cnf_.add_clause({g, a, -b});
            break;
        }
        case Kind::Implies: {
            int a = kid_lits[0], b = kid_lits[1];
            cnf_.add_clause({-g, -a, b});
            cnf_.add_clause({g, a});
            cnf_.add_clause({g, -b});
            break;
        }
        default:
            throw Error("corrupt formula node");
        }
        memo_.emplace(f.identity(), g);
        return g;
    }

private:
    CnfInstance &cnf_;
    std::unordered_map<const void *, int> memo_;
};

}  // namespace

CnfInstance to_cnf(const Formula &f, std::span<const Atom> extra_atoms) {
    CnfInstance cnf;
    for (Atom a : atoms_of(f))
        cnf.add_original(a);
    for (Atom a : extra_atoms)
        cnf.add_original(a);

    Formula g = simplify(f);
    if (g.kind() == Kind::True)
        return cnf;  // no clauses: trivially satisfiable
    if (g.kind() == Kind::False) {
        cnf.add_clause({});  // the empty clause
        return cnf;
    }
    TseitinBuilder builder(cnf);
    cnf.add_clause({builder.encode(g)});
    return cnf;
}

}  // namespace kmismatch::prop
