#include "doctest.h"

#include <sstream>

#include "kmismatch/cnf.hpp"
#include "kmismatch/formula.hpp"
#include "kmismatch/solver.hpp"
#include "testutil.hpp"

using namespace kmismatch;
using namespace kmismatch::prop;
using testutil::all_assignments;
using testutil::FormulaGen;
using testutil::make_atoms;

TEST_CASE("evaluate basic connectives") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B");

    PartialAssignment at;
    at.bind(a, true);
    CHECK_FALSE(evaluate(Formula::exclusive_or(Formula::var(a), Formula::var(a)), at, t));

    PartialAssignment af;
    af.bind(a, false);
    CHECK_FALSE(evaluate(Formula::var(a) && !Formula::var(a), af, t));

    PartialAssignment ab;
    ab.bind(a, true);
    ab.bind(b, false);
    CHECK_FALSE(evaluate(Formula::implies(Formula::var(a), Formula::var(b)), ab, t));
    CHECK(evaluate(Formula::implies(Formula::var(b), Formula::var(a)), ab, t));
}

TEST_CASE("evaluate reports the missing atom") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("MISSING");
    PartialAssignment only_a;
    only_a.bind(a, true);
    try {
        evaluate(Formula::var(a) && Formula::var(b), only_a, t);
        FAIL("expected UnboundAtomError");
    } catch (const UnboundAtomError &e) {
        CHECK(e.atom_name == "MISSING");
    }
}

TEST_CASE("substitute fixes one atom and leaves the rest") {
    AtomTable t;
    Atom v = t.intern("v"), a = t.intern("A"), b = t.intern("B");

    Formula f = Formula::var(v) && Formula::var(a);
    Formula r = substitute(f, v, true);
    CHECK_FALSE(contains_atom(r, v));
    CHECK(to_string(simplify(r), t) == "A");

    Formula g = Formula::var(a) || Formula::var(b);
    CHECK(substitute(g, v, false).same_node(g));  // v absent: shared unchanged

    CHECK(simplify(substitute(!Formula::var(v), v, true)).kind() == Kind::False);
}

TEST_CASE("substitution soundness property") {
    AtomTable t;
    auto atoms = make_atoms(t, 4);
    FormulaGen gen(42, atoms);
    for (int i = 0; i < 200; ++i) {
        Formula f = gen.next();
        Atom v = atoms[i % atoms.size()];
        bool c = (i & 1) != 0;
        Formula sub = substitute(f, v, c);
        CHECK_FALSE(contains_atom(sub, v));
        for (const auto &a : all_assignments(atoms)) {
            PartialAssignment with_v = a;
            with_v.set(v, c);
            CHECK(evaluate(sub, a, t) == evaluate(f, with_v, t));
        }
    }
}

TEST_CASE("atoms_of") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B"), c = t.intern("C");
    CHECK(atoms_of(Formula::constant(true)).empty());

    auto s = atoms_of(Formula::var(a) && (Formula::var(b) || Formula::var(a)));
    CHECK(s == std::vector<Atom>{a, b});

    auto x = atoms_of(Formula::exclusive_or(Formula::var(a), !Formula::var(c)));
    CHECK(x == std::vector<Atom>{a, c});
}

TEST_CASE("simplify unit laws") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B");
    CHECK(to_string(simplify(Formula::var(a) && Formula::constant(true)), t) == "A");
    Formula f = Formula::exclusive_or(Formula::constant(true) && Formula::var(a),
                                      Formula::constant(false) && Formula::var(a));
    CHECK(to_string(simplify(f), t) == "A");
    CHECK(to_string(simplify(!!Formula::var(b)), t) == "B");
}

TEST_CASE("simplify preserves semantics on random formulas") {
    AtomTable t;
    auto atoms = make_atoms(t, 5);
    FormulaGen gen(7, atoms);
    for (int i = 0; i < 300; ++i) {
        Formula f = gen.next();
        Formula s = simplify(f);
        for (const auto &a : all_assignments(atoms))
            CHECK(evaluate(s, a, t) == evaluate(f, a, t));
    }
}

TEST_CASE("n-ary construction flattens") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B"), c = t.intern("C");
    Formula f = (Formula::var(a) && Formula::var(b)) && Formula::var(c);
    CHECK(f.kind() == Kind::And);
    CHECK(f.children().size() == 3);
}

TEST_CASE("to_cnf trivial shapes") {
    AtomTable t;
    Atom a = t.intern("A");

    CnfInstance unit = to_cnf(Formula::var(a));
    REQUIRE(unit.clauses().size() == 1);
    CHECK(unit.clauses()[0] == CnfInstance::Clause{unit.var_of(a)});

    CnfInstance contra = to_cnf(Formula::var(a) && !Formula::var(a));
    CHECK(is_satisfiable(contra).status == SolveStatus::Unsatisfiable);
}

TEST_CASE("solver on tiny hand instances") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B");

    CnfInstance c1;
    int va = c1.add_original(a);
    c1.add_clause({va});
    c1.add_clause({-va});
    CHECK(is_satisfiable(c1).status == SolveStatus::Unsatisfiable);

    CnfInstance c2;
    va = c2.add_original(a);
    int vb = c2.add_original(b);
    c2.add_clause({va, vb});
    c2.add_clause({-va});
    SolveResult r = is_satisfiable(c2);
    REQUIRE(r.sat());
    CHECK(r.witness.value(a) == false);
    CHECK(r.witness.value(b) == true);
}

TEST_CASE("cnf equisatisfiability vs truth tables on random formulas") {
    AtomTable t;
    auto atoms = make_atoms(t, 8);
    FormulaGen gen(1234, atoms);
    for (int i = 0; i < 300; ++i) {
        Formula f = gen.next(5);
        bool brute = testutil::truth_table_satisfiable(f, atoms, t);
        SolveResult r = is_satisfiable(to_cnf(f));
        REQUIRE(r.status != SolveStatus::BudgetExceeded);
        CHECK(r.sat() == brute);
        if (r.sat()) {
            // the witness, projected on original atoms, satisfies the formula
            PartialAssignment full;
            for (Atom x : atoms)
                full.bind(x, r.witness.value(x).value_or(false));
            CHECK(evaluate(f, full, t));
        }
    }
}

TEST_CASE("projected models of to_cnf match the truth table") {
    AtomTable t;
    auto atoms = make_atoms(t, 8);
    FormulaGen gen(99, atoms);
    for (int i = 0; i < 40; ++i) {
        Formula f = gen.next(4);
        auto expect = testutil::truth_table_models(f, atoms, atoms, t);
        auto got = enumerate_models(f, atoms, 1u << 9);
        CHECK(std::set<PartialAssignment>(got.begin(), got.end()) == expect);
    }
}

TEST_CASE("enumerate_models basics") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B");
    std::vector<Atom> proj{a, b};

    auto models = enumerate_models(Formula::var(a) || Formula::var(b), proj, 10);
    CHECK(models.size() == 3);

    CHECK(enumerate_models(Formula::constant(false), proj, 10).empty());

    auto capped = enumerate_models(Formula::var(a) || Formula::var(b), proj, 2);
    CHECK(capped.size() == 2);
}

TEST_CASE("enumerate_models refuses wide projections") {
    AtomTable t;
    auto atoms = make_atoms(t, 13);
    std::vector<Formula> vars;
    for (Atom a : atoms)
        vars.push_back(Formula::var(a));
    Formula f = Formula::disj(vars);
    CHECK_THROWS_AS(enumerate_models(f, atoms, 5), EnumerationExplosionError);
}

TEST_CASE("budget exhaustion reports instead of hanging") {
    // pigeonhole: 6 pigeons into 5 holes, hard enough to burn >3 conflicts
    AtomTable t;
    CnfInstance cnf;
    const int P = 6, H = 5;
    int v[P][H];
    for (int p = 0; p < P; ++p)
        for (int h = 0; h < H; ++h)
            v[p][h] = cnf.add_original(t.intern("p" + std::to_string(p) + "h" + std::to_string(h)));
    for (int p = 0; p < P; ++p) {
        CnfInstance::Clause c;
        for (int h = 0; h < H; ++h)
            c.push_back(v[p][h]);
        cnf.add_clause(c);
    }
    for (int h = 0; h < H; ++h)
        for (int p1 = 0; p1 < P; ++p1)
            for (int p2 = p1 + 1; p2 < P; ++p2)
                cnf.add_clause({-v[p1][h], -v[p2][h]});

    SolverBudget tiny;
    tiny.max_conflicts = 3;
    CHECK(is_satisfiable(cnf, tiny).status == SolveStatus::BudgetExceeded);

    // and with a real budget it closes the instance
    CHECK(is_satisfiable(cnf).status == SolveStatus::Unsatisfiable);
}

TEST_CASE("dimacs export") {
    AtomTable t;
    Atom a = t.intern("A"), b = t.intern("B");
    CnfInstance cnf = to_cnf(Formula::var(a) && !Formula::var(b));
    std::ostringstream out;
    cnf.write_dimacs(out, &t);
    std::string s = out.str();
    CHECK(s.find("p cnf ") != std::string::npos);
    CHECK(s.find("c 1 A") != std::string::npos);
    CHECK(s.find(" 0\n") != std::string::npos);
}
