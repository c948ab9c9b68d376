#include "kmismatch/solver.hpp"

#include <algorithm>

#include "kmismatch/errors.hpp"

namespace kmismatch::prop {

namespace {

// Literal encoding: 2*var for the positive literal, 2*var+1 for the negative
// one; vars are 0-based internally.
using Lit = int;

inline Lit make_lit(int var, bool negated) { return 2 * var + (negated ? 1 : 0); }
inline Lit neg(Lit l) { return l ^ 1; }
inline int var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return (l & 1) != 0; }

constexpr std::int8_t kUndef = -1;

struct Clause {
    std::vector<Lit> lits;
};

// Conflict-driven clause learning with two-watched-literal propagation,
// 1UIP learning, activity-based decisions, phase saving and Luby restarts.
class CdclEngine {
public:
    CdclEngine(const CnfInstance &cnf, const SolverBudget &budget)
        : budget_(budget), num_vars_(cnf.var_count()) {
        values_.assign(num_vars_, kUndef);
        levels_.assign(num_vars_, 0);
        reasons_.assign(num_vars_, -1);
        activity_.assign(num_vars_, 0.0);
        saved_phase_.assign(num_vars_, 0);
        seen_.assign(num_vars_, 0);
        watches_.assign(2 * static_cast<std::size_t>(num_vars_), {});
        ok_ = true;
        for (const auto &clause : cnf.clauses())
            if (!add_clause(clause)) {
                ok_ = false;
                break;
            }
    }

    SolveResult run() {
        SolveResult result;
        if (!ok_) {
            result.status = SolveStatus::Unsatisfiable;
            return result;
        }
        const auto deadline = std::chrono::steady_clock::now() + budget_.max_time;
        std::uint64_t conflicts = 0;
        std::uint64_t restart_limit = luby(restarts_) * kRestartBase;
        std::uint64_t conflicts_since_restart = 0;

        for (;;) {
            int confl = propagate();
            if (confl >= 0) {
                ++conflicts;
                ++conflicts_since_restart;
                if (decision_level() == 0) {
                    result.status = SolveStatus::Unsatisfiable;
                    return result;
                }
                if (conflicts > budget_.max_conflicts ||
                    ((conflicts & 511) == 0 && std::chrono::steady_clock::now() > deadline)) {
                    result.status = SolveStatus::BudgetExceeded;
                    return result;
                }
                std::vector<Lit> learnt;
                int back_level = analyze(confl, learnt);
                backtrack(back_level);
                attach_learnt(std::move(learnt));
                decay_activity();
                if (conflicts_since_restart >= restart_limit) {
                    conflicts_since_restart = 0;
                    ++restarts_;
                    restart_limit = luby(restarts_) * kRestartBase;
                    backtrack(0);
                }
            } else {
                int next = pick_branch_var();
                if (next < 0) {
                    result.status = SolveStatus::Satisfiable;
                    return result;
                }
                trail_lim_.push_back(static_cast<int>(trail_.size()));
                enqueue(make_lit(next, saved_phase_[next] == 0), -1);
            }
        }
    }

private:
    static constexpr std::uint64_t kRestartBase = 256;

    int decision_level() const { return static_cast<int>(trail_lim_.size()); }

    // 1 true, 0 false, -1 unassigned under the current trail.
    std::int8_t lit_value(Lit l) const {
        std::int8_t v = values_[var_of(l)];
        if (v == kUndef)
            return kUndef;
        return static_cast<std::int8_t>((v == 1) == !sign_of(l) ? 1 : 0);
    }

    // Construction-time only (decision level 0): level-0 values are permanent,
    // so satisfied clauses are dropped and false literals removed before the
    // watches are set up.
    bool add_clause(const CnfInstance::Clause &dimacs) {
        std::vector<Lit> lits;
        lits.reserve(dimacs.size());
        for (int d : dimacs) {
            int v = std::abs(d) - 1;
            lits.push_back(make_lit(v, d < 0));
        }
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        for (std::size_t i = 0; i + 1 < lits.size(); ++i)
            if (lits[i + 1] == neg(lits[i]))
                return true;  // tautology
        std::vector<Lit> pruned;
        pruned.reserve(lits.size());
        for (Lit l : lits) {
            std::int8_t v = lit_value(l);
            if (v == 1)
                return true;  // already satisfied at level 0
            if (v == kUndef)
                pruned.push_back(l);
        }
        if (pruned.empty())
            return false;
        if (pruned.size() == 1) {
            enqueue(pruned[0], -1);
            return propagate() < 0;
        }
        attach(std::move(pruned));
        return true;
    }

    void attach(std::vector<Lit> lits) {
        int idx = static_cast<int>(clauses_.size());
        watches_[lits[0]].push_back(idx);
        watches_[lits[1]].push_back(idx);
        clauses_.push_back(Clause{std::move(lits)});
    }

    void attach_learnt(std::vector<Lit> learnt) {
        if (learnt.size() == 1) {
            enqueue(learnt[0], -1);
            return;
        }
        int idx = static_cast<int>(clauses_.size());
        watches_[learnt[0]].push_back(idx);
        watches_[learnt[1]].push_back(idx);
        Lit asserting = learnt[0];
        clauses_.push_back(Clause{std::move(learnt)});
        enqueue(asserting, idx);
    }

    void enqueue(Lit l, int reason) {
        int v = var_of(l);
        values_[v] = sign_of(l) ? 0 : 1;
        levels_[v] = decision_level();
        reasons_[v] = reason;
        saved_phase_[v] = values_[v];
        trail_.push_back(l);
    }

    // Returns the index of a conflicting clause, or -1.
    int propagate() {
        while (qhead_ < trail_.size()) {
            Lit p = trail_[qhead_++];
            Lit false_lit = neg(p);
            auto &ws = watches_[false_lit];
            std::size_t keep = 0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                int ci = ws[i];
                Clause &c = clauses_[ci];
                if (c.lits[0] == false_lit)
                    std::swap(c.lits[0], c.lits[1]);
                // c.lits[1] == false_lit now
                if (lit_value(c.lits[0]) == 1) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < c.lits.size(); ++k) {
                    if (lit_value(c.lits[k]) != 0) {
                        std::swap(c.lits[1], c.lits[k]);
                        watches_[c.lits[1]].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                if (lit_value(c.lits[0]) == 0) {
                    // conflict: restore remaining watches and bail out
                    for (; i < ws.size(); ++i)
                        ws[keep++] = ws[i];
                    ws.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                ws[keep++] = ci;
                enqueue(c.lits[0], ci);
            }
            ws.resize(keep);
        }
        return -1;
    }

    int analyze(int confl, std::vector<Lit> &learnt) {
        learnt.clear();
        learnt.push_back(0);  // slot for the asserting literal
        int path = 0;
        Lit p = -1;
        int index = static_cast<int>(trail_.size()) - 1;
        int ci = confl;
        do {
            const Clause &c = clauses_[ci];
            for (Lit q : c.lits) {
                if (q == p)
                    continue;
                int v = var_of(q);
                if (!seen_[v] && levels_[v] > 0) {
                    seen_[v] = 1;
                    bump_activity(v);
                    if (levels_[v] >= decision_level())
                        ++path;
                    else
                        learnt.push_back(q);
                }
            }
            while (!seen_[var_of(trail_[index])])
                --index;
            p = trail_[index--];
            seen_[var_of(p)] = 0;
            --path;
            if (path > 0)
                ci = reasons_[var_of(p)];
        } while (path > 0);
        learnt[0] = neg(p);

        int back_level = 0;
        if (learnt.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t i = 2; i < learnt.size(); ++i)
                if (levels_[var_of(learnt[i])] > levels_[var_of(learnt[max_i])])
                    max_i = i;
            std::swap(learnt[1], learnt[max_i]);
            back_level = levels_[var_of(learnt[1])];
        }
        for (std::size_t i = 1; i < learnt.size(); ++i)
            seen_[var_of(learnt[i])] = 0;
        return back_level;
    }

    void backtrack(int level) {
        if (decision_level() <= level)
            return;
        std::size_t bound = static_cast<std::size_t>(trail_lim_[level]);
        for (std::size_t i = trail_.size(); i-- > bound;)
            values_[var_of(trail_[i])] = kUndef;
        trail_.resize(bound);
        trail_lim_.resize(level);
        qhead_ = trail_.size();
    }

    int pick_branch_var() const {
        int best = -1;
        double best_act = -1.0;
        for (int v = 0; v < num_vars_; ++v) {
            if (values_[v] != kUndef)
                continue;
            if (activity_[v] > best_act) {
                best_act = activity_[v];
                best = v;
            }
        }
        return best;
    }

    void bump_activity(int v) {
        activity_[v] += activity_inc_;
        if (activity_[v] > 1e100) {
            for (auto &a : activity_)
                a *= 1e-100;
            activity_inc_ *= 1e-100;
        }
    }

    void decay_activity() { activity_inc_ /= 0.95; }

    static std::uint64_t luby(std::uint64_t i) {
        // Luby sequence 1,1,2,1,1,2,4,...
        std::uint64_t k = 1;
        while ((1ULL << (k + 1)) <= i + 2)
            ++k;
        for (;;) {
            if (i + 2 == (1ULL << k))
                return 1ULL << (k - 1);
            std::uint64_t half = (1ULL << (k - 1)) - 1;
            if (i > half) {
                i -= half + 1;
                k = 1;
                while ((1ULL << (k + 1)) <= i + 2)
                    ++k;
            } else {
                --k;
            }
        }
    }

public:
    std::vector<std::int8_t> model_values() const {
        std::vector<std::int8_t> vals(values_.begin(), values_.end());
        for (auto &v : vals)
            if (v == kUndef)
                v = 0;
        return vals;
    }

private:
    SolverBudget budget_;
    int num_vars_;
    bool ok_ = true;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> watches_;  // indexed by literal
    std::vector<std::int8_t> values_;
    std::vector<int> levels_;
    std::vector<int> reasons_;
    std::vector<double> activity_;
    std::vector<std::int8_t> saved_phase_;
    std::vector<std::int8_t> seen_;
    std::vector<Lit> trail_;
    std::vector<int> trail_lim_;
    std::size_t qhead_ = 0;
    std::uint64_t restarts_ = 0;
    double activity_inc_ = 1.0;
};

class CdclSolver final : public SatSolver {
public:
    SolveResult solve(const CnfInstance &cnf, const SolverBudget &budget) override {
        CdclEngine engine(cnf, budget);
        SolveResult result = engine.run();
        if (result.status == SolveStatus::Satisfiable) {
            auto vals = engine.model_values();
            PartialAssignment witness;
            auto originals = cnf.original_atoms();
            for (std::size_t i = 0; i < originals.size(); ++i)
                witness.bind(originals[i], vals[i] == 1);
            result.witness = std::move(witness);
        }
        return result;
    }
};

}  // namespace

std::unique_ptr<SatSolver> make_cdcl_solver() { return std::make_unique<CdclSolver>(); }

SolveResult is_satisfiable(const CnfInstance &cnf, const SolverBudget &budget) {
    CdclSolver solver;
    return solver.solve(cnf, budget);
}

std::vector<PartialAssignment> enumerate_models(const Formula &f,
                                                std::span<const Atom> projection,
                                                std::size_t limit,
                                                const EnumerateOptions &opts) {
    if (projection.size() > opts.projection_cap)
        throw EnumerationExplosionError(projection.size(), opts.projection_cap);
    if (limit == 0)
        return {};

    CnfInstance cnf = to_cnf(f, projection);
    std::vector<PartialAssignment> models;
    for (;;) {
        SolveResult r = is_satisfiable(cnf, opts.budget);
        if (r.status == SolveStatus::BudgetExceeded)
            throw ResourceLimitError("model enumeration exceeded the solver budget");
        if (r.status == SolveStatus::Unsatisfiable)
            return models;
        PartialAssignment projected;
        CnfInstance::Clause blocking;
        for (Atom a : projection) {
            bool value = r.witness.value(a).value_or(false);
            projected.bind(a, value);
            int var = cnf.var_of(a);
            blocking.push_back(value ? -var : var);
        }
        models.push_back(std::move(projected));
        if (models.size() >= limit)
            return models;
        if (blocking.empty())
            return models;  // empty projection: the single empty model
        cnf.add_clause(std::move(blocking));
    }
}

}  // namespace kmismatch::prop
