#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kmismatch/cnf.hpp"

namespace kmismatch::prop {

/// Per-query decision budget. A query that exhausts either limit reports
/// BudgetExceeded so the caller can mark the variable as excluded instead
/// of hanging.
struct SolverBudget {
    std::uint64_t max_conflicts = 1'000'000;
    std::chrono::milliseconds max_time{10'000};
};

enum class SolveStatus : std::uint8_t { Satisfiable, Unsatisfiable, BudgetExceeded };

struct SolveResult {
    SolveStatus status = SolveStatus::Unsatisfiable;
    /// Total over the instance's original atoms when Satisfiable.
    PartialAssignment witness;

    bool sat() const { return status == SolveStatus::Satisfiable; }
};

/// Decision-procedure interface; the default implementation is a
/// self-contained CDCL solver, so satisfiability tests run without
/// environment dependencies. External solvers can be adapted behind it.
class SatSolver {
public:
    virtual ~SatSolver() = default;
    virtual SolveResult solve(const CnfInstance &cnf, const SolverBudget &budget) = 0;
};

std::unique_ptr<SatSolver> make_cdcl_solver();

/// Convenience wrapper over a fresh CDCL solver.
SolveResult is_satisfiable(const CnfInstance &cnf, const SolverBudget &budget = {});

struct EnumerateOptions {
    /// Refuse projections wider than this (the enumeration is exponential).
    std::size_t projection_cap = 12;
    SolverBudget budget;
};

/// Distinct assignments over `projection`, each extendable to a full model of
/// `f`, found by blocking-clause iteration; stops after `limit` models.
/// Throws EnumerationExplosionError when the projection exceeds the cap and
/// ResourceLimitError when the budget runs out mid-enumeration.
std::vector<PartialAssignment> enumerate_models(const Formula &f,
                                                std::span<const Atom> projection,
                                                std::size_t limit,
                                                const EnumerateOptions &opts = {});

}  // namespace kmismatch::prop
