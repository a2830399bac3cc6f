#pragma once

#include "thoraxfem/assembly.hpp"
#include "thoraxfem/sparse.hpp"

#include <string>
#include <vector>

namespace tfem {

enum class Preconditioner { None, Jacobi };

struct SolverSettings {
    double tolerance = 1e-8;  // relative residual target
    int max_iterations = 0;   // 0 = auto: max(1000, 20*sqrt(dof))
    Preconditioner preconditioner = Preconditioner::Jacobi;

    int effective_max_iterations(int dof_count) const;
};

struct CgStats {
    int iterations = 0;
    double final_residual = 0.0; // true relative residual
    bool converged = false;
    std::vector<double> residual_history; // relative, recurrence-based
};

struct CgResult {
    std::vector<double> u; // best iterate, converged or not
    CgStats stats;
};

// Preconditioned conjugate gradients for SPD systems. Stops when
// ||K u - f||_2 <= tol * ||f||_2; f = 0 returns u = 0 in zero
// iterations. Deterministic: fixed-order reductions.
CgResult cg_solve(const CsrMatrix& matrix, const std::vector<double>& rhs,
                  const SolverSettings& settings, const std::vector<double>* warm_start = nullptr);

// Linear load ramp alpha(t) = t / t_end sampled at t_k = k*dt. The
// number of steps t_end/dt must sit within 0.5 ulp of an integer.
struct TimeSchedule {
    double t_end = 0.5; // s
    double dt = 0.05;   // s

    int steps() const; // throws ConfigError on invalid schedule
};

struct StepResult {
    double time = 0.0;
    double load_factor = 0.0;
    std::vector<double> displacement; // full length, m
    CgStats stats;
};

struct RunResults {
    std::vector<StepResult> steps;
};

// Solves K u_k = alpha_k f for every step, warm-starting from the
// previous solution. Throws SolverError (with step context) on
// non-convergence.
RunResults run_time_loop(const SparseSystem& system, const TimeSchedule& schedule,
                         const SolverSettings& settings);

} // namespace tfem
