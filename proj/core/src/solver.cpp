#include "thoraxfem/solver.hpp"

#include "thoraxfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tfem {

int SolverSettings::effective_max_iterations(int dof_count) const
{
    if (max_iterations > 0) return max_iterations;
    const int scaled = static_cast<int>(20.0 * std::sqrt(static_cast<double>(std::max(dof_count, 0))));
    return std::max(1000, scaled);
}

CgResult cg_solve(const CsrMatrix& matrix, const std::vector<double>& rhs,
                  const SolverSettings& settings, const std::vector<double>* warm_start)
{
    const int n = matrix.n;
    if (static_cast<int>(rhs.size()) != n) throw SolverError("cg: rhs size mismatch");
    if (!(settings.tolerance > 0.0 && settings.tolerance < 1.0)) {
        throw SolverError("cg: tolerance must lie in (0, 1)");
    }

    CgResult result;
    result.u.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) {
        result.stats.converged = true;
        return result;
    }

    const double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        result.stats.converged = true;
        return result;
    }

    if (warm_start) {
        if (static_cast<int>(warm_start->size()) != n) {
            throw SolverError("cg: warm start size mismatch");
        }
        result.u = *warm_start;
    }

    std::vector<double> inv_diag;
    if (settings.preconditioner == Preconditioner::Jacobi) {
        inv_diag = matrix.diagonal();
        for (double& d : inv_diag) {
            if (!(d > 0.0)) throw SolverError("cg: Jacobi preconditioner requires positive diagonal");
            d = 1.0 / d;
        }
    }
    auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
        if (inv_diag.empty()) {
            z = r;
        } else {
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = inv_diag[i] * r[i];
        }
    };

    std::vector<double> r(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    std::vector<double> q(static_cast<std::size_t>(n));

    matrix.multiply(result.u, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];

    double res_norm = norm2(r);
    result.stats.residual_history.push_back(res_norm / rhs_norm);

    const double target = settings.tolerance * rhs_norm;
    const int max_it = settings.effective_max_iterations(n);

    if (res_norm <= target) {
        result.stats.converged = true;
        result.stats.final_residual = res_norm / rhs_norm;
        return result;
    }

    precondition(r, z);
    p = z;
    double rz = dot(r, z);

    int it = 0;
    while (it < max_it) {
        ++it;
        matrix.multiply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw SolverError("cg: matrix is not positive definite (p'Kp = "
                              + std::to_string(pq) + " at iteration " + std::to_string(it) + ")");
        }
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < r.size(); ++i) {
            result.u[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res_norm = norm2(r);
        result.stats.residual_history.push_back(res_norm / rhs_norm);
        if (res_norm <= target) {
            // Guard against recurrence drift with a true residual.
            matrix.multiply(result.u, q);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - q[i];
            res_norm = norm2(r);
            if (res_norm <= target) break;
        }
        precondition(r, z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    }

    result.stats.iterations = it;
    result.stats.final_residual = res_norm / rhs_norm;
    result.stats.converged = res_norm <= target;
    return result;
}

int TimeSchedule::steps() const
{
    if (!(dt > 0.0)) throw ConfigError("schedule: dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("schedule: t_end must be at least dt");
    const double ratio = t_end / dt;
    const double rounded = std::round(ratio);
    const double ulp = std::nextafter(ratio, std::numeric_limits<double>::infinity()) - ratio;
    if (std::abs(ratio - rounded) > 0.5 * ulp) {
        std::ostringstream os;
        os << "schedule: t_end/dt = " << ratio << " is not an integer number of steps";
        throw ConfigError(os.str());
    }
    return static_cast<int>(rounded);
}

RunResults run_time_loop(const SparseSystem& system, const TimeSchedule& schedule,
                         const SolverSettings& settings)
{
    const int n_steps = schedule.steps();
    const int n = system.reduced_matrix.n;

    RunResults results;
    results.steps.reserve(static_cast<std::size_t>(n_steps));

    std::vector<double> previous(static_cast<std::size_t>(n), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int k = 1; k <= n_steps; ++k) {
        const double load_factor = static_cast<double>(k) / static_cast<double>(n_steps);
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            rhs[i] = load_factor * system.reduced_load[i];
        }
        CgResult solve = cg_solve(system.reduced_matrix, rhs, settings, &previous);
        if (!solve.stats.converged) {
            std::ostringstream os;
            os << "time step " << k << " (t = " << static_cast<double>(k) * schedule.dt
               << " s): CG did not converge within " << solve.stats.iterations
               << " iterations (relative residual " << solve.stats.final_residual << ")";
            throw SolverError(os.str());
        }
        previous = solve.u;

        StepResult step;
        step.time = static_cast<double>(k) * schedule.dt;
        step.load_factor = load_factor;
        step.displacement = system.expand(solve.u, load_factor);
        step.stats = std::move(solve.stats);
        results.steps.push_back(std::move(step));
    }
    return results;
}

} // namespace tfem
