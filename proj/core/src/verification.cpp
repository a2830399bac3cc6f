#include "thoraxfem/verification.hpp"

#include "thoraxfem/assembly.hpp"
#include "thoraxfem/materials.hpp"
#include "thoraxfem/phantom.hpp"
#include "thoraxfem/solver.hpp"
#include "thoraxfem/errors.hpp"
#include "thoraxfem/stress.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace tfem {

namespace {

struct Assembled {
    Mesh mesh;
    RegionStiffness regions;
    CsrMatrix stiffness;
};

Assembled assemble_bar(const BarSpec& spec, const Material& material)
{
    Assembled a;
    a.mesh = gen_bar(spec);
    a.regions.elasticity[1] = elasticity_matrix(material);
    a.stiffness = assemble_stiffness(a.mesh, a.regions);
    return a;
}

std::vector<int> boundary_nodes(const Mesh& mesh)
{
    std::set<int> out;
    for (const auto& tri : mesh.facets) out.insert(tri.nodes.begin(), tri.nodes.end());
    return {out.begin(), out.end()};
}

// Patch field u = a + G x; CST must reproduce it exactly.
CheckResult patch_test()
{
    CheckResult check;
    check.name = "patch test (linear field exactness)";
    check.threshold = 1e-10;

    const Material heart{"Myocardium", 1e6, 0.3, 2000.0};
    Assembled a = assemble_bar({0.9, 0.7, 0.5, 3, 3, 3}, heart);

    const Vec3 offset(1e-3, -2e-3, 0.5e-3);
    Eigen::Matrix3d grad;
    grad << 2e-3, 1e-3, -0.5e-3,
            0.5e-3, -1e-3, 1e-3,
            1e-3, 0.25e-3, 1.5e-3;
    auto exact = [&](const Vec3& p) -> Vec3 { return offset + grad * p; };

    std::vector<DofConstraint> constraints;
    const std::vector<int> boundary = boundary_nodes(a.mesh);
    for (int node : boundary) {
        const Vec3 u = exact(a.mesh.nodes[static_cast<std::size_t>(node)].position);
        for (int c = 0; c < 3; ++c) constraints.push_back({dof_index(node, c), u[c]});
    }

    std::vector<double> zero_load(static_cast<std::size_t>(3 * a.mesh.num_nodes()), 0.0);
    const SparseSystem system = apply_dirichlet(a.stiffness, zero_load, constraints);

    SolverSettings settings;
    settings.tolerance = 1e-14;
    settings.max_iterations = 50000;
    const CgResult solve = cg_solve(system.reduced_matrix, system.reduced_load, settings);
    if (!solve.stats.converged) throw SolverError("patch test: CG did not converge");
    const std::vector<double> u = system.expand(solve.u);

    std::set<int> boundary_set(boundary.begin(), boundary.end());
    double scale = 0.0;
    for (int i = 0; i < a.mesh.num_nodes(); ++i) {
        scale = std::max(scale, exact(a.mesh.nodes[static_cast<std::size_t>(i)].position).norm());
    }
    double worst = 0.0;
    for (int i = 0; i < a.mesh.num_nodes(); ++i) {
        if (boundary_set.count(i)) continue;
        const Vec3 ue = exact(a.mesh.nodes[static_cast<std::size_t>(i)].position);
        const Vec3 uh(u[static_cast<std::size_t>(dof_index(i, 0))],
                      u[static_cast<std::size_t>(dof_index(i, 1))],
                      u[static_cast<std::size_t>(dof_index(i, 2))]);
        worst = std::max(worst, (uh - ue).norm() / scale);
    }
    check.measured = worst;
    check.passed = worst <= check.threshold;
    check.detail = "max interior node error (relative)";
    return check;
}

CheckResult uniaxial_bar()
{
    CheckResult check;
    check.name = "uniaxial bar (Saint-Venant)";
    check.threshold = 1e-3;

    const double length = 0.1;
    const double width = 0.02;
    const double pressure = 1e3;
    const Material heart{"Myocardium", 1e6, 0.3, 2000.0};
    Assembled a = assemble_bar({length, width, width, 16, 4, 4}, heart);

    std::vector<DirichletSet> sets;
    {
        DirichletSet face;
        face.select = Selector::make_facet(1); // x = 0
        face.components = {true, false, false};
        sets.push_back(face);

        const double eps = 1e-9;
        DirichletSet center; // lateral datum at the face centroid
        center.select = Selector::make_box(
            {{-eps, width / 2 - eps, width / 2 - eps}, {eps, width / 2 + eps, width / 2 + eps}});
        center.components = {false, true, true};
        sets.push_back(center);

        DirichletSet spin; // blocks rotation about x
        spin.select = Selector::make_box(
            {{-eps, width - eps, width / 2 - eps}, {eps, width + eps, width / 2 + eps}});
        spin.components = {false, false, true};
        sets.push_back(spin);
    }

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2); // x = lx
    patches[0].total_force = Vec3(pressure * width * width, 0, 0);

    const std::vector<double> load = assemble_traction(a.mesh, patches);
    const std::vector<DofConstraint> constraints = resolve_dirichlet(a.mesh, sets);
    const SparseSystem system = apply_dirichlet(a.stiffness, load, constraints);

    SolverSettings settings;
    settings.tolerance = 1e-12;
    settings.max_iterations = 50000;
    const CgResult solve = cg_solve(system.reduced_matrix, system.reduced_load, settings);
    if (!solve.stats.converged) throw SolverError("uniaxial bar: CG did not converge");
    const std::vector<double> u = system.expand(solve.u);

    // Interior axial stress against the applied pressure.
    const std::vector<char> active(a.mesh.tets.size(), 1);
    const StressField field = recover_stress(a.mesh, a.regions, active, u, Vec3::UnitX());
    double stress_err = 0.0;
    for (std::size_t e = 0; e < a.mesh.tets.size(); ++e) {
        Vec3 centroid = Vec3::Zero();
        for (int ni : a.mesh.tets[e].nodes) centroid += a.mesh.nodes[static_cast<std::size_t>(ni)].position;
        centroid /= 4.0;
        if (centroid.x() < 0.25 * length || centroid.x() > 0.75 * length) continue;
        stress_err = std::max(stress_err, std::abs(field.stress[e][0] - pressure) / pressure);
    }

    // Tip axial displacement against p L / E.
    const double tip_exact = pressure * length / heart.young_modulus;
    double tip_err = 0.0;
    for (int i = 0; i < a.mesh.num_nodes(); ++i) {
        if (std::abs(a.mesh.nodes[static_cast<std::size_t>(i)].position.x() - length) > 1e-12) continue;
        const double ux = u[static_cast<std::size_t>(dof_index(i, 0))];
        tip_err = std::max(tip_err, std::abs(ux - tip_exact) / tip_exact);
    }

    check.measured = std::max(stress_err, tip_err);
    check.passed = check.measured <= check.threshold;
    std::ostringstream os;
    os << "stress error " << stress_err << ", tip displacement error " << tip_err;
    check.detail = os.str();
    return check;
}

double cantilever_tip_deflection(int nx, int ny, int nz, double length, double width,
                                 const Material& material, double load)
{
    Assembled a = assemble_bar({length, width, width, nx, ny, nz}, material);

    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2);
    patches[0].total_force = Vec3(0, 0, -load);

    const std::vector<double> f = assemble_traction(a.mesh, patches);
    const SparseSystem system = apply_dirichlet(a.stiffness, f, resolve_dirichlet(a.mesh, sets));

    SolverSettings settings;
    settings.tolerance = 1e-10;
    settings.max_iterations = 50000;
    const CgResult solve = cg_solve(system.reduced_matrix, system.reduced_load, settings);
    if (!solve.stats.converged) throw SolverError("cantilever: CG did not converge");
    const std::vector<double> u = system.expand(solve.u);

    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < a.mesh.num_nodes(); ++i) {
        if (std::abs(a.mesh.nodes[static_cast<std::size_t>(i)].position.x() - length) > 1e-12) continue;
        sum += u[static_cast<std::size_t>(dof_index(i, 2))];
        ++count;
    }
    return sum / count;
}

CheckResult cantilever_convergence()
{
    CheckResult check;
    check.name = "cantilever convergence (Timoshenko tip deflection)";
    check.threshold = 0.10;

    const double length = 1.0;
    const double width = 0.1;
    const double load = 10.0;
    const Material material{"Myocardium", 1e6, 0.3, 2000.0};

    const Lame lame = lame_from_young_poisson(material.young_modulus, material.poisson_ratio);
    const double inertia = width * width * width * width / 12.0;
    const double area = width * width;
    const double kappa = 10.0 * (1.0 + material.poisson_ratio) / (12.0 + 11.0 * material.poisson_ratio);
    const double analytic = load * length * length * length / (3.0 * material.young_modulus * inertia)
        + load * length / (kappa * lame.mu * area);

    const int refinements[3][3] = {{16, 2, 2}, {32, 5, 5}, {64, 10, 10}};
    double errors[3];
    std::ostringstream os;
    for (int r = 0; r < 3; ++r) {
        const double tip = -cantilever_tip_deflection(refinements[r][0], refinements[r][1],
                                                      refinements[r][2], length, width, material,
                                                      load);
        errors[r] = std::abs(tip - analytic) / analytic;
        os << "refinement " << r + 1 << ": tip " << tip << " m, error " << errors[r] << "; ";
    }
    os << "analytic " << analytic << " m";

    const bool monotone = errors[0] >= errors[1] && errors[1] >= errors[2];
    check.measured = errors[2];
    check.passed = monotone && errors[2] <= check.threshold;
    check.detail = os.str() + (monotone ? "" : " [NOT MONOTONE]");
    return check;
}

CheckResult rigid_body_nullspace()
{
    CheckResult check;
    check.name = "rigid-body nullspace";
    check.threshold = 1e-9;

    const Material heart{"Myocardium", 1e6, 0.3, 2000.0};
    Assembled a = assemble_bar({0.4, 0.3, 0.2, 4, 3, 2}, heart);

    Vec3 centroid = Vec3::Zero();
    for (const auto& node : a.mesh.nodes) centroid += node.position;
    centroid /= a.mesh.num_nodes();

    const double k_norm = a.stiffness.frobenius_norm();
    double worst = 0.0;
    for (int mode = 0; mode < 6; ++mode) {
        std::vector<double> u(static_cast<std::size_t>(3 * a.mesh.num_nodes()), 0.0);
        for (int i = 0; i < a.mesh.num_nodes(); ++i) {
            Vec3 v = Vec3::Zero();
            if (mode < 3) {
                v[mode] = 1.0;
            } else {
                Vec3 omega = Vec3::Zero();
                omega[mode - 3] = 1.0;
                v = omega.cross(a.mesh.nodes[static_cast<std::size_t>(i)].position - centroid);
            }
            for (int c = 0; c < 3; ++c) u[static_cast<std::size_t>(dof_index(i, c))] = v[c];
        }
        const std::vector<double> ku = a.stiffness.multiply(u);
        worst = std::max(worst, norm2(ku) / (k_norm * norm2(u)));
    }
    check.measured = worst;
    check.passed = worst <= check.threshold;
    check.detail = "max ||K u_rb|| / (||K||_F ||u_rb||) over 6 modes";
    return check;
}

CheckResult ramp_linearity()
{
    CheckResult check;
    check.name = "ramp linearity (10-step load proportionality)";

    const Material heart{"Myocardium", 1e6, 0.3, 2000.0};
    Assembled a = assemble_bar({0.1, 0.02, 0.02, 8, 2, 2}, heart);

    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2);
    patches[0].total_force = Vec3(0.1, 0.2, -0.4);

    const std::vector<double> load = assemble_traction(a.mesh, patches);
    const SparseSystem system = apply_dirichlet(a.stiffness, load, resolve_dirichlet(a.mesh, sets));

    SolverSettings settings;
    settings.tolerance = 1e-10;
    check.threshold = 10.0 * settings.tolerance;

    const RunResults results = run_time_loop(system, TimeSchedule{0.5, 0.05}, settings);
    const auto& last = results.steps.back().displacement;
    double u_scale = 0.0;
    for (double v : last) u_scale = std::max(u_scale, std::abs(v));

    double worst = 0.0;
    const int n_steps = static_cast<int>(results.steps.size());
    for (int k = 1; k <= n_steps; ++k) {
        const double factor = static_cast<double>(k) / n_steps;
        const auto& uk = results.steps[static_cast<std::size_t>(k - 1)].displacement;
        for (std::size_t i = 0; i < uk.size(); ++i) {
            worst = std::max(worst, std::abs(uk[i] - factor * last[i]) / u_scale);
        }
    }
    check.measured = worst;
    check.passed = worst <= check.threshold;
    check.detail = "max |u_k - (k/N) u_N| / max|u_N|";
    return check;
}

} // namespace

std::vector<CheckResult> run_verification_suite(std::ostream* log)
{
    std::vector<CheckResult> results;
    results.push_back(patch_test());
    results.push_back(uniaxial_bar());
    results.push_back(cantilever_convergence());
    results.push_back(rigid_body_nullspace());
    results.push_back(ramp_linearity());

    if (log) {
        for (const auto& r : results) {
            *log << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": measured " << r.measured
                 << " (threshold " << r.threshold << ") " << r.detail << "\n";
        }
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results)
{
    for (const auto& r : results) {
        if (!r.passed) return false;
    }
    return true;
}

} // namespace tfem
