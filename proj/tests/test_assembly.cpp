#include "thoraxfem/assembly.hpp"
#include "thoraxfem/errors.hpp"
#include "thoraxfem/phantom.hpp"
#include "thoraxfem/solver.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace tfem;

namespace {

const Vec3 kUnitTet[4] = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

Eigen::Matrix<double, 12, 1> nodal_field(const Vec3 (&p)[4], auto field)
{
    Eigen::Matrix<double, 12, 1> u;
    for (int i = 0; i < 4; ++i) u.segment<3>(3 * i) = field(p[i]);
    return u;
}

Mat6 heart_elasticity()
{
    return elasticity_matrix(Material{"Myocardium", 1e6, 0.3, 2000.0});
}

Eigen::MatrixXd dense(const CsrMatrix& m)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m.n, m.n);
    for (int i = 0; i < m.n; ++i) {
        for (std::int64_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            d(i, m.col_idx[k]) = m.values[k];
        }
    }
    return d;
}

} // namespace

TEST_CASE("strain-displacement matrix reproduces linear fields")
{
    const StrainDisplacement sd =
        strain_displacement(kUnitTet[0], kUnitTet[1], kUnitTet[2], kUnitTet[3]);
    CHECK(sd.volume == doctest::Approx(1.0 / 6.0).epsilon(1e-14));

    SUBCASE("u_x = x gives unit axial strain")
    {
        const auto u = nodal_field(kUnitTet, [](const Vec3& p) { return Vec3(p.x(), 0, 0); });
        const Vec6 strain = sd.B * u;
        CHECK(strain[0] == doctest::Approx(1.0).epsilon(1e-13));
        for (int i = 1; i < 6; ++i) CHECK(strain[i] == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("rigid translation is strain free")
    {
        const auto u = nodal_field(kUnitTet, [](const Vec3&) { return Vec3(0.3, -0.2, 0.9); });
        CHECK((sd.B * u).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-13));
    }
    SUBCASE("linearized rotation is strain free")
    {
        const Vec3 omega(0.4, -0.1, 0.7);
        const auto u = nodal_field(kUnitTet, [&](const Vec3& p) { return omega.cross(p); });
        CHECK((sd.B * u).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("shear field populates the engineering shear row")
    {
        // u_x = y: gamma_xy = 1, everything else 0.
        const auto u = nodal_field(kUnitTet, [](const Vec3& p) { return Vec3(p.y(), 0, 0); });
        const Vec6 strain = sd.B * u;
        CHECK(strain[3] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(strain[0]) + std::abs(strain[1]) + std::abs(strain[2])
                  + std::abs(strain[4]) + std::abs(strain[5])
              < 1e-13);
    }
    SUBCASE("degenerate tet throws")
    {
        CHECK_THROWS_AS(
            strain_displacement(kUnitTet[0], kUnitTet[1], kUnitTet[2], Vec3(0.5, 0.5, 0.0)),
            GeometryError);
    }
}

TEST_CASE("element stiffness properties")
{
    const StrainDisplacement sd =
        strain_displacement(kUnitTet[0], kUnitTet[1], kUnitTet[2], kUnitTet[3]);
    const Mat12 ke = element_stiffness(sd.B, heart_elasticity(), sd.volume);

    SUBCASE("bitwise symmetric")
    {
        for (int i = 0; i < 12; ++i) {
            for (int j = 0; j < 12; ++j) CHECK(ke(i, j) == ke(j, i));
        }
    }
    SUBCASE("rigid modes span the nullspace")
    {
        const double scale = ke.cwiseAbs().maxCoeff();
        for (int mode = 0; mode < 6; ++mode) {
            Eigen::Matrix<double, 12, 1> u;
            for (int i = 0; i < 4; ++i) {
                Vec3 v;
                if (mode < 3) {
                    v = Vec3::Unit(mode);
                } else {
                    v = Vec3::Unit(mode - 3).cross(kUnitTet[i]);
                }
                u.segment<3>(3 * i) = v;
            }
            CHECK((ke * u).cwiseAbs().maxCoeff() < 1e-9 * scale);
        }
        Eigen::SelfAdjointEigenSolver<Mat12> eig(ke);
        int near_zero = 0;
        for (int i = 0; i < 12; ++i) {
            if (std::abs(eig.eigenvalues()[i]) < 1e-9 * scale) ++near_zero;
        }
        CHECK(near_zero == 6);
    }
    SUBCASE("strain energy of uniform axial strain on two elements")
    {
        // Constrained uniaxial strain eps along x: energy density
        // (lambda + 2 mu) eps^2 / 2 regardless of the element shapes.
        const Mesh bar = gen_bar({1.0, 1.0, 1.0, 1, 1, 1});
        const Lame lame = lame_from_young_poisson(1e6, 0.3);
        const double eps = 1e-3;

        double energy = 0.0;
        double volume = 0.0;
        for (int e = 0; e < 2; ++e) {
            const auto& tet = bar.tets[e];
            const StrainDisplacement esd = strain_displacement(bar, tet);
            const Mat12 eke = element_stiffness(esd.B, heart_elasticity(), esd.volume);
            Eigen::Matrix<double, 12, 1> u;
            for (int i = 0; i < 4; ++i) {
                u.segment<3>(3 * i) = Vec3(eps * bar.nodes[tet.nodes[i]].position.x(), 0, 0);
            }
            energy += 0.5 * u.dot(eke * u);
            volume += esd.volume;
        }
        const double analytic = 0.5 * (lame.lambda + 2 * lame.mu) * eps * eps * volume;
        CHECK(energy == doctest::Approx(analytic).epsilon(1e-10));
    }
}

TEST_CASE("assemble_stiffness scatters a single element")
{
    Mesh mesh;
    for (int i = 0; i < 4; ++i) mesh.nodes.push_back({i + 1, kUnitTet[i]});
    mesh.tets.push_back({{0, 1, 2, 3}, 1});

    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    const CsrMatrix k = assemble_stiffness(mesh, regions);

    const StrainDisplacement sd =
        strain_displacement(kUnitTet[0], kUnitTet[1], kUnitTet[2], kUnitTet[3]);
    const Mat12 ke = element_stiffness(sd.B, heart_elasticity(), sd.volume);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            CHECK(k.at(i, j) == doctest::Approx(ke(i, j)).epsilon(1e-14));
        }
    }
}

TEST_CASE("assemble_stiffness keeps disjoint tets uncoupled")
{
    Mesh mesh;
    for (int i = 0; i < 4; ++i) mesh.nodes.push_back({i + 1, kUnitTet[i]});
    for (int i = 0; i < 4; ++i) mesh.nodes.push_back({i + 5, kUnitTet[i] + Vec3(10, 0, 0)});
    mesh.tets.push_back({{0, 1, 2, 3}, 1});
    mesh.tets.push_back({{4, 5, 6, 7}, 1});

    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    const CsrMatrix k = assemble_stiffness(mesh, regions);
    for (int a = 0; a < 12; ++a) {
        for (int b = 12; b < 24; ++b) {
            CHECK(k.find(a, b) == nullptr);
            CHECK(k.find(b, a) == nullptr);
        }
    }
}

TEST_CASE("assembled stiffness annihilates rigid translations")
{
    const Mesh mesh = gen_bar({0.4, 0.3, 0.2, 3, 2, 2});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    const CsrMatrix k = assemble_stiffness(mesh, regions);

    std::vector<double> u(3 * mesh.num_nodes());
    for (int c = 0; c < 3; ++c) {
        std::fill(u.begin(), u.end(), 0.0);
        for (int i = 0; i < mesh.num_nodes(); ++i) u[dof_index(i, c)] = 1.0;
        const std::vector<double> ku = k.multiply(u);
        CHECK(norm2(ku) < 1e-9 * k.frobenius_norm() * norm2(u));
    }
    CHECK(k.max_asymmetry() <= 1e-9 * k.max_abs());
}

TEST_CASE("assemble_stiffness rejects unmapped regions")
{
    Mesh mesh;
    for (int i = 0; i < 4; ++i) mesh.nodes.push_back({i + 1, kUnitTet[i]});
    mesh.tets.push_back({{0, 1, 2, 3}, 5});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CHECK_THROWS_AS(assemble_stiffness(mesh, regions), ConfigError);

    regions.voided.push_back(5);
    const CsrMatrix k = assemble_stiffness(mesh, regions); // voided: zero rows
    CHECK(k.nnz() == 0);
}

TEST_CASE("traction on a single facet splits in equal thirds")
{
    Mesh mesh;
    mesh.nodes.push_back({1, Vec3(0, 0, 0)});
    mesh.nodes.push_back({2, Vec3(1, 0, 0)});
    mesh.nodes.push_back({3, Vec3(0, 1, 0)});
    mesh.facets.push_back({{0, 1, 2}, 4});

    TractionPatch patch;
    patch.select = Selector::make_facet(4);
    patch.total_force = Vec3(0, 0, -9.0);
    const std::vector<double> f = assemble_traction(mesh, {patch});
    for (int i = 0; i < 3; ++i) {
        CHECK(f[dof_index(i, 0)] == 0.0);
        CHECK(f[dof_index(i, 1)] == 0.0);
        CHECK(f[dof_index(i, 2)] == doctest::Approx(-3.0).epsilon(1e-14));
    }
}

TEST_CASE("nominal CPR load produces the implied traction magnitude")
{
    // 1e6 N over 498.68 mm^2 comes out near 2.0053e9 Pa.
    const double area = 498.68e-6;
    const double leg = std::sqrt(2.0 * area);
    Mesh mesh;
    mesh.nodes.push_back({1, Vec3(0, 0, 0)});
    mesh.nodes.push_back({2, Vec3(leg, 0, 0)});
    mesh.nodes.push_back({3, Vec3(0, leg, 0)});
    mesh.facets.push_back({{0, 1, 2}, 1});

    TractionPatch patch;
    patch.select = Selector::make_facet(1);
    patch.total_force = Vec3(0, 0, -1e6);
    const std::vector<double> f = assemble_traction(mesh, {patch});

    double total = 0.0;
    for (int i = 0; i < 3; ++i) total += f[dof_index(i, 2)];
    const double patch_area = tri_area_normal(mesh, mesh.facets[0]).area;
    CHECK(total == doctest::Approx(-1e6).epsilon(1e-12));
    CHECK(std::abs(total) / patch_area == doctest::Approx(2.0053e9).epsilon(1e-4));
}

TEST_CASE("traction edge cases")
{
    const Mesh mesh = gen_bar({1.0, 1.0, 1.0, 2, 2, 2});

    SUBCASE("zero force gives a zero vector")
    {
        TractionPatch patch;
        patch.select = Selector::make_facet(2);
        patch.total_force = Vec3::Zero();
        const auto f = assemble_traction(mesh, {patch});
        CHECK(*std::max_element(f.begin(), f.end()) == 0.0);
        CHECK(*std::min_element(f.begin(), f.end()) == 0.0);
    }
    SUBCASE("patch force sums to the requested total")
    {
        TractionPatch patch;
        patch.select = Selector::make_facet(2);
        patch.total_force = Vec3(3.0, -2.0, 0.5);
        const auto f = assemble_traction(mesh, {patch});
        Vec3 total = Vec3::Zero();
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            for (int c = 0; c < 3; ++c) total[c] += f[dof_index(i, c)];
        }
        CHECK(total.x() == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(total.y() == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(total.z() == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("pressure mode pushes along facet normals")
    {
        TractionPatch patch;
        patch.select = Selector::make_facet(6); // +z face, outward normal +z
        patch.pressure = 100.0;
        const auto f = assemble_traction(mesh, {patch});
        Vec3 total = Vec3::Zero();
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            for (int c = 0; c < 3; ++c) total[c] += f[dof_index(i, c)];
        }
        CHECK(total.z() == doctest::Approx(100.0).epsilon(1e-12)); // p * area(1 m^2)
        CHECK(total.x() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("empty facet selection is a configuration error")
    {
        TractionPatch patch;
        patch.select = Selector::make_facet(42);
        patch.total_force = Vec3(1, 0, 0);
        CHECK_THROWS_AS(assemble_traction(mesh, {patch}), ConfigError);
    }
    SUBCASE("exactly one of force and pressure")
    {
        TractionPatch patch;
        patch.select = Selector::make_facet(2);
        CHECK_THROWS_AS(assemble_traction(mesh, {patch}), ConfigError);
        patch.total_force = Vec3(1, 0, 0);
        patch.pressure = 5.0;
        CHECK_THROWS_AS(assemble_traction(mesh, {patch}), ConfigError);
    }
}

TEST_CASE("apply_dirichlet with no constraints keeps the system")
{
    const Mesh mesh = gen_bar({1.0, 1.0, 1.0, 1, 1, 1});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);
    std::vector<double> f(3 * mesh.num_nodes(), 1.0);

    const SparseSystem sys = apply_dirichlet(k, f, {});
    CHECK(sys.reduced_matrix.n == 3 * mesh.num_nodes());
    CHECK(sys.constraints.empty());
    CHECK(sys.inactive_dofs.empty());
    CHECK(sys.reduced_load == f);
    for (int i = 0; i < sys.total_dofs; ++i) CHECK(sys.dof_to_free[i] == i);
}

TEST_CASE("apply_dirichlet constraining everything yields the prescribed field")
{
    const Mesh mesh = gen_bar({1.0, 1.0, 1.0, 1, 1, 1});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);
    std::vector<double> f(3 * mesh.num_nodes(), 0.0);

    std::vector<DofConstraint> constraints;
    for (int d = 0; d < 3 * mesh.num_nodes(); ++d) {
        constraints.push_back({d, 0.01 * d});
    }
    const SparseSystem sys = apply_dirichlet(k, f, constraints);
    CHECK(sys.reduced_matrix.n == 0);
    const std::vector<double> u = sys.expand({});
    for (int d = 0; d < sys.total_dofs; ++d) CHECK(u[d] == doctest::Approx(0.01 * d));
}

TEST_CASE("reduced stiffness is positive definite once a face is fixed")
{
    // Dense eigen-decomposition on a small system.
    const Mesh mesh = gen_bar({0.2, 0.1, 0.1, 2, 1, 1});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);
    std::vector<double> f(3 * mesh.num_nodes(), 0.0);

    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);
    const SparseSystem sys = apply_dirichlet(k, f, resolve_dirichlet(mesh, sets));

    REQUIRE(sys.reduced_matrix.n <= 300);
    const Eigen::MatrixXd kd = dense(sys.reduced_matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kd);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK((kd - kd.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * kd.cwiseAbs().maxCoeff());
}

TEST_CASE("nonzero prescribed values lift into the load")
{
    // Pull one end of a bar to a prescribed displacement and solve;
    // the interior must interpolate linearly (patch exactness).
    const Mesh mesh = gen_bar({1.0, 0.5, 0.5, 4, 2, 2});
    RegionStiffness regions;
    regions.elasticity[1] = elasticity_matrix(Material{"m", 1e6, 0.0, 1000.0});
    CsrMatrix k = assemble_stiffness(mesh, regions);
    std::vector<double> f(3 * mesh.num_nodes(), 0.0);

    const double pull = 0.01;
    std::vector<DirichletSet> sets(2);
    sets[0].select = Selector::make_facet(1);
    sets[1].select = Selector::make_facet(2);
    sets[1].value = Vec3(pull, 0, 0);
    const SparseSystem sys = apply_dirichlet(k, f, resolve_dirichlet(mesh, sets));

    SolverSettings settings;
    settings.tolerance = 1e-13;
    const CgResult result = cg_solve(sys.reduced_matrix, sys.reduced_load, settings);
    const std::vector<double> u = sys.expand(result.u);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const double expected = pull * mesh.nodes[i].position.x();
        CHECK(u[dof_index(i, 0)] == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("load on a stiffness-free DOF is rejected")
{
    Mesh mesh;
    for (int i = 0; i < 4; ++i) mesh.nodes.push_back({i + 1, kUnitTet[i]});
    mesh.nodes.push_back({5, Vec3(5, 5, 5)}); // not part of any element
    mesh.tets.push_back({{0, 1, 2, 3}, 1});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);

    std::vector<double> f(3 * mesh.num_nodes(), 0.0);
    f[dof_index(4, 2)] = 1.0;
    CHECK_THROWS_AS(apply_dirichlet(k, f, {}), ConfigError);

    f[dof_index(4, 2)] = 0.0;
    const SparseSystem sys = apply_dirichlet(k, f, {});
    CHECK(sys.inactive_dofs.size() == 3);
}

TEST_CASE("conflicting Dirichlet prescriptions are rejected")
{
    const Mesh mesh = gen_bar({1.0, 1.0, 1.0, 1, 1, 1});
    std::vector<DirichletSet> sets(2);
    sets[0].select = Selector::make_facet(1);
    sets[0].value = Vec3(0, 0, 0);
    sets[1].select = Selector::make_facet(1);
    sets[1].value = Vec3(1e-3, 0, 0);
    CHECK_THROWS_AS(resolve_dirichlet(mesh, sets), ConfigError);
}

TEST_CASE("empty Dirichlet selection warns without failing")
{
    const Mesh mesh = gen_bar({1.0, 1.0, 1.0, 1, 1, 1});
    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_box({Vec3(9, 9, 9), Vec3(10, 10, 10)});
    std::vector<std::string> warnings;
    const auto constraints = resolve_dirichlet(mesh, sets, &warnings);
    CHECK(constraints.empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("selects no nodes") != std::string::npos);
}

TEST_CASE("patch test: linear boundary field is reproduced in the interior")
{
    const Mesh mesh = gen_bar({1.0, 0.8, 0.6, 4, 3, 3});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);
    std::vector<double> f(3 * mesh.num_nodes(), 0.0);

    Eigen::Matrix3d grad;
    grad << 1e-3, 2e-3, -1e-3,
            0.5e-3, -2e-3, 1.5e-3,
            -0.5e-3, 1e-3, 2e-3;
    const Vec3 shift(1e-3, -1e-3, 2e-3);
    auto exact = [&](const Vec3& p) -> Vec3 { return shift + grad * p; };

    std::set<int> boundary;
    for (const auto& tri : mesh.facets) boundary.insert(tri.nodes.begin(), tri.nodes.end());
    std::vector<DofConstraint> constraints;
    for (int node : boundary) {
        const Vec3 u = exact(mesh.nodes[node].position);
        for (int c = 0; c < 3; ++c) constraints.push_back({dof_index(node, c), u[c]});
    }
    const SparseSystem sys = apply_dirichlet(k, f, constraints);

    SolverSettings settings;
    settings.tolerance = 1e-14;
    const CgResult result = cg_solve(sys.reduced_matrix, sys.reduced_load, settings);
    const std::vector<double> u = sys.expand(result.u);

    double scale = 0.0;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        scale = std::max(scale, exact(mesh.nodes[i].position).norm());
    }
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (boundary.count(i)) continue;
        const Vec3 ue = exact(mesh.nodes[i].position);
        const Vec3 uh(u[dof_index(i, 0)], u[dof_index(i, 1)], u[dof_index(i, 2)]);
        CHECK((uh - ue).norm() / scale < 1e-10);
    }
}

TEST_CASE("global equilibrium: reactions balance applied loads")
{
    const Mesh mesh = gen_bar({1.0, 0.2, 0.2, 8, 2, 2});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2);
    patches[0].total_force = Vec3(2.0, 1.0, -3.0);
    const std::vector<double> f = assemble_traction(mesh, patches);

    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);
    const SparseSystem sys = apply_dirichlet(k, f, resolve_dirichlet(mesh, sets));

    SolverSettings settings;
    settings.tolerance = 1e-12;
    const CgResult result = cg_solve(sys.reduced_matrix, sys.reduced_load, settings);
    const std::vector<double> u = sys.expand(result.u);

    const std::vector<double> reactions = sys.reaction_forces(u);
    Vec3 reaction_sum = Vec3::Zero();
    for (std::size_t i = 0; i < sys.constraints.size(); ++i) {
        reaction_sum[sys.constraints[i].dof % 3] += reactions[i];
    }
    Vec3 applied = Vec3::Zero();
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        for (int c = 0; c < 3; ++c) applied[c] += f[dof_index(i, c)];
    }
    CHECK((reaction_sum + applied).norm() <= 1e-8 * applied.norm());
}

TEST_CASE("energy consistency between global and element level")
{
    const Mesh mesh = gen_bar({1.0, 0.3, 0.3, 4, 2, 2});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    CsrMatrix k = assemble_stiffness(mesh, regions);

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2);
    patches[0].total_force = Vec3(1.0, 0.5, 0.25);
    const std::vector<double> f = assemble_traction(mesh, patches);

    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);
    const SparseSystem sys = apply_dirichlet(k, f, resolve_dirichlet(mesh, sets));

    SolverSettings settings;
    settings.tolerance = 1e-13;
    const CgResult result = cg_solve(sys.reduced_matrix, sys.reduced_load, settings);
    const std::vector<double> u = sys.expand(result.u);

    const double global_energy = 0.5 * dot(result.u, sys.reduced_load);
    double element_energy = 0.0;
    for (const auto& tet : mesh.tets) {
        const StrainDisplacement sd = strain_displacement(mesh, tet);
        const Mat12 ke = element_stiffness(sd.B, regions.elasticity.at(1), sd.volume);
        Eigen::Matrix<double, 12, 1> ue;
        for (int i = 0; i < 4; ++i) {
            for (int c = 0; c < 3; ++c) ue[3 * i + c] = u[dof_index(tet.nodes[i], c)];
        }
        element_energy += 0.5 * ue.dot(ke * ue);
    }
    CHECK(element_energy == doctest::Approx(global_energy).epsilon(1e-10));
}

TEST_CASE("element order does not change assembled entries beyond roundoff")
{
    Mesh mesh = gen_bar({0.5, 0.4, 0.3, 3, 2, 2});
    RegionStiffness regions;
    regions.elasticity[1] = heart_elasticity();
    const CsrMatrix k1 = assemble_stiffness(mesh, regions);

    std::mt19937 rng(7);
    std::shuffle(mesh.tets.begin(), mesh.tets.end(), rng);
    fix_tet_orientation(mesh);
    const CsrMatrix k2 = assemble_stiffness(mesh, regions);

    REQUIRE(k1.nnz() == k2.nnz());
    const double scale = k1.max_abs();
    for (std::size_t i = 0; i < k1.values.size(); ++i) {
        CHECK(std::abs(k1.values[i] - k2.values[i]) <= 1e-12 * scale);
    }
}
