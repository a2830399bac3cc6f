#include "thoraxfem/errors.hpp"
#include "thoraxfem/materials.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace tfem;

TEST_CASE("Lame parameters from E and nu")
{
    SUBCASE("heart material")
    {
        const Lame lame = lame_from_young_poisson(1e6, 0.3);
        CHECK(lame.mu == doctest::Approx(3.846153846e5).epsilon(1e-9));
        CHECK(lame.lambda == doctest::Approx(5.769230769e5).epsilon(1e-9));
    }
    SUBCASE("bone material")
    {
        const Lame lame = lame_from_young_poisson(2e9, 0.2);
        CHECK(lame.mu == doctest::Approx(8.3333333e8).epsilon(1e-7));
        CHECK(lame.lambda == doctest::Approx(5.5555556e8).epsilon(1e-7));
    }
    SUBCASE("nu = 0 decouples")
    {
        const Lame lame = lame_from_young_poisson(123.0, 0.0);
        CHECK(lame.lambda == 0.0);
        CHECK(lame.mu == doctest::Approx(61.5));
    }
    SUBCASE("inadmissible ratios throw")
    {
        CHECK_THROWS_AS(lame_from_young_poisson(1e6, 0.5), MaterialError);
        CHECK_THROWS_AS(lame_from_young_poisson(1e6, 0.75), MaterialError);
        CHECK_THROWS_AS(lame_from_young_poisson(1e6, -1.0), MaterialError);
        CHECK_THROWS_AS(lame_from_young_poisson(0.0, 0.3), MaterialError);
        CHECK_THROWS_AS(lame_from_young_poisson(-5.0, 0.3), MaterialError);
    }
}

TEST_CASE("round trip E, nu <-> lambda, mu")
{
    const double cases[][2] = {{1e6, 0.3}, {2e9, 0.2}, {9e4, 0.2}, {4e7, 0.3},
                               {5e3, 0.49}, {1.0, -0.5}, {7.5e8, 0.01}};
    for (const auto& c : cases) {
        const Lame lame = lame_from_young_poisson(c[0], c[1]);
        CHECK(young_from_lame(lame) == doctest::Approx(c[0]).epsilon(1e-12));
        CHECK(poisson_from_lame(lame) == doctest::Approx(c[1]).epsilon(1e-12));
    }
}

TEST_CASE("elasticity matrix structure")
{
    SUBCASE("lambda = 0 gives diag(2,2,2,1,1,1) * mu")
    {
        const Mat6 d = elasticity_matrix(0.0, 1.0);
        Mat6 expected = Mat6::Zero();
        expected.diagonal() << 2, 2, 2, 1, 1, 1;
        CHECK((d - expected).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("heart diagonal entry is lambda + 2 mu")
    {
        const Lame lame = lame_from_young_poisson(1e6, 0.3);
        const Mat6 d = elasticity_matrix(lame.lambda, lame.mu);
        CHECK(d(0, 0) == doctest::Approx(1.3461538e6).epsilon(1e-7));
        CHECK(d(0, 0) == doctest::Approx(lame.lambda + 2 * lame.mu).epsilon(1e-14));
        CHECK(d(3, 3) == doctest::Approx(lame.mu).epsilon(1e-14));
        CHECK(d(0, 1) == doctest::Approx(lame.lambda).epsilon(1e-14));
    }
    SUBCASE("symmetric by construction")
    {
        const Mat6 d = elasticity_matrix(2.0, 3.0);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("catalog materials match the organ table")
{
    const MaterialTable table = builtin_material_table();

    const auto& myo = table.lookup("myocardium");
    CHECK(myo.young_modulus == 1e6);
    CHECK(myo.poisson_ratio == 0.3);
    CHECK(myo.density == 2000.0);
    CHECK(myo.name == "Myocardium");

    const auto& bones = table.lookup("bones");
    CHECK(bones.young_modulus == 2e9);
    CHECK(bones.poisson_ratio == 0.2);
    CHECK(bones.density == 1000.0);

    const auto& soft = table.lookup("soft_tissue");
    CHECK(soft.young_modulus == 9e4);
    CHECK(soft.poisson_ratio == 0.2);
    CHECK(soft.density == 1000.0);
    CHECK(soft.name == "Soft tissue");

    CHECK(table.lookup("cartilage_group_1").young_modulus == 9e6);
    CHECK(table.lookup("cartilage_group_2").young_modulus == 8e7);
    CHECK(table.lookup("cartilage_group_3").young_modulus == 7e7);
    CHECK(table.lookup("cartilage_group_4").young_modulus == 4e7);
    CHECK(table.lookup("cartilage_group_4").name == "Cartilage 6L, 6R, 7L, 7R, 8L, 8R");
    for (int g = 1; g <= 4; ++g) {
        const auto& cart = table.lookup("cartilage_group_" + std::to_string(g));
        CHECK(cart.poisson_ratio == 0.3);
        CHECK(cart.density == 1100.0);
    }

    CHECK_THROWS_AS(table.lookup("adamantium"), MaterialError);
}

TEST_CASE("every catalog elasticity matrix is positive definite")
{
    // Independent check through a dense eigensolver.
    const MaterialTable table = builtin_material_table();
    for (const auto& [key, material] : table.entries()) {
        const Mat6 d = elasticity_matrix(material);
        Eigen::SelfAdjointEigenSolver<Mat6> eig(d);
        CAPTURE(key);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
}
