#include "thoraxfem/errors.hpp"
#include "thoraxfem/msh_io.hpp"
#include "thoraxfem/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tfem;

namespace {

std::filesystem::path scenario_dir()
{
    return THORAXFEM_SCENARIO_DIR;
}

std::filesystem::path temp_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "thoraxfem_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("bar_uniaxial scenario reproduces the closed-form bar answer")
{
    const Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    const RunArtifacts art = run_scenario(sc);

    // p L / E with p = F/A = 0.4 N / 4e-4 m^2, L = 0.1 m, E = 1e6 Pa.
    const double expected = 1e-4;
    REQUIRE(art.summaries.size() == 10);
    const auto& final_summary = art.summaries.back();
    REQUIRE(final_summary.size() == 1);
    CHECK(final_summary[0].max_displacement == doctest::Approx(expected).epsilon(1e-8));

    SUBCASE("summary rows scale linearly along the ramp")
    {
        const auto rows = art.summary_rows();
        REQUIRE(rows.size() == 10);
        const double at_step5 = rows[4].summary.max_displacement;
        const double at_step10 = rows[9].summary.max_displacement;
        CHECK(at_step5 == doctest::Approx(0.5 * at_step10).epsilon(1e-10));
    }
    SUBCASE("outputs land on disk per the request")
    {
        const auto out = temp_dir("bar_outputs");
        write_outputs(art, out);
        CHECK(std::filesystem::exists(out / "summary.csv"));
        CHECK(std::filesystem::exists(out / "meta.json"));
        // steps: "last" -> only step_10.vtk
        CHECK(std::filesystem::exists(out / "step_10.vtk"));
        CHECK(!std::filesystem::exists(out / "step_1.vtk"));

        const std::string csv = slurp(out / "summary.csv");
        std::size_t lines = 0;
        for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) {
            ++lines;
        }
        CHECK(lines == 11); // header + 10 steps x 1 region
    }
}

TEST_CASE("deterministic reruns produce byte-identical outputs")
{
    const Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    const auto out_a = temp_dir("det_a");
    const auto out_b = temp_dir("det_b");
    write_outputs(run_scenario(sc), out_a);
    write_outputs(run_scenario(sc), out_b);
    for (const auto& entry : std::filesystem::directory_iterator(out_a)) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(slurp(entry.path()) == slurp(out_b / name));
    }
}

TEST_CASE("unmapped regions are a configuration error")
{
    Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    sc.materials.clear();
    CHECK_THROWS_AS(run_scenario(sc), ConfigError);
}

TEST_CASE("materials can be keyed by numeric tag")
{
    Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    const MaterialAssignment assignment = sc.materials.at("BAR");
    sc.materials.clear();
    sc.materials["1"] = assignment; // BAR region has tag 1
    const RunArtifacts art = run_scenario(sc);
    CHECK(art.summaries.back()[0].max_displacement == doctest::Approx(1e-4).epsilon(1e-8));
}

TEST_CASE("cavity policy switches between void and filler")
{
    Scenario sc = default_phantom_scenario();
    auto& spec = std::get<ThoraxPhantomSpec>(sc.mesh_source);
    spec.h = 0.02; // coarse for speed
    sc.solver.tolerance = 1e-6;
    sc.schedule = TimeSchedule{0.05, 0.05}; // single step

    SUBCASE("void leaves interior cavity DOFs inactive")
    {
        sc.cavity_policy = CavityPolicy::Void;
        const RunArtifacts art = run_scenario(sc);
        CHECK(!art.region_materials.count(phantom_region::kCavity));
        for (const auto& step_summaries : art.summaries) {
            for (const auto& s : step_summaries) CHECK(s.region_tag != phantom_region::kCavity);
        }
    }
    SUBCASE("filler assigns the soft near-incompressible material")
    {
        sc.cavity_policy = CavityPolicy::Filler;
        const RunArtifacts art = run_scenario(sc);
        REQUIRE(art.region_materials.count(phantom_region::kCavity));
        CHECK(art.region_materials.at(phantom_region::kCavity).young_modulus == 5e3);
        CHECK(art.region_materials.at(phantom_region::kCavity).poisson_ratio == 0.49);
        CHECK(art.system.inactive_dofs.empty());
    }
}

TEST_CASE("unit_scale converts file meshes into meters")
{
    // The same unit tet written in millimetres.
    const char* mm_tet = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 100 0 0
3 0 100 0
4 0 0 100
$EndNodes
$Elements
1
1 4 2 1 1 1 2 3 4
$EndElements
)";
    const auto dir = temp_dir("unit_scale");
    {
        std::ofstream out(dir / "tet_mm.msh");
        out << mm_tet;
    }
    Scenario sc;
    sc.mesh_source = dir / "tet_mm.msh";
    sc.unit_scale = 1e-3;
    const Mesh mesh = build_mesh(sc);
    CHECK(tet_volume(mesh, mesh.tets[0]) == doctest::Approx(1e-3 / 6.0).epsilon(1e-12));
}

TEST_CASE("run warnings surface empty selections and unused materials")
{
    Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    MaterialAssignment unused;
    unused.kind = MaterialAssignment::Kind::Catalog;
    unused.catalog_key = "bones";
    sc.materials["GHOST_REGION"] = unused;
    DirichletSet empty;
    empty.select = Selector::make_box({Vec3(5, 5, 5), Vec3(6, 6, 6)});
    sc.dirichlet.push_back(empty);

    const RunArtifacts art = run_scenario(sc);
    bool unused_warning = false, empty_warning = false;
    for (const auto& w : art.warnings) {
        if (w.find("GHOST_REGION") != std::string::npos) unused_warning = true;
        if (w.find("selects no nodes") != std::string::npos) empty_warning = true;
    }
    CHECK(unused_warning);
    CHECK(empty_warning);
}

TEST_CASE("normal stress axis follows the applied load direction")
{
    const Scenario sc = load_scenario(scenario_dir() / "bar_uniaxial.json");
    const RunArtifacts art = run_scenario(sc);
    CHECK(art.normal_axis.x() == doctest::Approx(1.0));
    CHECK(art.normal_axis.y() == doctest::Approx(0.0));
    CHECK(art.normal_axis.z() == doctest::Approx(0.0));
}
