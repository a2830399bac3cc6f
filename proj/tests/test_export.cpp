#include "thoraxfem/errors.hpp"
#include "thoraxfem/export.hpp"
#include "thoraxfem/phantom.hpp"

#include <doctest.h>

#include <sstream>

using namespace tfem;

namespace {

Mesh single_tet()
{
    Mesh mesh;
    mesh.nodes.push_back({1, Vec3(0, 0, 0)});
    mesh.nodes.push_back({2, Vec3(1, 0, 0)});
    mesh.nodes.push_back({3, Vec3(0, 1, 0)});
    mesh.nodes.push_back({4, Vec3(0, 0, 1)});
    mesh.tets.push_back({{0, 1, 2, 3}, 7});
    return mesh;
}

VtkStepFields zero_fields(const Mesh& mesh)
{
    VtkStepFields f;
    f.displacement = std::vector<double>(3 * mesh.nodes.size(), 0.0);
    f.von_mises = std::vector<double>(mesh.nodes.size(), 0.0);
    f.normal_stress = std::vector<double>(mesh.nodes.size(), 0.0);
    return f;
}

int count_lines_after(const std::string& text, const std::string& marker)
{
    // Number of consecutive non-header lines following the marker line.
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind(marker, 0) == 0) break;
    }
    int count = 0;
    while (std::getline(is, line)) {
        if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '+')) break;
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("vtk export of a single tet has the documented structure")
{
    const Mesh mesh = single_tet();
    const std::string text = write_vtk(mesh, zero_fields(mesh));

    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("ASCII\n") != std::string::npos);
    CHECK(text.find("DATASET UNSTRUCTURED_GRID\n") != std::string::npos);
    CHECK(text.find("POINTS 4 double\n") != std::string::npos);
    CHECK(text.find("CELLS 1 5\n") != std::string::npos);
    CHECK(text.find("CELL_TYPES 1\n10\n") != std::string::npos);
    CHECK(text.find("POINT_DATA 4\n") != std::string::npos);
    CHECK(text.find("VECTORS displacement double\n") != std::string::npos);
    CHECK(text.find("SCALARS von_mises double 1\n") != std::string::npos);
    CHECK(text.find("SCALARS normal_stress double 1\n") != std::string::npos);
    CHECK(text.find("CELL_DATA 1\n") != std::string::npos);
    CHECK(text.find("SCALARS region_tag int 1\nLOOKUP_TABLE default\n7\n") != std::string::npos);
    // Zero data records.
    CHECK(text.find("0 0 0\n") != std::string::npos);
}

TEST_CASE("vtk displacement record count equals the node count")
{
    const Mesh mesh = gen_bar({1, 1, 1, 2, 1, 1});
    VtkStepFields f;
    f.displacement = std::vector<double>(3 * mesh.nodes.size(), 1.5);
    const std::string text = write_vtk(mesh, f);
    CHECK(count_lines_after(text, "VECTORS displacement double") == mesh.num_nodes());
}

TEST_CASE("vtk export is byte-stable across repeated writes")
{
    const Mesh mesh = gen_bar({0.3, 0.2, 0.1, 2, 2, 1});
    VtkStepFields f;
    std::vector<double> disp(3 * mesh.nodes.size());
    for (std::size_t i = 0; i < disp.size(); ++i) disp[i] = 1e-5 * std::sin(double(i));
    f.displacement = disp;
    CHECK(write_vtk(mesh, f) == write_vtk(mesh, f));
}

TEST_CASE("vtk export rejects mis-sized fields")
{
    const Mesh mesh = single_tet();
    VtkStepFields f;
    f.von_mises = std::vector<double>(3, 0.0);
    CHECK_THROWS_AS(write_vtk(mesh, f), ExportError);
}

TEST_CASE("summary csv header and row layout")
{
    std::vector<SummaryRow> rows;
    for (int step = 1; step <= 10; ++step) {
        for (int region = 1; region <= 5; ++region) {
            SummaryRow row;
            row.step = step;
            row.time = 0.05 * step;
            row.summary.region_tag = region;
            row.summary.region_name = "R" + std::to_string(region);
            rows.push_back(row);
        }
    }
    const std::string text = write_summary_csv(rows);

    CHECK(text.rfind("step,time_s,region,max_disp_m,mean_disp_m,max_vm_pa,mean_vm_pa,"
                     "max_normal_pa,min_normal_pa,loc_max_disp,loc_max_vm\r\n",
                     0)
          == 0);
    // 1 header + 50 data rows, CRLF terminated.
    std::size_t lines = 0;
    for (std::size_t pos = 0; (pos = text.find("\r\n", pos)) != std::string::npos; pos += 2) {
        ++lines;
    }
    CHECK(lines == 51);
}

TEST_CASE("zero-load summaries serialize as zeros")
{
    SummaryRow row;
    row.step = 1;
    row.time = 0.0;
    row.summary.region_name = "BAR";
    const std::string text = write_summary_csv({row});
    CHECK(text.find("1,0,BAR,0,0,0,0,0,0,0,0\r\n") != std::string::npos);
}

TEST_CASE("csv quoting follows RFC 4180 for names with commas and quotes")
{
    SummaryRow row;
    row.step = 1;
    row.time = 0.5;
    row.summary.region_name = "Cartilage 1L, 1R";
    std::string text = write_summary_csv({row});
    CHECK(text.find("\"Cartilage 1L, 1R\"") != std::string::npos);

    row.summary.region_name = "the \"left\" side";
    text = write_summary_csv({row});
    CHECK(text.find("\"the \"\"left\"\" side\"") != std::string::npos);

    row.summary.region_name = "PLAIN";
    text = write_summary_csv({row});
    CHECK(text.find("\"PLAIN\"") == std::string::npos);
}
