#include "thoraxfem/export.hpp"

#include "thoraxfem/errors.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace tfem {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Quote per RFC 4180: only when the cell contains a comma, a quote or
// a line break.
std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_vtk(const Mesh& mesh, const VtkStepFields& fields, std::ostream& out)
{
    const std::size_t n = mesh.nodes.size();
    auto check_size = [&](const std::optional<std::vector<double>>& f, std::size_t expected,
                          const char* what) {
        if (f && f->size() != expected) {
            throw ExportError(std::string("vtk: ") + what + " field size "
                              + std::to_string(f->size()) + ", expected "
                              + std::to_string(expected));
        }
    };
    check_size(fields.displacement, 3 * n, "displacement");
    check_size(fields.von_mises, n, "von_mises");
    check_size(fields.normal_stress, n, "normal_stress");

    out << "# vtk DataFile Version 3.0\n" << fields.title << "\nASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";

    out << "POINTS " << n << " double\n";
    for (const auto& node : mesh.nodes) {
        out << fmt(node.position.x()) << ' ' << fmt(node.position.y()) << ' '
            << fmt(node.position.z()) << '\n';
    }

    out << "CELLS " << mesh.tets.size() << ' ' << 5 * mesh.tets.size() << '\n';
    for (const auto& tet : mesh.tets) {
        out << "4 " << tet.nodes[0] << ' ' << tet.nodes[1] << ' ' << tet.nodes[2] << ' '
            << tet.nodes[3] << '\n';
    }
    out << "CELL_TYPES " << mesh.tets.size() << '\n';
    for (std::size_t i = 0; i < mesh.tets.size(); ++i) out << "10\n";

    const bool any_point_data = fields.displacement || fields.von_mises || fields.normal_stress;
    if (any_point_data) {
        out << "POINT_DATA " << n << '\n';
        if (fields.displacement) {
            out << "VECTORS displacement double\n";
            for (std::size_t i = 0; i < n; ++i) {
                out << fmt((*fields.displacement)[3 * i]) << ' '
                    << fmt((*fields.displacement)[3 * i + 1]) << ' '
                    << fmt((*fields.displacement)[3 * i + 2]) << '\n';
            }
        }
        if (fields.von_mises) {
            out << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
            for (double v : *fields.von_mises) out << fmt(v) << '\n';
        }
        if (fields.normal_stress) {
            out << "SCALARS normal_stress double 1\nLOOKUP_TABLE default\n";
            for (double v : *fields.normal_stress) out << fmt(v) << '\n';
        }
    }

    out << "CELL_DATA " << mesh.tets.size() << '\n';
    out << "SCALARS region_tag int 1\nLOOKUP_TABLE default\n";
    for (const auto& tet : mesh.tets) out << tet.region_tag << '\n';
}

std::string write_vtk(const Mesh& mesh, const VtkStepFields& fields)
{
    std::ostringstream os;
    write_vtk(mesh, fields, os);
    return os.str();
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out)
{
    out << "step,time_s,region,max_disp_m,mean_disp_m,max_vm_pa,mean_vm_pa,max_normal_pa,"
           "min_normal_pa,loc_max_disp,loc_max_vm\r\n";
    for (const auto& row : rows) {
        const RegionSummary& s = row.summary;
        out << row.step << ',' << fmt(row.time) << ',' << csv_cell(s.region_name) << ','
            << fmt(s.max_displacement) << ',' << fmt(s.mean_displacement) << ','
            << fmt(s.max_von_mises) << ',' << fmt(s.mean_von_mises) << ',' << fmt(s.max_normal)
            << ',' << fmt(s.min_normal) << ',' << s.max_displacement_node << ','
            << s.max_von_mises_element << "\r\n";
    }
}

std::string write_summary_csv(const std::vector<SummaryRow>& rows)
{
    std::ostringstream os;
    write_summary_csv(rows, os);
    return os.str();
}

} // namespace tfem
