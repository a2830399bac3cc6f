#pragma once

#include "thoraxfem/mesh.hpp"
#include "thoraxfem/stress.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tfem {

// Nodal fields for one exported step. Absent optionals are skipped.
struct VtkStepFields {
    std::optional<std::vector<double>> displacement; // 3 per node
    std::optional<std::vector<double>> von_mises;    // 1 per node
    std::optional<std::vector<double>> normal_stress;
    std::string title = "thoraxfem";
};

// VTK legacy ASCII 3.0 unstructured grid: tet cells, point data as
// given, region tags as cell data. Fixed %.17g formatting keeps
// repeated exports byte-identical.
void write_vtk(const Mesh& mesh, const VtkStepFields& fields, std::ostream& out);
std::string write_vtk(const Mesh& mesh, const VtkStepFields& fields);

struct SummaryRow {
    int step = 0;
    double time = 0.0;
    RegionSummary summary;
};

// RFC 4180 CSV (CRLF, quoting where required), one row per region per
// step, preceded by the fixed header.
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
std::string write_summary_csv(const std::vector<SummaryRow>& rows);

} // namespace tfem
