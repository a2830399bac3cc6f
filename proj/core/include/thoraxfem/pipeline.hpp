#pragma once

#include "thoraxfem/export.hpp"
#include "thoraxfem/scenario.hpp"
#include "thoraxfem/solver.hpp"
#include "thoraxfem/stress.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

namespace tfem {

struct RunArtifacts {
    Scenario scenario;
    Mesh mesh;
    RegionStiffness regions;
    std::map<int, Material> region_materials; // active regions only
    std::vector<char> active;
    SparseSystem system;
    RunResults results;
    Vec3 normal_axis = Vec3::UnitZ(); // report axis for "normal stress"
    std::vector<std::string> warnings;

    // Summaries for every step, region-ordered.
    std::vector<std::vector<RegionSummary>> summaries;

    std::vector<SummaryRow> summary_rows() const;
    bool step_requested(int step_1based) const;
};

// Mesh construction including unit scaling (file sources only;
// generated meshes are already in meters).
Mesh build_mesh(const Scenario& scenario);

// Region tag -> material binding honoring the cavity policy and "void"
// assignments. Throws ConfigError for unmapped regions.
struct RegionBinding {
    RegionStiffness stiffness;
    std::map<int, Material> materials;
    std::vector<std::string> warnings;
};
RegionBinding bind_materials(const Mesh& mesh, const Scenario& scenario);

// Full pipeline: mesh, assembly, constraint elimination, ramped time
// loop, stress recovery and per-region summaries. `log` receives
// per-step solver stats when given.
RunArtifacts run_scenario(const Scenario& scenario, std::ostream* log = nullptr);

// step_<k>.vtk for requested steps plus summary.csv and meta.json.
void write_outputs(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

} // namespace tfem
