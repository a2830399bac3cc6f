#pragma once

#include "thoraxfem/assembly.hpp"
#include "thoraxfem/materials.hpp"
#include "thoraxfem/phantom.hpp"
#include "thoraxfem/solver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace tfem {

enum class CavityPolicy { Void, Filler };

// Near-incompressible soft filler assigned to the CAVITY region under
// the "filler" policy.
Material cavity_filler_material();

struct MaterialAssignment {
    enum class Kind { Catalog, Inline, Void };
    Kind kind = Kind::Catalog;
    std::string catalog_key;
    Material inline_material;
};

struct OutputRequest {
    enum class StepsMode { All, Last, List };
    StepsMode steps_mode = StepsMode::All;
    std::vector<int> steps; // used in List mode, 1-based
    bool displacement = true;
    bool von_mises = true;
    bool normal_stress = true;
};

struct Scenario {
    std::string name = "scenario";
    std::variant<std::filesystem::path, BarSpec, ThoraxPhantomSpec> mesh_source;
    double unit_scale = 1.0;
    std::map<std::string, MaterialAssignment> materials; // region name or tag string
    CavityPolicy cavity_policy = CavityPolicy::Void;
    std::vector<DirichletSet> dirichlet;
    std::vector<TractionPatch> tractions;
    TimeSchedule schedule;
    SolverSettings solver;
    OutputRequest output;
};

// Strict parse of the documented schema; unknown keys are rejected
// with the offending JSON path. Defaults: tolerance 1e-8, Jacobi
// preconditioner, cavity void, all steps and fields.
Scenario parse_scenario(const std::string& json_text, const std::string& default_name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

// Canonical serialization; parse_scenario(scenario_to_json(s)) == s.
std::string scenario_to_json(const Scenario& scenario);

// CPR phantom scenario with the default geometry: back face and
// myocardium patch fixed, ramped sternum traction over 0.5 s in
// 0.05 s steps.
Scenario default_phantom_scenario(double force_newtons = 450.0);

} // namespace tfem
