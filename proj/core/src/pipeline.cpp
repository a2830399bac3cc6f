#include "thoraxfem/pipeline.hpp"

#include "thoraxfem/errors.hpp"
#include "thoraxfem/msh_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>

namespace tfem {

std::vector<SummaryRow> RunArtifacts::summary_rows() const
{
    std::vector<SummaryRow> rows;
    for (std::size_t k = 0; k < summaries.size(); ++k) {
        for (const auto& s : summaries[k]) {
            SummaryRow row;
            row.step = static_cast<int>(k) + 1;
            row.time = results.steps[k].time;
            row.summary = s;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

bool RunArtifacts::step_requested(int step_1based) const
{
    const auto& out = scenario.output;
    switch (out.steps_mode) {
    case OutputRequest::StepsMode::All:
        return true;
    case OutputRequest::StepsMode::Last:
        return step_1based == static_cast<int>(results.steps.size());
    case OutputRequest::StepsMode::List:
        return std::find(out.steps.begin(), out.steps.end(), step_1based) != out.steps.end();
    }
    return false;
}

Mesh build_mesh(const Scenario& scenario)
{
    if (const auto* path = std::get_if<std::filesystem::path>(&scenario.mesh_source)) {
        return load_msh(*path, scenario.unit_scale);
    }
    if (const auto* bar = std::get_if<BarSpec>(&scenario.mesh_source)) {
        return gen_bar(*bar);
    }
    return gen_thorax_phantom(std::get<ThoraxPhantomSpec>(scenario.mesh_source));
}

RegionBinding bind_materials(const Mesh& mesh, const Scenario& scenario)
{
    RegionBinding binding;
    const MaterialTable catalog = builtin_material_table();

    std::set<int> region_tags;
    for (const auto& tet : mesh.tets) region_tags.insert(tet.region_tag);

    std::set<std::string> used_keys;
    for (int tag : region_tags) {
        std::string region_name;
        const auto name_it = mesh.region_names.find(tag);
        if (name_it != mesh.region_names.end()) region_name = name_it->second;

        const MaterialAssignment* assignment = nullptr;
        std::string key;
        if (!region_name.empty() && scenario.materials.count(region_name)) {
            key = region_name;
            assignment = &scenario.materials.at(region_name);
        } else if (scenario.materials.count(std::to_string(tag))) {
            key = std::to_string(tag);
            assignment = &scenario.materials.at(std::to_string(tag));
        }
        if (!key.empty()) used_keys.insert(key);

        Material material;
        bool voided = false;
        if (assignment) {
            switch (assignment->kind) {
            case MaterialAssignment::Kind::Void:
                voided = true;
                break;
            case MaterialAssignment::Kind::Catalog:
                material = catalog.lookup(assignment->catalog_key);
                break;
            case MaterialAssignment::Kind::Inline:
                material = assignment->inline_material;
                break;
            }
        } else if (region_name == "CAVITY") {
            if (scenario.cavity_policy == CavityPolicy::Void) {
                voided = true;
            } else {
                material = cavity_filler_material();
            }
        } else {
            throw ConfigError("region tag " + std::to_string(tag)
                              + (region_name.empty() ? "" : " (" + region_name + ")")
                              + " has no material assignment and is not voided");
        }

        if (voided) {
            binding.stiffness.voided.push_back(tag);
        } else {
            validate_material(material);
            binding.stiffness.elasticity[tag] = elasticity_matrix(material);
            binding.materials[tag] = material;
        }
    }

    for (const auto& [key, value] : scenario.materials) {
        if (!used_keys.count(key)) {
            binding.warnings.push_back("material assignment '" + key
                                       + "' matches no region in the mesh");
        }
    }
    return binding;
}

namespace {

Vec3 report_axis(const Scenario& scenario)
{
    for (const auto& patch : scenario.tractions) {
        if (patch.total_force && patch.total_force->norm() > 0) {
            return patch.total_force->normalized();
        }
    }
    return Vec3::UnitZ();
}

} // namespace

RunArtifacts run_scenario(const Scenario& scenario, std::ostream* log)
{
    RunArtifacts art;
    art.scenario = scenario;
    art.mesh = build_mesh(scenario);

    RegionBinding binding = bind_materials(art.mesh, scenario);
    art.regions = std::move(binding.stiffness);
    art.region_materials = std::move(binding.materials);
    art.warnings = std::move(binding.warnings);
    art.active = active_tets(art.mesh, art.regions);

    const CsrMatrix stiffness = assemble_stiffness(art.mesh, art.regions);
    const std::vector<double> load = assemble_traction(art.mesh, scenario.tractions);
    const std::vector<DofConstraint> constraints =
        resolve_dirichlet(art.mesh, scenario.dirichlet, &art.warnings);
    art.system = apply_dirichlet(stiffness, load, constraints);

    if (log) {
        *log << "mesh: " << art.mesh.num_nodes() << " nodes, " << art.mesh.num_tets() << " tets, "
             << art.mesh.num_facets() << " facets\n"
             << "system: " << art.system.reduced_matrix.n << " free DOFs ("
             << art.system.constraints.size() << " constrained, "
             << art.system.inactive_dofs.size() << " inactive), "
             << art.system.reduced_matrix.nnz() << " nonzeros\n";
        for (const auto& w : art.warnings) *log << "warning: " << w << "\n";
    }

    art.results = run_time_loop(art.system, scenario.schedule, scenario.solver);
    art.normal_axis = report_axis(scenario);

    art.summaries.reserve(art.results.steps.size());
    for (std::size_t k = 0; k < art.results.steps.size(); ++k) {
        const auto& step = art.results.steps[k];
        if (log) {
            *log << "step " << (k + 1) << ": t = " << step.time
                 << " s, load factor " << step.load_factor << ", " << step.stats.iterations
                 << " CG iterations, residual " << step.stats.final_residual << "\n";
        }
        const StressField field =
            recover_stress(art.mesh, art.regions, art.active, step.displacement, art.normal_axis);
        art.summaries.push_back(region_summary(art.mesh, art.active, step.displacement, field));
    }
    return art;
}

void write_outputs(const RunArtifacts& art, const std::filesystem::path& out_dir)
{
    std::filesystem::create_directories(out_dir);

    for (std::size_t k = 0; k < art.results.steps.size(); ++k) {
        const int step_no = static_cast<int>(k) + 1;
        if (!art.step_requested(step_no)) continue;
        const auto& step = art.results.steps[k];

        const StressField field =
            recover_stress(art.mesh, art.regions, art.active, step.displacement, art.normal_axis);

        VtkStepFields fields;
        char title[160];
        std::snprintf(title, sizeof(title),
                      "thoraxfem %s step %d t=%.17g s normal_axis=(%.17g,%.17g,%.17g)",
                      art.scenario.name.c_str(), step_no, step.time, art.normal_axis.x(),
                      art.normal_axis.y(), art.normal_axis.z());
        fields.title = title;
        if (art.scenario.output.displacement) fields.displacement = step.displacement;
        if (art.scenario.output.von_mises) {
            fields.von_mises = nodal_average(art.mesh, field.von_mises, art.active);
        }
        if (art.scenario.output.normal_stress) {
            fields.normal_stress = nodal_average(art.mesh, field.normal, art.active);
        }

        std::ofstream out(out_dir / ("step_" + std::to_string(step_no) + ".vtk"),
                          std::ios::binary);
        if (!out) throw ExportError("cannot write VTK step file in '" + out_dir.string() + "'");
        write_vtk(art.mesh, fields, out);
    }

    {
        std::ofstream out(out_dir / "summary.csv", std::ios::binary);
        if (!out) throw ExportError("cannot write summary.csv in '" + out_dir.string() + "'");
        write_summary_csv(art.summary_rows(), out);
    }

    {
        nlohmann::ordered_json meta;
        meta["scenario"] = art.scenario.name;
        meta["steps"] = art.results.steps.size();
        meta["t_end_s"] = art.scenario.schedule.t_end;
        meta["dt_s"] = art.scenario.schedule.dt;
        meta["normal_stress_axis"] = {art.normal_axis.x(), art.normal_axis.y(),
                                      art.normal_axis.z()};
        meta["nodes"] = art.mesh.num_nodes();
        meta["tets"] = art.mesh.num_tets();
        std::ofstream out(out_dir / "meta.json", std::ios::binary);
        if (!out) throw ExportError("cannot write meta.json in '" + out_dir.string() + "'");
        out << meta.dump(2) << "\n";
    }
}

} // namespace tfem
