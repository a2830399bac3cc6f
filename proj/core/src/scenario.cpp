#include "thoraxfem/scenario.hpp"

#include "thoraxfem/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tfem {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw FormatError("scenario: " + (path.empty() ? std::string("/") : path) + ": " + msg);
}

void expect_object(const json& j, const std::string& path)
{
    if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed)
{
    expect_object(j, path);
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) fail(path + "/" + key, "unknown key");
    }
}

double get_number(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& path)
{
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vec3 get_vec3(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
    Vec3 v;
    for (int c = 0; c < 3; ++c) v[c] = get_number(j[static_cast<std::size_t>(c)], path);
    return v;
}

Box get_box(const json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) {
        fail(path, "expected [[x0,x1],[y0,y1],[z0,z1]]");
    }
    Box box;
    for (int c = 0; c < 3; ++c) {
        const json& range = j[static_cast<std::size_t>(c)];
        if (!range.is_array() || range.size() != 2) fail(path, "expected [lo, hi] per axis");
        box.lo[c] = get_number(range[0], path);
        box.hi[c] = get_number(range[1], path);
        if (box.lo[c] > box.hi[c]) fail(path, "box lo exceeds hi");
    }
    return box;
}

Selector parse_selector(const json& j, const std::string& path)
{
    check_keys(j, path, {"box", "region", "facet", "node_set"});
    if (j.size() != 1) fail(path, "expected exactly one of box/region/facet/node_set");
    if (j.contains("box")) return Selector::make_box(get_box(j["box"], path + "/box"));
    if (j.contains("region")) {
        const json& r = j["region"];
        if (r.is_string()) return Selector::make_region(r.get<std::string>());
        return Selector::make_region(get_int(r, path + "/region"));
    }
    if (j.contains("facet")) {
        const json& r = j["facet"];
        if (r.is_string()) return Selector::make_facet(r.get<std::string>());
        return Selector::make_facet(get_int(r, path + "/facet"));
    }
    return Selector::make_node_set(get_string(j["node_set"], path + "/node_set"));
}

json selector_to_json(const Selector& sel)
{
    json j;
    switch (sel.kind) {
    case Selector::Kind::Box:
        j["box"] = {{sel.box.lo.x(), sel.box.hi.x()},
                    {sel.box.lo.y(), sel.box.hi.y()},
                    {sel.box.lo.z(), sel.box.hi.z()}};
        break;
    case Selector::Kind::Region:
        if (sel.name.empty()) {
            j["region"] = sel.tag;
        } else {
            j["region"] = sel.name;
        }
        break;
    case Selector::Kind::Facet:
        if (sel.name.empty()) {
            j["facet"] = sel.tag;
        } else {
            j["facet"] = sel.name;
        }
        break;
    case Selector::Kind::NodeSet:
        j["node_set"] = sel.name;
        break;
    }
    return j;
}

BarSpec parse_bar_spec(const json& j, const std::string& path)
{
    check_keys(j, path, {"lx", "ly", "lz", "nx", "ny", "nz"});
    BarSpec spec;
    if (j.contains("lx")) spec.lx = get_number(j["lx"], path + "/lx");
    if (j.contains("ly")) spec.ly = get_number(j["ly"], path + "/ly");
    if (j.contains("lz")) spec.lz = get_number(j["lz"], path + "/lz");
    if (j.contains("nx")) spec.nx = get_int(j["nx"], path + "/nx");
    if (j.contains("ny")) spec.ny = get_int(j["ny"], path + "/ny");
    if (j.contains("nz")) spec.nz = get_int(j["nz"], path + "/nz");
    return spec;
}

ThoraxPhantomSpec parse_phantom_spec(const json& j, const std::string& path)
{
    check_keys(j, path,
               {"block", "sternum_size", "sternum_center_x", "sternum_center_y", "sternum_depth",
                "rib_pairs", "rib_thickness_y", "rib_thickness_z", "rib_pitch", "rib_first_y",
                "rib_depth", "rib_side_margin", "cartilage_fraction", "heart_semi_axes",
                "heart_wall", "heart_center_depth", "fixed_patch_angle_deg", "h"});
    ThoraxPhantomSpec spec;
    auto num = [&](const char* key, double& slot) {
        if (j.contains(key)) slot = get_number(j[key], path + "/" + key);
    };
    if (j.contains("block")) spec.block = get_vec3(j["block"], path + "/block");
    if (j.contains("sternum_size")) spec.sternum_size = get_vec3(j["sternum_size"], path + "/sternum_size");
    num("sternum_center_x", spec.sternum_center_x);
    num("sternum_center_y", spec.sternum_center_y);
    num("sternum_depth", spec.sternum_depth);
    if (j.contains("rib_pairs")) spec.rib_pairs = get_int(j["rib_pairs"], path + "/rib_pairs");
    num("rib_thickness_y", spec.rib_thickness_y);
    num("rib_thickness_z", spec.rib_thickness_z);
    num("rib_pitch", spec.rib_pitch);
    num("rib_first_y", spec.rib_first_y);
    num("rib_depth", spec.rib_depth);
    num("rib_side_margin", spec.rib_side_margin);
    num("cartilage_fraction", spec.cartilage_fraction);
    if (j.contains("heart_semi_axes")) {
        spec.heart_semi_axes = get_vec3(j["heart_semi_axes"], path + "/heart_semi_axes");
    }
    num("heart_wall", spec.heart_wall);
    num("heart_center_depth", spec.heart_center_depth);
    num("fixed_patch_angle_deg", spec.fixed_patch_angle_deg);
    num("h", spec.h);
    return spec;
}

MaterialAssignment parse_assignment(const json& j, const std::string& path)
{
    MaterialAssignment a;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "void") {
            a.kind = MaterialAssignment::Kind::Void;
        } else {
            a.kind = MaterialAssignment::Kind::Catalog;
            a.catalog_key = s;
        }
        return a;
    }
    check_keys(j, path, {"name", "E", "nu", "rho"});
    if (!j.contains("E") || !j.contains("nu") || !j.contains("rho")) {
        fail(path, "inline material requires E, nu and rho");
    }
    a.kind = MaterialAssignment::Kind::Inline;
    a.inline_material.name = j.contains("name") ? get_string(j["name"], path + "/name") : "inline";
    a.inline_material.young_modulus = get_number(j["E"], path + "/E");
    a.inline_material.poisson_ratio = get_number(j["nu"], path + "/nu");
    a.inline_material.density = get_number(j["rho"], path + "/rho");
    try {
        validate_material(a.inline_material);
    } catch (const MaterialError& e) {
        fail(path, e.what());
    }
    return a;
}

std::array<bool, 3> parse_components(const std::string& s, const std::string& path)
{
    std::array<bool, 3> out{false, false, false};
    if (s.empty()) fail(path, "components string must not be empty");
    for (char c : s) {
        switch (c) {
        case 'x': out[0] = true; break;
        case 'y': out[1] = true; break;
        case 'z': out[2] = true; break;
        default: fail(path, std::string("invalid component '") + c + "', expected subset of xyz");
        }
    }
    return out;
}

std::string components_to_string(const std::array<bool, 3>& c)
{
    std::string s;
    if (c[0]) s += 'x';
    if (c[1]) s += 'y';
    if (c[2]) s += 'z';
    return s;
}

} // namespace

Material cavity_filler_material()
{
    return {"cavity_filler", 5e3, 0.49, 1000.0};
}

Scenario parse_scenario(const std::string& json_text, const std::string& default_name)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("scenario: invalid JSON: ") + e.what());
    }

    check_keys(root, "", {"name", "mesh", "unit_scale", "materials", "cavity", "dirichlet",
                          "tractions", "schedule", "solver", "output"});

    Scenario sc;
    sc.name = root.contains("name") ? get_string(root["name"], "/name") : default_name;

    if (!root.contains("mesh")) fail("/mesh", "missing");
    {
        const json& mesh = root["mesh"];
        check_keys(mesh, "/mesh", {"file", "bar", "thorax_phantom"});
        if (mesh.size() != 1) fail("/mesh", "expected exactly one of file/bar/thorax_phantom");
        if (mesh.contains("file")) {
            sc.mesh_source = std::filesystem::path(get_string(mesh["file"], "/mesh/file"));
        } else if (mesh.contains("bar")) {
            sc.mesh_source = parse_bar_spec(mesh["bar"], "/mesh/bar");
        } else {
            sc.mesh_source = parse_phantom_spec(mesh["thorax_phantom"], "/mesh/thorax_phantom");
        }
    }

    if (root.contains("unit_scale")) {
        sc.unit_scale = get_number(root["unit_scale"], "/unit_scale");
        if (!(sc.unit_scale > 0)) fail("/unit_scale", "must be positive");
    }

    if (root.contains("materials")) {
        expect_object(root["materials"], "/materials");
        for (const auto& [region, value] : root["materials"].items()) {
            sc.materials[region] = parse_assignment(value, "/materials/" + region);
        }
    }

    if (root.contains("cavity")) {
        const std::string policy = get_string(root["cavity"], "/cavity");
        if (policy == "void") {
            sc.cavity_policy = CavityPolicy::Void;
        } else if (policy == "filler") {
            sc.cavity_policy = CavityPolicy::Filler;
        } else {
            fail("/cavity", "expected \"void\" or \"filler\"");
        }
    }

    if (!root.contains("dirichlet") || !root["dirichlet"].is_array()
        || root["dirichlet"].empty()) {
        fail("/dirichlet", "no Dirichlet set (at least one is required)");
    }
    for (std::size_t i = 0; i < root["dirichlet"].size(); ++i) {
        const std::string path = "/dirichlet/" + std::to_string(i);
        const json& j = root["dirichlet"][i];
        check_keys(j, path, {"select", "components", "value"});
        if (!j.contains("select")) fail(path, "missing select");
        DirichletSet set;
        set.select = parse_selector(j["select"], path + "/select");
        if (j.contains("components")) {
            set.components = parse_components(get_string(j["components"], path + "/components"),
                                              path + "/components");
        }
        if (j.contains("value")) set.value = get_vec3(j["value"], path + "/value");
        sc.dirichlet.push_back(std::move(set));
    }

    if (root.contains("tractions")) {
        if (!root["tractions"].is_array()) fail("/tractions", "expected an array");
        for (std::size_t i = 0; i < root["tractions"].size(); ++i) {
            const std::string path = "/tractions/" + std::to_string(i);
            const json& j = root["tractions"][i];
            check_keys(j, path, {"select", "total_force", "pressure"});
            if (!j.contains("select")) fail(path, "missing select");
            TractionPatch patch;
            patch.select = parse_selector(j["select"], path + "/select");
            if (j.contains("total_force") == j.contains("pressure")) {
                fail(path, "expected exactly one of total_force / pressure");
            }
            if (j.contains("total_force")) {
                patch.total_force = get_vec3(j["total_force"], path + "/total_force");
            } else {
                patch.pressure = get_number(j["pressure"], path + "/pressure");
            }
            sc.tractions.push_back(std::move(patch));
        }
    }

    if (root.contains("schedule")) {
        const json& j = root["schedule"];
        check_keys(j, "/schedule", {"t_end", "dt"});
        if (j.contains("t_end")) sc.schedule.t_end = get_number(j["t_end"], "/schedule/t_end");
        if (j.contains("dt")) sc.schedule.dt = get_number(j["dt"], "/schedule/dt");
    }
    try {
        sc.schedule.steps();
    } catch (const ConfigError& e) {
        fail("/schedule", e.what());
    }

    if (root.contains("solver")) {
        const json& j = root["solver"];
        check_keys(j, "/solver", {"tolerance", "max_iterations", "preconditioner"});
        if (j.contains("tolerance")) {
            sc.solver.tolerance = get_number(j["tolerance"], "/solver/tolerance");
            if (!(sc.solver.tolerance > 0 && sc.solver.tolerance < 1)) {
                fail("/solver/tolerance", "must lie in (0, 1)");
            }
        }
        if (j.contains("max_iterations")) {
            sc.solver.max_iterations = get_int(j["max_iterations"], "/solver/max_iterations");
            if (sc.solver.max_iterations < 0) fail("/solver/max_iterations", "must be >= 0");
        }
        if (j.contains("preconditioner")) {
            const std::string p = get_string(j["preconditioner"], "/solver/preconditioner");
            if (p == "none") {
                sc.solver.preconditioner = Preconditioner::None;
            } else if (p == "jacobi") {
                sc.solver.preconditioner = Preconditioner::Jacobi;
            } else {
                fail("/solver/preconditioner", "expected \"none\" or \"jacobi\"");
            }
        }
    }

    if (root.contains("output")) {
        const json& j = root["output"];
        check_keys(j, "/output", {"steps", "fields"});
        if (j.contains("steps")) {
            const json& s = j["steps"];
            if (s.is_string()) {
                const std::string mode = s.get<std::string>();
                if (mode == "all") {
                    sc.output.steps_mode = OutputRequest::StepsMode::All;
                } else if (mode == "last") {
                    sc.output.steps_mode = OutputRequest::StepsMode::Last;
                } else {
                    fail("/output/steps", "expected \"all\", \"last\" or an array of steps");
                }
            } else if (s.is_array()) {
                sc.output.steps_mode = OutputRequest::StepsMode::List;
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const int step = get_int(s[i], "/output/steps/" + std::to_string(i));
                    if (step < 1) fail("/output/steps", "steps are 1-based");
                    sc.output.steps.push_back(step);
                }
            } else {
                fail("/output/steps", "expected \"all\", \"last\" or an array of steps");
            }
        }
        if (j.contains("fields")) {
            if (!j["fields"].is_array()) fail("/output/fields", "expected an array");
            sc.output.displacement = false;
            sc.output.von_mises = false;
            sc.output.normal_stress = false;
            for (std::size_t i = 0; i < j["fields"].size(); ++i) {
                const std::string f =
                    get_string(j["fields"][i], "/output/fields/" + std::to_string(i));
                if (f == "displacement") {
                    sc.output.displacement = true;
                } else if (f == "von_mises") {
                    sc.output.von_mises = true;
                } else if (f == "normal_stress") {
                    sc.output.normal_stress = true;
                } else {
                    fail("/output/fields", "unknown field '" + f + "'");
                }
            }
        }
    }

    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario not found: '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path.stem().string());
}

Scenario default_phantom_scenario(double force_newtons)
{
    Scenario sc;
    sc.name = "cpr_phantom";
    sc.mesh_source = ThoraxPhantomSpec{};

    auto catalog = [](const std::string& key) {
        MaterialAssignment a;
        a.kind = MaterialAssignment::Kind::Catalog;
        a.catalog_key = key;
        return a;
    };
    sc.materials["SOFT_TISSUE"] = catalog("soft_tissue");
    sc.materials["BONE"] = catalog("bones");
    sc.materials["CARTILAGE_1"] = catalog("cartilage_group_1");
    sc.materials["CARTILAGE_2"] = catalog("cartilage_group_2");
    sc.materials["CARTILAGE_3"] = catalog("cartilage_group_3");
    sc.materials["CARTILAGE_4"] = catalog("cartilage_group_4");
    sc.materials["MYOCARDIUM"] = catalog("myocardium");
    // Blood bulk: the heart is modeled as myocardium plus a
    // near-incompressible cavity filler.
    sc.cavity_policy = CavityPolicy::Filler;

    DirichletSet back;
    back.select = Selector::make_facet(std::string("BACK"));
    sc.dirichlet.push_back(back);
    DirichletSet myo;
    myo.select = Selector::make_node_set("MYO_FIXED");
    sc.dirichlet.push_back(myo);

    TractionPatch sternum;
    sternum.select = Selector::make_facet(std::string("STERNUM_PATCH"));
    sternum.total_force = Vec3(0, 0, -force_newtons);
    sc.tractions.push_back(sternum);

    sc.schedule = TimeSchedule{0.5, 0.05};
    // The soft-tissue / bone stiffness contrast spans four decades;
    // Jacobi-CG needs headroom beyond the auto iteration cap.
    sc.solver.max_iterations = 60000;
    return sc;
}

std::string scenario_to_json(const Scenario& sc)
{
    json root;
    root["name"] = sc.name;

    json mesh;
    if (const auto* path = std::get_if<std::filesystem::path>(&sc.mesh_source)) {
        mesh["file"] = path->string();
    } else if (const auto* bar = std::get_if<BarSpec>(&sc.mesh_source)) {
        mesh["bar"] = {{"lx", bar->lx}, {"ly", bar->ly}, {"lz", bar->lz},
                       {"nx", bar->nx}, {"ny", bar->ny}, {"nz", bar->nz}};
    } else {
        const auto& p = std::get<ThoraxPhantomSpec>(sc.mesh_source);
        mesh["thorax_phantom"] = {
            {"block", {p.block.x(), p.block.y(), p.block.z()}},
            {"sternum_size", {p.sternum_size.x(), p.sternum_size.y(), p.sternum_size.z()}},
            {"sternum_center_x", p.sternum_center_x},
            {"sternum_center_y", p.sternum_center_y},
            {"sternum_depth", p.sternum_depth},
            {"rib_pairs", p.rib_pairs},
            {"rib_thickness_y", p.rib_thickness_y},
            {"rib_thickness_z", p.rib_thickness_z},
            {"rib_pitch", p.rib_pitch},
            {"rib_first_y", p.rib_first_y},
            {"rib_depth", p.rib_depth},
            {"rib_side_margin", p.rib_side_margin},
            {"cartilage_fraction", p.cartilage_fraction},
            {"heart_semi_axes", {p.heart_semi_axes.x(), p.heart_semi_axes.y(), p.heart_semi_axes.z()}},
            {"heart_wall", p.heart_wall},
            {"heart_center_depth", p.heart_center_depth},
            {"fixed_patch_angle_deg", p.fixed_patch_angle_deg},
            {"h", p.h}};
    }
    root["mesh"] = std::move(mesh);
    root["unit_scale"] = sc.unit_scale;

    json materials = json::object();
    for (const auto& [region, a] : sc.materials) {
        switch (a.kind) {
        case MaterialAssignment::Kind::Void:
            materials[region] = "void";
            break;
        case MaterialAssignment::Kind::Catalog:
            materials[region] = a.catalog_key;
            break;
        case MaterialAssignment::Kind::Inline:
            materials[region] = {{"name", a.inline_material.name},
                                 {"E", a.inline_material.young_modulus},
                                 {"nu", a.inline_material.poisson_ratio},
                                 {"rho", a.inline_material.density}};
            break;
        }
    }
    root["materials"] = std::move(materials);
    root["cavity"] = sc.cavity_policy == CavityPolicy::Void ? "void" : "filler";

    json dirichlet = json::array();
    for (const auto& set : sc.dirichlet) {
        json j;
        j["select"] = selector_to_json(set.select);
        j["components"] = components_to_string(set.components);
        j["value"] = {set.value.x(), set.value.y(), set.value.z()};
        dirichlet.push_back(std::move(j));
    }
    root["dirichlet"] = std::move(dirichlet);

    json tractions = json::array();
    for (const auto& patch : sc.tractions) {
        json j;
        j["select"] = selector_to_json(patch.select);
        if (patch.total_force) {
            j["total_force"] = {patch.total_force->x(), patch.total_force->y(),
                                patch.total_force->z()};
        } else if (patch.pressure) {
            j["pressure"] = *patch.pressure;
        }
        tractions.push_back(std::move(j));
    }
    root["tractions"] = std::move(tractions);

    root["schedule"] = {{"t_end", sc.schedule.t_end}, {"dt", sc.schedule.dt}};
    root["solver"] = {
        {"tolerance", sc.solver.tolerance},
        {"max_iterations", sc.solver.max_iterations},
        {"preconditioner", sc.solver.preconditioner == Preconditioner::Jacobi ? "jacobi" : "none"}};

    json output;
    switch (sc.output.steps_mode) {
    case OutputRequest::StepsMode::All: output["steps"] = "all"; break;
    case OutputRequest::StepsMode::Last: output["steps"] = "last"; break;
    case OutputRequest::StepsMode::List: output["steps"] = sc.output.steps; break;
    }
    json fields = json::array();
    if (sc.output.displacement) fields.push_back("displacement");
    if (sc.output.von_mises) fields.push_back("von_mises");
    if (sc.output.normal_stress) fields.push_back("normal_stress");
    output["fields"] = std::move(fields);
    root["output"] = std::move(output);

    return root.dump(2) + "\n";
}

} // namespace tfem
