#include "thoraxfem/errors.hpp"
#include "thoraxfem/msh_io.hpp"
#include "thoraxfem/pipeline.hpp"
#include "thoraxfem/verification.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

std::filesystem::path output_root(const std::string& cli_value)
{
    if (!cli_value.empty()) return cli_value;
    if (const char* env = std::getenv("THORAX_FEM_OUT"); env && *env) return env;
    return "out";
}

void apply_paper_load(tfem::Scenario& scenario)
{
    // Rescales every force patch to the nominal 1e6 N magnitude,
    // keeping its direction.
    for (auto& patch : scenario.tractions) {
        if (patch.total_force && patch.total_force->norm() > 0) {
            patch.total_force = patch.total_force->normalized() * 1e6;
        }
    }
}

void print_summary_table(const tfem::RunArtifacts& art)
{
    if (art.summaries.empty()) return;
    const auto& last = art.summaries.back();
    std::printf("final region summary (t = %g s):\n", art.results.steps.back().time);
    std::printf("  %-14s %13s %13s %13s %13s %13s %13s\n", "region", "max|u| [m]", "mean|u| [m]",
                "max vm [Pa]", "mean vm [Pa]", "max n [Pa]", "min n [Pa]");
    for (const auto& s : last) {
        std::printf("  %-14s %13.6e %13.6e %13.6e %13.6e %13.6e %13.6e\n", s.region_name.c_str(),
                    s.max_displacement, s.mean_displacement, s.max_von_mises, s.mean_von_mises,
                    s.max_normal, s.min_normal);
    }
}

int cmd_run(const std::string& scenario_path, const std::string& out_root_cli, bool paper_load)
{
    tfem::Scenario scenario = tfem::load_scenario(scenario_path);
    if (paper_load) {
        apply_paper_load(scenario);
        std::cout << "note: --paper-load rescaled traction patches to 1e6 N\n";
    }

    const tfem::RunArtifacts art = tfem::run_scenario(scenario, &std::cout);
    const std::filesystem::path out_dir = output_root(out_root_cli) / scenario.name;
    tfem::write_outputs(art, out_dir);
    print_summary_table(art);
    std::cout << "wrote outputs to " << out_dir.string() << "\n";
    return kExitSuccess;
}

int cmd_phantom(const std::string& spec_path, const std::string& out_root_cli, bool paper_load)
{
    tfem::ThoraxPhantomSpec spec;
    tfem::Scenario scenario;
    if (!spec_path.empty()) {
        // A scenario file whose mesh source is a phantom spec.
        scenario = tfem::load_scenario(spec_path);
        if (!std::holds_alternative<tfem::ThoraxPhantomSpec>(scenario.mesh_source)) {
            throw tfem::ConfigError("phantom: scenario '" + spec_path
                                    + "' does not use a thorax_phantom mesh source");
        }
        spec = std::get<tfem::ThoraxPhantomSpec>(scenario.mesh_source);
    } else {
        scenario = tfem::default_phantom_scenario();
        spec = std::get<tfem::ThoraxPhantomSpec>(scenario.mesh_source);
    }
    if (paper_load) apply_paper_load(scenario);

    const tfem::Mesh mesh = tfem::gen_thorax_phantom(spec);
    const tfem::ValidationReport report = tfem::validate_mesh(mesh);

    const std::filesystem::path out_dir = output_root(out_root_cli) / "phantom";
    std::filesystem::create_directories(out_dir);
    tfem::save_msh(mesh, out_dir / "phantom.msh");

    {
        std::ofstream scenario_out(out_dir / "phantom_scenario.json");
        scenario_out << tfem::scenario_to_json(scenario);
    }

    std::cout << report.to_string();
    std::map<int, double> region_volume;
    for (const auto& tet : mesh.tets) {
        region_volume[tet.region_tag] += tet_volume(mesh, tet);
    }
    std::cout << "region volumes [m^3]:\n";
    for (const auto& [tag, volume] : region_volume) {
        const auto it = mesh.region_names.find(tag);
        std::printf("  %-14s %12.6e\n",
                    (it != mesh.region_names.end() ? it->second : std::to_string(tag)).c_str(),
                    volume);
    }
    std::cout << "wrote " << (out_dir / "phantom.msh").string() << " and companion scenario\n";
    return report.valid ? kExitSuccess : kExitNumerical;
}

int cmd_benchmark()
{
    const auto results = tfem::run_verification_suite(&std::cout);
    return tfem::all_passed(results) ? kExitSuccess : kExitNumerical;
}

int cmd_validate(const std::string& mesh_path)
{
    const tfem::Mesh mesh = tfem::load_msh(mesh_path);
    const tfem::ValidationReport report = tfem::validate_mesh(mesh);
    std::cout << report.to_string();
    return report.valid ? kExitSuccess : kExitNumerical;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"thorax_fem: linear-elasticity FEM engine for chest-compression scenarios"};
    app.require_subcommand(1);

    bool deterministic = true;
    int threads = 1;
    app.add_flag("--deterministic,!--no-deterministic", deterministic,
                 "Fixed-order assembly and reductions (default on)");
    app.add_option("--threads", threads, "Worker threads for matrix-vector products")
        ->check(CLI::PositiveNumber);

    std::string scenario_path;
    std::string out_root;
    bool paper_load = false;

    auto* run = app.add_subcommand("run", "Run a scenario and export VTK/CSV results");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("-o,--out", out_root, "Output root directory (default: $THORAX_FEM_OUT or ./out)");
    run->add_flag("--paper-load", paper_load, "Rescale traction patches to the nominal 1e6 N");

    std::string phantom_spec;
    auto* phantom = app.add_subcommand("phantom", "Generate the thorax phantom mesh (MSH 2.2)");
    phantom->add_option("--spec", phantom_spec, "Scenario JSON providing the phantom spec");
    phantom->add_option("-o,--out", out_root, "Output root directory");
    phantom->add_flag("--paper-load", paper_load,
                      "Record the 1e6 N load in the companion scenario");

    auto* benchmark = app.add_subcommand("benchmark", "Run the built-in verification suite");

    std::string mesh_path;
    auto* validate = app.add_subcommand("validate-mesh", "Parse and validate an MSH file");
    validate->add_option("mesh", mesh_path, "MSH 2.2 ASCII file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (deterministic && threads > 1) {
        std::cerr << "error: --threads > 1 requires --no-deterministic\n";
        return kExitUsage;
    }
    tfem::set_num_threads(threads);

    try {
        if (run->parsed()) return cmd_run(scenario_path, out_root, paper_load);
        if (phantom->parsed()) return cmd_phantom(phantom_spec, out_root, paper_load);
        if (benchmark->parsed()) return cmd_benchmark();
        if (validate->parsed()) return cmd_validate(mesh_path);
    } catch (const tfem::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tfem::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tfem::IntegrityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tfem::MaterialError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tfem::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
