#include "thoraxfem/msh_io.hpp"

#include "thoraxfem/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

namespace tfem {

namespace {

struct LineReader {
    std::istream& in;
    std::size_t line_no = 0;

    bool next(std::string& line)
    {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw FormatError("msh: line " + std::to_string(line_no) + ": " + msg);
    }
};

long parse_count(LineReader& reader)
{
    std::string line;
    if (!reader.next(line)) reader.fail("unexpected end of file, expected count");
    std::istringstream is(line);
    long count = -1;
    is >> count;
    if (!is || count < 0) reader.fail("invalid count '" + line + "'");
    return count;
}

void skip_section(LineReader& reader, const std::string& section)
{
    const std::string end = "$End" + section;
    std::string line;
    while (reader.next(line)) {
        if (line == end) return;
    }
    reader.fail("missing " + end);
}

void expect_end(LineReader& reader, const std::string& section)
{
    std::string line;
    if (!reader.next(line) || line != "$End" + section) {
        reader.fail("expected $End" + section);
    }
}

} // namespace

Mesh parse_msh(std::istream& in, double unit_scale)
{
    LineReader reader{in};
    Mesh mesh;
    std::unordered_map<int, int> id_to_index;
    bool have_format = false;
    bool have_nodes = false;

    std::string line;
    while (reader.next(line)) {
        if (line.empty() || line[0] != '$') reader.fail("expected section marker, got '" + line + "'");
        const std::string section = line.substr(1);

        if (section == "MeshFormat") {
            if (!reader.next(line)) reader.fail("truncated $MeshFormat");
            std::istringstream is(line);
            std::string version;
            int file_type = -1, data_size = -1;
            is >> version >> file_type >> data_size;
            if (!is) reader.fail("malformed $MeshFormat line '" + line + "'");
            if (version != "2.2") {
                reader.fail("unsupported MSH version '" + version + "', only 2.2 ASCII is supported");
            }
            if (file_type != 0) reader.fail("binary MSH files are not supported");
            expect_end(reader, "MeshFormat");
            have_format = true;
        } else if (section == "PhysicalNames") {
            const long count = parse_count(reader);
            for (long i = 0; i < count; ++i) {
                if (!reader.next(line)) reader.fail("truncated $PhysicalNames");
                std::istringstream is(line);
                int dim = 0, tag = 0;
                is >> dim >> tag;
                const auto open = line.find('"');
                const auto close = line.rfind('"');
                if (!is || open == std::string::npos || close <= open) {
                    reader.fail("malformed physical name '" + line + "'");
                }
                const std::string name = line.substr(open + 1, close - open - 1);
                if (dim == 3) mesh.region_names[tag] = name;
                if (dim == 2) mesh.facet_names[tag] = name;
            }
            expect_end(reader, "PhysicalNames");
        } else if (section == "Nodes") {
            if (!have_format) reader.fail("$Nodes before $MeshFormat");
            const long count = parse_count(reader);
            mesh.nodes.reserve(static_cast<std::size_t>(count));
            id_to_index.reserve(static_cast<std::size_t>(count));
            for (long i = 0; i < count; ++i) {
                if (!reader.next(line)) reader.fail("truncated $Nodes");
                std::istringstream is(line);
                Node node;
                double x = 0, y = 0, z = 0;
                is >> node.id >> x >> y >> z;
                if (!is) reader.fail("malformed node line '" + line + "'");
                if (node.id < 1) reader.fail("node id must be >= 1");
                if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
                    reader.fail("non-finite node coordinate");
                }
                node.position = Vec3(x, y, z) * unit_scale;
                if (!id_to_index.emplace(node.id, mesh.num_nodes()).second) {
                    reader.fail("duplicate node id " + std::to_string(node.id));
                }
                mesh.nodes.push_back(node);
            }
            expect_end(reader, "Nodes");
            have_nodes = true;
        } else if (section == "Elements") {
            if (!have_nodes) reader.fail("$Elements before $Nodes");
            const long count = parse_count(reader);
            auto resolve = [&](int id) {
                const auto it = id_to_index.find(id);
                if (it == id_to_index.end()) {
                    throw IntegrityError("msh: line " + std::to_string(reader.line_no)
                                         + ": element references undeclared node "
                                         + std::to_string(id));
                }
                return it->second;
            };
            for (long i = 0; i < count; ++i) {
                if (!reader.next(line)) reader.fail("truncated $Elements");
                std::istringstream is(line);
                int eid = 0, type = 0, ntags = 0;
                is >> eid >> type >> ntags;
                if (!is || ntags < 0) reader.fail("malformed element line '" + line + "'");
                int first_tag = 0;
                for (int t = 0; t < ntags; ++t) {
                    int tag = 0;
                    is >> tag;
                    if (t == 0) first_tag = tag;
                }
                if (type == 2) {
                    Tri3 tri;
                    tri.facet_tag = first_tag;
                    for (auto& ni : tri.nodes) {
                        int id = 0;
                        is >> id;
                        if (!is) reader.fail("truncated triangle connectivity");
                        ni = resolve(id);
                    }
                    if (tri.nodes[0] == tri.nodes[1] || tri.nodes[1] == tri.nodes[2]
                        || tri.nodes[0] == tri.nodes[2]) {
                        reader.fail("triangle with repeated node");
                    }
                    mesh.facets.push_back(tri);
                } else if (type == 4) {
                    Tet4 tet;
                    tet.region_tag = first_tag;
                    for (auto& ni : tet.nodes) {
                        int id = 0;
                        is >> id;
                        if (!is) reader.fail("truncated tetrahedron connectivity");
                        ni = resolve(id);
                    }
                    for (int a = 0; a < 4; ++a) {
                        for (int b = a + 1; b < 4; ++b) {
                            if (tet.nodes[a] == tet.nodes[b]) reader.fail("tetrahedron with repeated node");
                        }
                    }
                    mesh.tets.push_back(tet);
                } else {
                    throw UnsupportedElementError(
                        "msh: line " + std::to_string(reader.line_no) + ": unsupported element type "
                        + std::to_string(type) + " (only 2=TRI3 and 4=TET4 are supported)");
                }
            }
            expect_end(reader, "Elements");
        } else {
            skip_section(reader, section);
        }
    }

    if (!have_format) throw FormatError("msh: missing $MeshFormat section");
    if (!have_nodes) throw FormatError("msh: missing $Nodes section");

    fix_tet_orientation(mesh);
    return mesh;
}

Mesh parse_msh(const std::string& text, double unit_scale)
{
    std::istringstream is(text);
    return parse_msh(is, unit_scale);
}

Mesh load_msh(const std::filesystem::path& path, double unit_scale)
{
    std::ifstream in(path);
    if (!in) throw FormatError("msh: cannot open '" + path.string() + "'");
    return parse_msh(in, unit_scale);
}

void write_msh(const Mesh& mesh, std::ostream& out)
{
    char buf[96];
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

    if (!mesh.region_names.empty() || !mesh.facet_names.empty()) {
        out << "$PhysicalNames\n" << mesh.region_names.size() + mesh.facet_names.size() << "\n";
        for (const auto& [tag, name] : mesh.facet_names) {
            out << "2 " << tag << " \"" << name << "\"\n";
        }
        for (const auto& [tag, name] : mesh.region_names) {
            out << "3 " << tag << " \"" << name << "\"\n";
        }
        out << "$EndPhysicalNames\n";
    }

    out << "$Nodes\n" << mesh.nodes.size() << "\n";
    for (const auto& node : mesh.nodes) {
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g\n", node.id, node.position.x(),
                      node.position.y(), node.position.z());
        out << buf;
    }
    out << "$EndNodes\n";

    out << "$Elements\n" << mesh.facets.size() + mesh.tets.size() << "\n";
    long eid = 1;
    for (const auto& tri : mesh.facets) {
        out << eid++ << " 2 2 " << tri.facet_tag << ' ' << tri.facet_tag;
        for (int ni : tri.nodes) out << ' ' << mesh.nodes[ni].id;
        out << '\n';
    }
    for (const auto& tet : mesh.tets) {
        out << eid++ << " 4 2 " << tet.region_tag << ' ' << tet.region_tag;
        for (int ni : tet.nodes) out << ' ' << mesh.nodes[ni].id;
        out << '\n';
    }
    out << "$EndElements\n";
}

std::string write_msh(const Mesh& mesh)
{
    std::ostringstream os;
    write_msh(mesh, os);
    return os.str();
}

void save_msh(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw ExportError("msh: cannot write '" + path.string() + "'");
    write_msh(mesh, out);
}

} // namespace tfem
