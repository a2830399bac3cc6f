#include "thoraxfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace tfem {

int Mesh::region_tag_by_name(const std::string& name) const
{
    for (const auto& [tag, n] : region_names) {
        if (n == name) return tag;
    }
    return -1;
}

int Mesh::facet_tag_by_name(const std::string& name) const
{
    for (const auto& [tag, n] : facet_names) {
        if (n == name) return tag;
    }
    return -1;
}

double tet_volume_signed(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3)
{
    return (p1 - p0).cross(p2 - p0).dot(p3 - p0) / 6.0;
}

double tet_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3)
{
    return std::abs(tet_volume_signed(p0, p1, p2, p3));
}

double tet_volume(const Mesh& mesh, const Tet4& tet)
{
    return tet_volume(mesh.nodes[tet.nodes[0]].position, mesh.nodes[tet.nodes[1]].position,
                      mesh.nodes[tet.nodes[2]].position, mesh.nodes[tet.nodes[3]].position);
}

TriGeometry tri_area_normal(const Vec3& p0, const Vec3& p1, const Vec3& p2)
{
    TriGeometry g;
    const Vec3 cross = (p1 - p0).cross(p2 - p0);
    const double norm = cross.norm();
    g.area = 0.5 * norm;
    const double edge_scale = std::max({(p1 - p0).norm(), (p2 - p0).norm(), (p2 - p1).norm()});
    if (norm <= 1e-14 * std::max(edge_scale * edge_scale, 1e-300)) {
        g.degenerate = true;
        g.area = 0.0;
        g.normal = Vec3::Zero();
    } else {
        g.normal = cross / norm;
    }
    return g;
}

TriGeometry tri_area_normal(const Mesh& mesh, const Tri3& tri)
{
    return tri_area_normal(mesh.nodes[tri.nodes[0]].position, mesh.nodes[tri.nodes[1]].position,
                           mesh.nodes[tri.nodes[2]].position);
}

std::vector<int> select_nodes_box(const Mesh& mesh, const Box& box)
{
    std::vector<int> out;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (box.contains(mesh.nodes[i].position)) out.push_back(i);
    }
    return out;
}

namespace {

template <typename Elements>
std::vector<int> nodes_of_tagged(const Elements& elements, int tag, auto tag_of)
{
    std::set<int> out;
    for (const auto& e : elements) {
        if (tag_of(e) == tag) out.insert(e.nodes.begin(), e.nodes.end());
    }
    return {out.begin(), out.end()};
}

} // namespace

std::vector<int> select_nodes_region(const Mesh& mesh, int region_tag)
{
    return nodes_of_tagged(mesh.tets, region_tag, [](const Tet4& t) { return t.region_tag; });
}

std::vector<int> select_nodes_facet(const Mesh& mesh, int facet_tag)
{
    return nodes_of_tagged(mesh.facets, facet_tag, [](const Tri3& t) { return t.facet_tag; });
}

int fix_tet_orientation(Mesh& mesh)
{
    int flipped = 0;
    for (auto& tet : mesh.tets) {
        const double v = tet_volume_signed(
            mesh.nodes[tet.nodes[0]].position, mesh.nodes[tet.nodes[1]].position,
            mesh.nodes[tet.nodes[2]].position, mesh.nodes[tet.nodes[3]].position);
        if (v < 0.0) {
            std::swap(tet.nodes[2], tet.nodes[3]);
            ++flipped;
        }
    }
    return flipped;
}

double degenerate_volume_threshold(double mean_tet_volume)
{
    return std::max(kVolumeFloorAbs, kVolumeFloorRel * mean_tet_volume);
}

ValidationReport validate_mesh(const Mesh& mesh)
{
    ValidationReport r;
    r.node_count = mesh.nodes.size();
    r.tet_count = mesh.tets.size();
    r.facet_count = mesh.facets.size();

    const int n = mesh.num_nodes();
    std::vector<char> referenced(static_cast<std::size_t>(std::max(n, 0)), 0);

    auto check_ref = [&](int idx) {
        if (idx < 0 || idx >= n) {
            ++r.dangling_references;
            return false;
        }
        referenced[static_cast<std::size_t>(idx)] = 1;
        return true;
    };

    std::vector<double> volumes;
    volumes.reserve(mesh.tets.size());
    for (const auto& tet : mesh.tets) {
        bool ok = true;
        for (int ni : tet.nodes) ok = check_ref(ni) && ok;
        if (!ok) continue;
        const double v = tet_volume_signed(
            mesh.nodes[tet.nodes[0]].position, mesh.nodes[tet.nodes[1]].position,
            mesh.nodes[tet.nodes[2]].position, mesh.nodes[tet.nodes[3]].position);
        if (v < 0.0) ++r.negative_tets;
        volumes.push_back(std::abs(v));
        r.total_volume += std::abs(v);
    }
    for (const auto& tri : mesh.facets) {
        for (int ni : tri.nodes) check_ref(ni);
    }

    if (!volumes.empty()) {
        r.min_tet_volume = *std::min_element(volumes.begin(), volumes.end());
        r.max_tet_volume = *std::max_element(volumes.begin(), volumes.end());
        const double mean = r.total_volume / static_cast<double>(volumes.size());
        const double floor = degenerate_volume_threshold(mean);
        for (double v : volumes) {
            if (v < floor) ++r.degenerate_tets;
        }
    }

    for (int i = 0; i < n; ++i) {
        if (!referenced[static_cast<std::size_t>(i)]) ++r.unreferenced_nodes;
    }

    r.valid = r.degenerate_tets == 0 && r.dangling_references == 0 && r.negative_tets == 0;
    return r;
}

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    os << "nodes: " << node_count << "\n"
       << "tets: " << tet_count << "\n"
       << "facets: " << facet_count << "\n"
       << "total volume [m^3]: " << total_volume << "\n"
       << "tet volume min/max [m^3]: " << min_tet_volume << " / " << max_tet_volume << "\n"
       << "degenerate tets: " << degenerate_tets << "\n"
       << "negative tets: " << negative_tets << "\n"
       << "unreferenced nodes: " << unreferenced_nodes << "\n"
       << "dangling references: " << dangling_references << "\n"
       << "valid: " << (valid ? "yes" : "no") << "\n";
    return os.str();
}

} // namespace tfem
