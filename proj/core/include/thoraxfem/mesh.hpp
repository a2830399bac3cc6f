#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tfem {

using Vec3 = Eigen::Vector3d;

// Degenerate-volume thresholds: absolute floor for SI meters plus a
// relative floor against the mean tet volume of the mesh at hand.
inline constexpr double kVolumeFloorAbs = 1e-18;
inline constexpr double kVolumeFloorRel = 1e-12;

struct Node {
    int id = 0; // original (file) id, 1-based
    Vec3 position = Vec3::Zero();
};

struct Tet4 {
    std::array<int, 4> nodes{}; // internal 0-based indices
    int region_tag = 0;
};

struct Tri3 {
    std::array<int, 3> nodes{};
    int facet_tag = 0;
};

struct Mesh {
    std::vector<Node> nodes;
    std::vector<Tet4> tets;
    std::vector<Tri3> facets;
    std::map<std::string, std::vector<int>> node_sets; // sorted indices
    std::map<int, std::string> region_names;
    std::map<int, std::string> facet_names;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_tets() const { return static_cast<int>(tets.size()); }
    int num_facets() const { return static_cast<int>(facets.size()); }

    // Name lookups return -1 when absent.
    int region_tag_by_name(const std::string& name) const;
    int facet_tag_by_name(const std::string& name) const;
};

double tet_volume_signed(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);
double tet_volume(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3);
double tet_volume(const Mesh& mesh, const Tet4& tet);

struct TriGeometry {
    double area = 0.0;
    Vec3 normal = Vec3::Zero(); // unit; zero vector when degenerate
    bool degenerate = false;
};

TriGeometry tri_area_normal(const Vec3& p0, const Vec3& p1, const Vec3& p2);
TriGeometry tri_area_normal(const Mesh& mesh, const Tri3& tri);

struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& p) const
    {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y()
            && p.z() >= lo.z() && p.z() <= hi.z();
    }
};

// Node selections return sorted unique internal indices. An empty
// result is legal; callers decide whether to warn.
std::vector<int> select_nodes_box(const Mesh& mesh, const Box& box);
std::vector<int> select_nodes_region(const Mesh& mesh, int region_tag);
std::vector<int> select_nodes_facet(const Mesh& mesh, int facet_tag);

// Swaps nodes 2 and 3 of every negatively oriented tet. Returns the
// number of tets that were flipped.
int fix_tet_orientation(Mesh& mesh);

// Volume below which a tet counts as degenerate, given the mesh mean.
double degenerate_volume_threshold(double mean_tet_volume);

struct ValidationReport {
    std::size_t node_count = 0;
    std::size_t tet_count = 0;
    std::size_t facet_count = 0;
    double total_volume = 0.0;
    double min_tet_volume = 0.0;
    double max_tet_volume = 0.0;
    std::size_t degenerate_tets = 0;
    std::size_t unreferenced_nodes = 0;
    std::size_t dangling_references = 0;
    std::size_t negative_tets = 0;
    bool valid = false;

    std::string to_string() const;
};

ValidationReport validate_mesh(const Mesh& mesh);

} // namespace tfem
