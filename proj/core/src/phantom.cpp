#include "thoraxfem/phantom.hpp"

#include "thoraxfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace tfem {

namespace {

struct GridDims {
    int nx = 0, ny = 0, nz = 0;
    double lx = 0, ly = 0, lz = 0;

    int node_index(int i, int j, int k) const { return (k * (ny + 1) + j) * (nx + 1) + i; }

    Vec3 node_position(int i, int j, int k) const
    {
        return {lx * i / nx, ly * j / ny, lz * k / nz};
    }

    std::array<int, 3> node_ijk(int idx) const
    {
        const int i = idx % (nx + 1);
        const int rest = idx / (nx + 1);
        return {i, rest % (ny + 1), rest / (ny + 1)};
    }
};

// Six tets per cell sharing the (0,0,0)-(1,1,1) diagonal; the same
// diagonal in every cell keeps neighboring cells face-conforming.
constexpr int kKuhnTets[6][4][3] = {
    {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}},
    {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {1, 1, 1}},
    {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 1, 1}},
    {{0, 0, 0}, {0, 1, 0}, {0, 1, 1}, {1, 1, 1}},
    {{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}},
    {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}},
};

Mesh structured_grid(const GridDims& g, const std::function<int(const Vec3&)>& region_of)
{
    Mesh mesh;
    mesh.nodes.reserve(static_cast<std::size_t>((g.nx + 1) * (g.ny + 1) * (g.nz + 1)));
    for (int k = 0; k <= g.nz; ++k) {
        for (int j = 0; j <= g.ny; ++j) {
            for (int i = 0; i <= g.nx; ++i) {
                Node node;
                node.id = mesh.num_nodes() + 1;
                node.position = g.node_position(i, j, k);
                mesh.nodes.push_back(node);
            }
        }
    }
    mesh.tets.reserve(static_cast<std::size_t>(6 * g.nx * g.ny * g.nz));
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                for (const auto& local : kKuhnTets) {
                    Tet4 tet;
                    Vec3 centroid = Vec3::Zero();
                    for (int v = 0; v < 4; ++v) {
                        const int ii = i + local[v][0];
                        const int jj = j + local[v][1];
                        const int kk = k + local[v][2];
                        tet.nodes[static_cast<std::size_t>(v)] = g.node_index(ii, jj, kk);
                        centroid += g.node_position(ii, jj, kk);
                    }
                    centroid /= 4.0;
                    tet.region_tag = region_of(centroid);
                    mesh.tets.push_back(tet);
                }
            }
        }
    }
    fix_tet_orientation(mesh);
    return mesh;
}

struct FaceKey {
    std::array<int, 3> sorted;
    bool operator==(const FaceKey& o) const { return sorted == o.sorted; }
};

struct FaceKeyHash {
    std::size_t operator()(const FaceKey& k) const
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (int v : k.sorted) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

struct FaceInfo {
    int count = 0;
    std::array<std::array<int, 3>, 2> oriented{}; // outward from the owning tet
    std::array<int, 2> region{};
};

// Outward face node orders for a positively oriented tet.
constexpr int kTetFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

using FaceMap = std::unordered_map<FaceKey, FaceInfo, FaceKeyHash>;

FaceMap collect_faces(const Mesh& mesh)
{
    FaceMap faces;
    faces.reserve(mesh.tets.size() * 4);
    for (const auto& tet : mesh.tets) {
        for (const auto& f : kTetFaces) {
            std::array<int, 3> oriented{tet.nodes[static_cast<std::size_t>(f[0])],
                                        tet.nodes[static_cast<std::size_t>(f[1])],
                                        tet.nodes[static_cast<std::size_t>(f[2])]};
            FaceKey key{oriented};
            std::sort(key.sorted.begin(), key.sorted.end());
            FaceInfo& info = faces[key];
            if (info.count < 2) {
                info.oriented[static_cast<std::size_t>(info.count)] = oriented;
                info.region[static_cast<std::size_t>(info.count)] = tet.region_tag;
            }
            ++info.count;
        }
    }
    return faces;
}

void emit_boundary_facets(Mesh& mesh, const FaceMap& faces,
                          const std::function<int(const std::array<int, 3>&)>& tag_of)
{
    std::vector<Tri3> boundary;
    for (const auto& [key, info] : faces) {
        if (info.count != 1) continue;
        Tri3 tri;
        tri.nodes = info.oriented[0];
        tri.facet_tag = tag_of(info.oriented[0]);
        boundary.push_back(tri);
    }
    std::sort(boundary.begin(), boundary.end(), [](const Tri3& a, const Tri3& b) {
        auto ka = a.nodes;
        auto kb = b.nodes;
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        return ka < kb;
    });
    mesh.facets.insert(mesh.facets.end(), boundary.begin(), boundary.end());
}

struct AxisBox {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3& p) const
    {
        return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y()
            && p.z() >= lo.z() && p.z() <= hi.z();
    }
};

} // namespace

Mesh gen_bar(const BarSpec& spec)
{
    if (!(spec.lx > 0 && spec.ly > 0 && spec.lz > 0)) {
        throw GeometryError("bar: lengths must be positive");
    }
    if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1) {
        throw GeometryError("bar: subdivisions must be >= 1");
    }

    const GridDims g{spec.nx, spec.ny, spec.nz, spec.lx, spec.ly, spec.lz};
    Mesh mesh = structured_grid(g, [](const Vec3&) { return 1; });
    mesh.region_names[1] = "BAR";

    const FaceMap faces = collect_faces(mesh);
    emit_boundary_facets(mesh, faces, [&](const std::array<int, 3>& nodes) {
        // Structured indices make the face planes exact.
        std::array<std::array<int, 3>, 3> ijk;
        for (int v = 0; v < 3; ++v) ijk[static_cast<std::size_t>(v)] = g.node_ijk(nodes[static_cast<std::size_t>(v)]);
        auto all = [&](int axis, int value) {
            return ijk[0][static_cast<std::size_t>(axis)] == value
                && ijk[1][static_cast<std::size_t>(axis)] == value
                && ijk[2][static_cast<std::size_t>(axis)] == value;
        };
        if (all(0, 0)) return 1;
        if (all(0, g.nx)) return 2;
        if (all(1, 0)) return 3;
        if (all(1, g.ny)) return 4;
        if (all(2, 0)) return 5;
        if (all(2, g.nz)) return 6;
        return 0;
    });
    mesh.facet_names = {{1, "XMIN"}, {2, "XMAX"}, {3, "YMIN"},
                        {4, "YMAX"}, {5, "ZMIN"}, {6, "ZMAX"}};
    return mesh;
}

Mesh gen_thorax_phantom(const ThoraxPhantomSpec& spec)
{
    auto fail = [](const std::string& msg) { throw GeometryError("phantom: " + msg); };

    if (!(spec.h > 0)) fail("resolution h must be positive");
    if (!(spec.block.minCoeff() > 0)) fail("block dimensions must be positive");
    if (spec.rib_pairs < 0) fail("rib count must be >= 0");
    if (!(spec.cartilage_fraction >= 0.0 && spec.cartilage_fraction <= 1.0)) {
        fail("cartilage fraction must lie in [0, 1]");
    }
    if (!(spec.heart_wall > 0 && spec.heart_wall < spec.heart_semi_axes.minCoeff())) {
        fail("shell wall thickness must be positive and below the smallest semi-axis");
    }
    if (!(spec.fixed_patch_angle_deg > 0 && spec.fixed_patch_angle_deg <= 90)) {
        fail("fixed patch angle must lie in (0, 90] degrees");
    }

    const Vec3 heart_center(spec.sternum_center_x, spec.sternum_center_y,
                            spec.block.z() - spec.heart_center_depth);
    const Vec3 outer = spec.heart_semi_axes;
    const Vec3 inner = outer - Vec3::Constant(spec.heart_wall);

    for (int c = 0; c < 3; ++c) {
        if (heart_center[c] - outer[c] < 0 || heart_center[c] + outer[c] > spec.block[c]) {
            fail("heart shell extends outside the block");
        }
    }

    // Bone and cartilage boxes.
    AxisBox sternum;
    sternum.lo = Vec3(spec.sternum_center_x - spec.sternum_size.x() / 2,
                      spec.sternum_center_y - spec.sternum_size.y() / 2,
                      spec.block.z() - spec.sternum_depth - spec.sternum_size.z());
    sternum.hi = Vec3(spec.sternum_center_x + spec.sternum_size.x() / 2,
                      spec.sternum_center_y + spec.sternum_size.y() / 2,
                      spec.block.z() - spec.sternum_depth);

    std::vector<AxisBox> bone_boxes{sternum};
    std::array<std::vector<AxisBox>, 4> cartilage_boxes;

    const double rib_z_hi = spec.block.z() - spec.rib_depth;
    const double rib_z_lo = rib_z_hi - spec.rib_thickness_z;
    const double rib_len = sternum.lo.x() - spec.rib_side_margin;
    if (spec.rib_pairs > 0 && !(rib_len > 0)) fail("ribs do not fit between margin and sternum");
    const double cart_len = spec.cartilage_fraction * rib_len;

    auto cartilage_group = [](int rib_index_1based) {
        if (rib_index_1based <= 1) return 0;
        if (rib_index_1based <= 3) return 1;
        if (rib_index_1based <= 5) return 2;
        return 3;
    };

    for (int r = 0; r < spec.rib_pairs; ++r) {
        const double y0 = spec.rib_first_y + r * spec.rib_pitch;
        const double y1 = y0 + spec.rib_thickness_y;
        const int group = cartilage_group(r + 1);

        AxisBox left_bone{{spec.rib_side_margin, y0, rib_z_lo},
                          {sternum.lo.x() - cart_len, y1, rib_z_hi}};
        AxisBox left_cart{{sternum.lo.x() - cart_len, y0, rib_z_lo}, {sternum.lo.x(), y1, rib_z_hi}};
        AxisBox right_cart{{sternum.hi.x(), y0, rib_z_lo}, {sternum.hi.x() + cart_len, y1, rib_z_hi}};
        AxisBox right_bone{{sternum.hi.x() + cart_len, y0, rib_z_lo},
                           {spec.block.x() - spec.rib_side_margin, y1, rib_z_hi}};
        bone_boxes.push_back(left_bone);
        bone_boxes.push_back(right_bone);
        if (cart_len > 0) {
            cartilage_boxes[static_cast<std::size_t>(group)].push_back(left_cart);
            cartilage_boxes[static_cast<std::size_t>(group)].push_back(right_cart);
        }
    }

    auto check_box = [&](const AxisBox& b, const char* what) {
        for (int c = 0; c < 3; ++c) {
            if (b.lo[c] < -1e-12 || b.hi[c] > spec.block[c] + 1e-12 || b.lo[c] > b.hi[c]) {
                fail(std::string(what) + " box extends outside the block");
            }
        }
        // Closest point of the box to the shell center, in the ellipsoid metric.
        double membership = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double q = std::clamp(heart_center[c], b.lo[c], b.hi[c]) - heart_center[c];
            membership += (q / outer[c]) * (q / outer[c]);
        }
        if (membership < 1.0 - 1e-9) {
            fail(std::string(what) + " box overlaps the heart shell");
        }
    };
    for (const auto& b : bone_boxes) check_box(b, "bone");
    for (const auto& group : cartilage_boxes) {
        for (const auto& b : group) check_box(b, "cartilage");
    }

    auto shell_membership = [](const Vec3& p, const Vec3& center, const Vec3& axes) {
        double m = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double q = (p[c] - center[c]) / axes[c];
            m += q * q;
        }
        return m;
    };

    auto region_of = [&](const Vec3& p) {
        for (const auto& b : bone_boxes) {
            if (b.contains(p)) return phantom_region::kBone;
        }
        for (int group = 0; group < 4; ++group) {
            for (const auto& b : cartilage_boxes[static_cast<std::size_t>(group)]) {
                if (b.contains(p)) return phantom_region::kCartilage1 + group;
            }
        }
        const double m_outer = shell_membership(p, heart_center, outer);
        if (m_outer <= 1.0) {
            const double m_inner = shell_membership(p, heart_center, inner);
            return m_inner <= 1.0 ? phantom_region::kCavity : phantom_region::kMyocardium;
        }
        return phantom_region::kSoftTissue;
    };

    GridDims g;
    g.nx = std::max(1, static_cast<int>(std::lround(spec.block.x() / spec.h)));
    g.ny = std::max(1, static_cast<int>(std::lround(spec.block.y() / spec.h)));
    g.nz = std::max(1, static_cast<int>(std::lround(spec.block.z() / spec.h)));
    g.lx = spec.block.x();
    g.ly = spec.block.y();
    g.lz = spec.block.z();

    Mesh mesh = structured_grid(g, region_of);
    mesh.region_names = {{phantom_region::kSoftTissue, "SOFT_TISSUE"},
                         {phantom_region::kBone, "BONE"},
                         {phantom_region::kCartilage1, "CARTILAGE_1"},
                         {phantom_region::kCartilage2, "CARTILAGE_2"},
                         {phantom_region::kCartilage3, "CARTILAGE_3"},
                         {phantom_region::kCartilage4, "CARTILAGE_4"},
                         {phantom_region::kMyocardium, "MYOCARDIUM"},
                         {phantom_region::kCavity, "CAVITY"}};
    mesh.facet_names = {{phantom_facet::kBack, "BACK"},
                        {phantom_facet::kFront, "FRONT"},
                        {phantom_facet::kSide, "SIDE"},
                        {phantom_facet::kSternumPatch, "STERNUM_PATCH"},
                        {phantom_facet::kShellOuter, "SHELL_OUTER"},
                        {phantom_facet::kShellInner, "SHELL_INNER"}};

    const FaceMap faces = collect_faces(mesh);
    emit_boundary_facets(mesh, faces, [&](const std::array<int, 3>& nodes) {
        std::array<std::array<int, 3>, 3> ijk;
        Vec3 centroid = Vec3::Zero();
        for (int v = 0; v < 3; ++v) {
            ijk[static_cast<std::size_t>(v)] = g.node_ijk(nodes[static_cast<std::size_t>(v)]);
            centroid += mesh.nodes[static_cast<std::size_t>(nodes[static_cast<std::size_t>(v)])].position;
        }
        centroid /= 3.0;
        auto all = [&](int axis, int value) {
            return ijk[0][static_cast<std::size_t>(axis)] == value
                && ijk[1][static_cast<std::size_t>(axis)] == value
                && ijk[2][static_cast<std::size_t>(axis)] == value;
        };
        if (all(2, 0)) return phantom_facet::kBack;
        if (all(2, g.nz)) {
            const bool in_footprint = centroid.x() >= sternum.lo.x() && centroid.x() <= sternum.hi.x()
                && centroid.y() >= sternum.lo.y() && centroid.y() <= sternum.hi.y();
            return in_footprint ? phantom_facet::kSternumPatch : phantom_facet::kFront;
        }
        return phantom_facet::kSide;
    });

    // Myocardium interface facets, oriented away from the shell.
    {
        std::vector<Tri3> shell;
        for (const auto& [key, info] : faces) {
            if (info.count != 2 || info.region[0] == info.region[1]) continue;
            const bool myo0 = info.region[0] == phantom_region::kMyocardium;
            const bool myo1 = info.region[1] == phantom_region::kMyocardium;
            if (myo0 == myo1) continue;
            const int other = myo0 ? info.region[1] : info.region[0];
            Tri3 tri;
            tri.nodes = info.oriented[myo0 ? 0 : 1];
            tri.facet_tag = other == phantom_region::kCavity ? phantom_facet::kShellInner
                                                             : phantom_facet::kShellOuter;
            shell.push_back(tri);
        }
        std::sort(shell.begin(), shell.end(), [](const Tri3& a, const Tri3& b) {
            auto ka = a.nodes;
            auto kb = b.nodes;
            std::sort(ka.begin(), ka.end());
            std::sort(kb.begin(), kb.end());
            return ka < kb;
        });
        mesh.facets.insert(mesh.facets.end(), shell.begin(), shell.end());
    }

    // Shell patch farthest from the sternum, as a cone about -z.
    {
        const double cos_limit = std::cos(spec.fixed_patch_angle_deg * M_PI / 180.0);
        std::vector<char> myo_node(static_cast<std::size_t>(mesh.num_nodes()), 0);
        for (const auto& tet : mesh.tets) {
            if (tet.region_tag != phantom_region::kMyocardium) continue;
            for (int ni : tet.nodes) myo_node[static_cast<std::size_t>(ni)] = 1;
        }
        std::vector<int> fixed;
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            if (!myo_node[static_cast<std::size_t>(i)]) continue;
            const Vec3 d = mesh.nodes[static_cast<std::size_t>(i)].position - heart_center;
            const double len = d.norm();
            if (len <= 0.0) continue;
            if (-d.z() / len >= cos_limit) fixed.push_back(i);
        }
        mesh.node_sets["MYO_FIXED"] = std::move(fixed);
    }

    return mesh;
}

} // namespace tfem
