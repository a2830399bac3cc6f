#include "thoraxfem/assembly.hpp"

#include "thoraxfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tfem {

StrainDisplacement strain_displacement(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                       const Vec3& p3, double volume_floor)
{
    const double vol6 = (p1 - p0).cross(p2 - p0).dot(p3 - p0);
    const double volume = vol6 / 6.0;
    if (!(volume > std::max(volume_floor, 0.0))) {
        std::ostringstream os;
        os << "degenerate tetrahedron (signed volume " << volume << " m^3, floor " << volume_floor
           << ")";
        throw GeometryError(os.str());
    }

    // Shape-function gradients from face cross products: grad N_i is the
    // inward-scaled normal of the face opposite node i, divided by 6V.
    const std::array<Vec3, 4> p{p0, p1, p2, p3};
    std::array<Vec3, 4> grad;
    for (int i = 0; i < 4; ++i) {
        const Vec3& a = p[(i + 1) % 4];
        const Vec3& b = p[(i + 2) % 4];
        const Vec3& c = p[(i + 3) % 4];
        Vec3 g = (b - a).cross(c - a);
        // Orient toward node i so that N_i increases from the opposite face.
        if (g.dot(p[i] - a) < 0.0) g = -g;
        grad[i] = g / vol6;
    }

    StrainDisplacement sd;
    sd.volume = volume;
    for (int i = 0; i < 4; ++i) {
        const double bx = grad[i].x();
        const double by = grad[i].y();
        const double bz = grad[i].z();
        const int c = 3 * i;
        sd.B(0, c + 0) = bx;
        sd.B(1, c + 1) = by;
        sd.B(2, c + 2) = bz;
        sd.B(3, c + 0) = by; // gamma_xy
        sd.B(3, c + 1) = bx;
        sd.B(4, c + 1) = bz; // gamma_yz
        sd.B(4, c + 2) = by;
        sd.B(5, c + 0) = bz; // gamma_zx
        sd.B(5, c + 2) = bx;
    }
    return sd;
}

StrainDisplacement strain_displacement(const Mesh& mesh, const Tet4& tet, double volume_floor)
{
    return strain_displacement(mesh.nodes[tet.nodes[0]].position, mesh.nodes[tet.nodes[1]].position,
                               mesh.nodes[tet.nodes[2]].position, mesh.nodes[tet.nodes[3]].position,
                               volume_floor);
}

Mat12 element_stiffness(const Mat6x12& B, const Mat6& D, double volume)
{
    Mat12 ke = volume * (B.transpose() * D * B);
    // Mirror the upper triangle for exact symmetry.
    for (int i = 0; i < 12; ++i) {
        for (int j = i + 1; j < 12; ++j) {
            ke(j, i) = ke(i, j);
        }
    }
    return ke;
}

Selector Selector::make_box(const Box& b)
{
    Selector s;
    s.kind = Kind::Box;
    s.box = b;
    return s;
}

Selector Selector::make_region(int tag)
{
    Selector s;
    s.kind = Kind::Region;
    s.tag = tag;
    return s;
}

Selector Selector::make_region(const std::string& name)
{
    Selector s = make_region(-1);
    s.name = name;
    return s;
}

Selector Selector::make_facet(int tag)
{
    Selector s;
    s.kind = Kind::Facet;
    s.tag = tag;
    return s;
}

Selector Selector::make_facet(const std::string& name)
{
    Selector s = make_facet(-1);
    s.name = name;
    return s;
}

Selector Selector::make_node_set(const std::string& name)
{
    Selector s;
    s.kind = Kind::NodeSet;
    s.name = name;
    return s;
}

std::string Selector::describe() const
{
    std::ostringstream os;
    switch (kind) {
    case Kind::Box:
        os << "box [" << box.lo.transpose() << "] .. [" << box.hi.transpose() << "]";
        break;
    case Kind::Region:
        os << "region " << (name.empty() ? std::to_string(tag) : name);
        break;
    case Kind::Facet:
        os << "facet " << (name.empty() ? std::to_string(tag) : name);
        break;
    case Kind::NodeSet:
        os << "node_set " << name;
        break;
    }
    return os.str();
}

namespace {

int resolve_region_tag(const Mesh& mesh, const Selector& sel)
{
    if (sel.name.empty()) return sel.tag;
    const int tag = mesh.region_tag_by_name(sel.name);
    if (tag < 0) throw ConfigError("unknown region name '" + sel.name + "'");
    return tag;
}

int resolve_facet_tag(const Mesh& mesh, const Selector& sel)
{
    if (sel.name.empty()) return sel.tag;
    const int tag = mesh.facet_tag_by_name(sel.name);
    if (tag < 0) throw ConfigError("unknown facet name '" + sel.name + "'");
    return tag;
}

} // namespace

std::vector<int> select_nodes(const Mesh& mesh, const Selector& sel)
{
    switch (sel.kind) {
    case Selector::Kind::Box:
        return select_nodes_box(mesh, sel.box);
    case Selector::Kind::Region:
        return select_nodes_region(mesh, resolve_region_tag(mesh, sel));
    case Selector::Kind::Facet:
        return select_nodes_facet(mesh, resolve_facet_tag(mesh, sel));
    case Selector::Kind::NodeSet: {
        const auto it = mesh.node_sets.find(sel.name);
        if (it == mesh.node_sets.end()) {
            throw ConfigError("unknown node set '" + sel.name + "'");
        }
        return it->second;
    }
    }
    return {};
}

std::vector<int> select_facets(const Mesh& mesh, const Selector& sel)
{
    std::vector<int> out;
    if (sel.kind == Selector::Kind::Facet) {
        const int tag = resolve_facet_tag(mesh, sel);
        for (int i = 0; i < mesh.num_facets(); ++i) {
            if (mesh.facets[static_cast<std::size_t>(i)].facet_tag == tag) out.push_back(i);
        }
    } else if (sel.kind == Selector::Kind::Box) {
        for (int i = 0; i < mesh.num_facets(); ++i) {
            const auto& tri = mesh.facets[static_cast<std::size_t>(i)];
            bool inside = true;
            for (int ni : tri.nodes) {
                inside = inside && sel.box.contains(mesh.nodes[ni].position);
            }
            if (inside) out.push_back(i);
        }
    } else {
        throw ConfigError("facet selection requires a facet tag or box selector, got "
                          + sel.describe());
    }
    return out;
}

std::vector<char> active_tets(const Mesh& mesh, const RegionStiffness& regions)
{
    std::set<int> voided(regions.voided.begin(), regions.voided.end());
    std::vector<char> active(mesh.tets.size(), 0);
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        const int tag = mesh.tets[e].region_tag;
        if (voided.count(tag)) continue;
        if (!regions.elasticity.count(tag)) {
            std::string name;
            const auto it = mesh.region_names.find(tag);
            if (it != mesh.region_names.end()) name = " (" + it->second + ")";
            throw ConfigError("region tag " + std::to_string(tag) + name
                              + " has no material assignment and is not voided");
        }
        active[e] = 1;
    }
    return active;
}

CsrMatrix assemble_stiffness(const Mesh& mesh, const RegionStiffness& regions)
{
    const std::vector<char> active = active_tets(mesh, regions);
    const int ndof = 3 * mesh.num_nodes();

    // Mean active volume for the degeneracy floor.
    double total_volume = 0.0;
    std::size_t n_active = 0;
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        total_volume += tet_volume(mesh, mesh.tets[e]);
        ++n_active;
    }
    const double floor =
        n_active > 0 ? degenerate_volume_threshold(total_volume / static_cast<double>(n_active))
                     : kVolumeFloorAbs;

    // Node adjacency -> block pattern.
    std::vector<std::vector<int>> node_adj(static_cast<std::size_t>(mesh.num_nodes()));
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        const auto& nd = mesh.tets[e].nodes;
        for (int a : nd) {
            for (int b : nd) node_adj[static_cast<std::size_t>(a)].push_back(b);
        }
    }
    std::vector<std::vector<int>> dof_adj(static_cast<std::size_t>(ndof));
    for (int node = 0; node < mesh.num_nodes(); ++node) {
        auto& adj = node_adj[static_cast<std::size_t>(node)];
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        for (int c = 0; c < 3; ++c) {
            auto& row = dof_adj[static_cast<std::size_t>(dof_index(node, c))];
            row.reserve(adj.size() * 3);
            for (int nb : adj) {
                row.push_back(dof_index(nb, 0));
                row.push_back(dof_index(nb, 1));
                row.push_back(dof_index(nb, 2));
            }
        }
        adj.clear();
        adj.shrink_to_fit();
    }
    CsrMatrix k = CsrMatrix::from_adjacency(dof_adj);
    dof_adj.clear();
    dof_adj.shrink_to_fit();

    // Fixed element order, sequential accumulation.
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        const auto& tet = mesh.tets[e];
        StrainDisplacement sd;
        try {
            sd = strain_displacement(mesh, tet, floor);
        } catch (const GeometryError& err) {
            throw GeometryError("element " + std::to_string(e + 1) + ": " + err.what());
        }
        const Mat6& d = regions.elasticity.at(tet.region_tag);
        const Mat12 ke = element_stiffness(sd.B, d, sd.volume);
        for (int a = 0; a < 4; ++a) {
            for (int i = 0; i < 3; ++i) {
                const int row = dof_index(tet.nodes[static_cast<std::size_t>(a)], i);
                for (int b = 0; b < 4; ++b) {
                    for (int j = 0; j < 3; ++j) {
                        const int col = dof_index(tet.nodes[static_cast<std::size_t>(b)], j);
                        double* slot = k.find(row, col);
                        *slot += ke(3 * a + i, 3 * b + j);
                    }
                }
            }
        }
    }
    return k;
}

std::vector<double> assemble_traction(const Mesh& mesh, const std::vector<TractionPatch>& patches)
{
    std::vector<double> f(static_cast<std::size_t>(3 * mesh.num_nodes()), 0.0);
    for (std::size_t p = 0; p < patches.size(); ++p) {
        const auto& patch = patches[p];
        if (patch.total_force.has_value() == patch.pressure.has_value()) {
            throw ConfigError("traction patch " + std::to_string(p + 1)
                              + ": exactly one of total_force / pressure must be set");
        }
        const std::vector<int> facets = select_facets(mesh, patch.select);
        if (facets.empty()) {
            throw ConfigError("traction patch " + std::to_string(p + 1) + " ("
                              + patch.select.describe() + ") selects no facets");
        }

        std::vector<double> areas(facets.size());
        std::vector<Vec3> normals(facets.size());
        double patch_area = 0.0;
        for (std::size_t i = 0; i < facets.size(); ++i) {
            const auto& tri = mesh.facets[static_cast<std::size_t>(facets[i])];
            const TriGeometry g = tri_area_normal(mesh, tri);
            if (g.degenerate) {
                throw GeometryError("traction patch " + std::to_string(p + 1)
                                    + ": degenerate facet " + std::to_string(facets[i] + 1));
            }
            areas[i] = g.area;
            normals[i] = g.normal;
            patch_area += g.area;
        }

        for (std::size_t i = 0; i < facets.size(); ++i) {
            const auto& tri = mesh.facets[static_cast<std::size_t>(facets[i])];
            Vec3 facet_force;
            if (patch.total_force) {
                facet_force = *patch.total_force * (areas[i] / patch_area);
            } else {
                facet_force = *patch.pressure * areas[i] * normals[i];
            }
            const Vec3 node_share = facet_force / 3.0;
            for (int ni : tri.nodes) {
                for (int c = 0; c < 3; ++c) {
                    f[static_cast<std::size_t>(dof_index(ni, c))] += node_share[c];
                }
            }
        }
    }
    return f;
}

std::vector<DofConstraint> resolve_dirichlet(const Mesh& mesh,
                                             const std::vector<DirichletSet>& sets,
                                             std::vector<std::string>* warnings)
{
    std::map<int, double> by_dof;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& set = sets[s];
        const std::vector<int> nodes = select_nodes(mesh, set.select);
        if (nodes.empty() && warnings) {
            warnings->push_back("dirichlet set " + std::to_string(s + 1) + " ("
                                + set.select.describe() + ") selects no nodes");
        }
        for (int node : nodes) {
            for (int c = 0; c < 3; ++c) {
                if (!set.components[static_cast<std::size_t>(c)]) continue;
                const int dof = dof_index(node, c);
                const auto [it, inserted] = by_dof.emplace(dof, set.value[c]);
                if (!inserted && it->second != set.value[c]) {
                    throw ConfigError("conflicting Dirichlet values at node "
                                      + std::to_string(node + 1) + " component "
                                      + std::to_string(c));
                }
            }
        }
    }
    std::vector<DofConstraint> out;
    out.reserve(by_dof.size());
    for (const auto& [dof, value] : by_dof) out.push_back({dof, value});
    return out;
}

std::vector<double> SparseSystem::expand(const std::vector<double>& reduced,
                                         double load_factor) const
{
    std::vector<double> full(static_cast<std::size_t>(total_dofs), 0.0);
    for (std::size_t i = 0; i < free_dofs.size(); ++i) {
        full[static_cast<std::size_t>(free_dofs[i])] = reduced[i];
    }
    for (const auto& c : constraints) {
        full[static_cast<std::size_t>(c.dof)] = load_factor * c.value;
    }
    return full;
}

std::vector<double> SparseSystem::reaction_forces(const std::vector<double>& full_displacement) const
{
    const std::vector<double> ku = full_matrix.multiply(full_displacement);
    std::vector<double> reactions(constraints.size(), 0.0);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const int dof = constraints[i].dof;
        reactions[i] = ku[static_cast<std::size_t>(dof)] - full_load[static_cast<std::size_t>(dof)];
    }
    return reactions;
}

SparseSystem apply_dirichlet(CsrMatrix stiffness, std::vector<double> load,
                             std::vector<DofConstraint> constraints)
{
    const int ndof = stiffness.n;
    if (static_cast<int>(load.size()) != ndof) throw Error("apply_dirichlet: load size mismatch");

    std::sort(constraints.begin(), constraints.end(),
              [](const DofConstraint& a, const DofConstraint& b) { return a.dof < b.dof; });
    for (const auto& c : constraints) {
        if (c.dof < 0 || c.dof >= ndof) throw ConfigError("constraint on DOF outside the system");
    }

    SparseSystem sys;
    sys.total_dofs = ndof;
    sys.constraints = std::move(constraints);

    // Classification: 0 free, 1 constrained, 2 inactive (empty row).
    std::vector<char> kind(static_cast<std::size_t>(ndof), 0);
    for (const auto& c : sys.constraints) kind[static_cast<std::size_t>(c.dof)] = 1;
    for (int i = 0; i < ndof; ++i) {
        if (kind[static_cast<std::size_t>(i)] != 0) continue;
        if (stiffness.row_ptr[static_cast<std::size_t>(i)]
            == stiffness.row_ptr[static_cast<std::size_t>(i) + 1]) {
            if (load[static_cast<std::size_t>(i)] != 0.0) {
                throw ConfigError("load applied to DOF " + std::to_string(i)
                                  + " which carries no stiffness (voided or unused node)");
            }
            kind[static_cast<std::size_t>(i)] = 2;
            sys.inactive_dofs.push_back(i);
        }
    }

    sys.dof_to_free.assign(static_cast<std::size_t>(ndof), -1);
    for (int i = 0; i < ndof; ++i) {
        if (kind[static_cast<std::size_t>(i)] == 0) {
            sys.dof_to_free[static_cast<std::size_t>(i)] = static_cast<int>(sys.free_dofs.size());
            sys.free_dofs.push_back(i);
        }
    }

    std::vector<double> prescribed(static_cast<std::size_t>(ndof), 0.0);
    for (const auto& c : sys.constraints) prescribed[static_cast<std::size_t>(c.dof)] = c.value;

    // Reduced pattern and values; the lift -K_fc u_c lands in the load.
    const int nfree = static_cast<int>(sys.free_dofs.size());
    std::vector<std::vector<int>> pattern(static_cast<std::size_t>(nfree));
    sys.reduced_load.assign(static_cast<std::size_t>(nfree), 0.0);
    for (int r = 0; r < nfree; ++r) {
        const int dof = sys.free_dofs[static_cast<std::size_t>(r)];
        sys.reduced_load[static_cast<std::size_t>(r)] = load[static_cast<std::size_t>(dof)];
        for (std::int64_t k = stiffness.row_ptr[static_cast<std::size_t>(dof)];
             k < stiffness.row_ptr[static_cast<std::size_t>(dof) + 1]; ++k) {
            const int col = stiffness.col_idx[static_cast<std::size_t>(k)];
            const int fc = sys.dof_to_free[static_cast<std::size_t>(col)];
            if (fc >= 0) {
                pattern[static_cast<std::size_t>(r)].push_back(fc);
            } else if (kind[static_cast<std::size_t>(col)] == 1) {
                sys.reduced_load[static_cast<std::size_t>(r)] -=
                    stiffness.values[static_cast<std::size_t>(k)]
                    * prescribed[static_cast<std::size_t>(col)];
            }
        }
    }
    sys.reduced_matrix = CsrMatrix::from_adjacency(pattern);
    pattern.clear();
    pattern.shrink_to_fit();
    {
        std::int64_t out = 0;
        for (int r = 0; r < nfree; ++r) {
            const int dof = sys.free_dofs[static_cast<std::size_t>(r)];
            for (std::int64_t k = stiffness.row_ptr[static_cast<std::size_t>(dof)];
                 k < stiffness.row_ptr[static_cast<std::size_t>(dof) + 1]; ++k) {
                const int col = stiffness.col_idx[static_cast<std::size_t>(k)];
                if (sys.dof_to_free[static_cast<std::size_t>(col)] >= 0) {
                    sys.reduced_matrix.values[static_cast<std::size_t>(out++)] =
                        stiffness.values[static_cast<std::size_t>(k)];
                }
            }
        }
    }

    sys.full_matrix = std::move(stiffness);
    sys.full_load = std::move(load);
    return sys;
}

} // namespace tfem
