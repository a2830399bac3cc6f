#pragma once

#include "thoraxfem/materials.hpp"
#include "thoraxfem/mesh.hpp"
#include "thoraxfem/sparse.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tfem {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// DOF layout: node-major, xyz within node (dof = 3*node + component).
inline int dof_index(int node, int component) { return 3 * node + component; }

// Constant-strain-tet kinematics: B maps the 12 nodal displacements to
// the Voigt strain (xx, yy, zz, xy, yz, zx), engineering shear.
struct StrainDisplacement {
    Mat6x12 B = Mat6x12::Zero();
    double volume = 0.0;
};

// Throws GeometryError when the tet volume falls below volume_floor.
StrainDisplacement strain_displacement(const Vec3& p0, const Vec3& p1, const Vec3& p2,
                                       const Vec3& p3, double volume_floor = kVolumeFloorAbs);
StrainDisplacement strain_displacement(const Mesh& mesh, const Tet4& tet,
                                       double volume_floor = kVolumeFloorAbs);

// Ke = V * B^T D B, exactly symmetric (upper triangle mirrored).
Mat12 element_stiffness(const Mat6x12& B, const Mat6& D, double volume);

// Geometric selector shared by boundary conditions and load patches.
struct Selector {
    enum class Kind { Box, Region, Facet, NodeSet };
    Kind kind = Kind::Box;
    Box box;
    int tag = 0;
    std::string name; // node-set name, or region/facet referenced by name

    static Selector make_box(const Box& b);
    static Selector make_region(int tag);
    static Selector make_region(const std::string& name);
    static Selector make_facet(int tag);
    static Selector make_facet(const std::string& name);
    static Selector make_node_set(const std::string& name);

    std::string describe() const;
};

// Resolves to sorted node indices. Throws ConfigError for unknown
// names; empty results are legal.
std::vector<int> select_nodes(const Mesh& mesh, const Selector& sel);
// Facet indices matched by a facet-tag or box selector (box requires
// all three nodes inside).
std::vector<int> select_facets(const Mesh& mesh, const Selector& sel);

struct TractionPatch {
    Selector select;
    std::optional<Vec3> total_force; // N, shared over the patch area
    std::optional<double> pressure;  // Pa along facet normals
};

struct DirichletSet {
    Selector select;
    std::array<bool, 3> components{true, true, true};
    Vec3 value = Vec3::Zero(); // prescribed displacement, m
};

struct DofConstraint {
    int dof = 0;
    double value = 0.0;
};

// Per-region assembly input; regions listed in `voided` contribute no
// stiffness. Every region tag present in the mesh must appear in
// exactly one of the two.
struct RegionStiffness {
    std::map<int, Mat6> elasticity; // region tag -> D
    std::vector<int> voided;
};

// Active = belongs to a non-voided, mapped region.
std::vector<char> active_tets(const Mesh& mesh, const RegionStiffness& regions);

// Global stiffness, dimension 3*n_nodes. Sequential fixed-order
// accumulation (deterministic). Throws ConfigError on unmapped regions
// and GeometryError on degenerate active tets.
CsrMatrix assemble_stiffness(const Mesh& mesh, const RegionStiffness& regions);

// Consistent TRI3 loads: each facet node receives a third of the facet
// force. total_force mode distributes F uniformly over the patch area;
// pressure mode applies p*area along each facet normal.
std::vector<double> assemble_traction(const Mesh& mesh, const std::vector<TractionPatch>& patches);

// Expands Dirichlet sets to per-DOF constraints. Conflicting duplicate
// prescriptions throw ConfigError; empty selections are reported in
// `warnings` when given.
std::vector<DofConstraint> resolve_dirichlet(const Mesh& mesh,
                                             const std::vector<DirichletSet>& sets,
                                             std::vector<std::string>* warnings = nullptr);

// Reduced SPD system after constraint elimination. DOFs whose stiffness
// row is empty (nodes outside every active element) are dropped as
// inactive with zero displacement.
struct SparseSystem {
    CsrMatrix full_matrix;
    std::vector<double> full_load;

    CsrMatrix reduced_matrix;
    std::vector<double> reduced_load; // includes -K_fc * u_c lift

    std::vector<int> free_dofs;          // reduced index -> global dof
    std::vector<int> dof_to_free;        // global dof -> reduced index or -1
    std::vector<DofConstraint> constraints; // sorted by dof
    std::vector<int> inactive_dofs;      // sorted

    int total_dofs = 0;

    // Full-length displacement with prescribed values scaled by
    // load_factor and zeros at inactive DOFs.
    std::vector<double> expand(const std::vector<double>& reduced,
                               double load_factor = 1.0) const;

    // r = K u - f restricted to constrained DOFs.
    std::vector<double> reaction_forces(const std::vector<double>& full_displacement) const;
};

// Elimination keeps the reduced matrix symmetric and positive definite
// whenever the constraints remove all rigid-body modes. Constraining
// every DOF yields a legal empty system.
SparseSystem apply_dirichlet(CsrMatrix stiffness, std::vector<double> load,
                             std::vector<DofConstraint> constraints);

} // namespace tfem
