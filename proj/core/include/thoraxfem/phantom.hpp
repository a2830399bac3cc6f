#pragma once

#include "thoraxfem/mesh.hpp"

namespace tfem {

// Region tags used by the thorax phantom.
namespace phantom_region {
inline constexpr int kSoftTissue = 1;
inline constexpr int kBone = 2;
inline constexpr int kCartilage1 = 3;
inline constexpr int kCartilage2 = 4;
inline constexpr int kCartilage3 = 5;
inline constexpr int kCartilage4 = 6;
inline constexpr int kMyocardium = 7;
inline constexpr int kCavity = 8;
} // namespace phantom_region

// Facet tags. gen_bar uses 1..6 for the box faces (-x,+x,-y,+y,-z,+z);
// the phantom uses the named tags below.
namespace phantom_facet {
inline constexpr int kBack = 1;         // outer -z face
inline constexpr int kFront = 2;        // outer +z face outside the sternum footprint
inline constexpr int kSide = 3;         // remaining outer faces
inline constexpr int kSternumPatch = 10;
inline constexpr int kShellOuter = 20;  // myocardium / surrounding interface
inline constexpr int kShellInner = 21;  // myocardium / cavity interface
} // namespace phantom_facet

struct BarSpec {
    double lx = 1.0, ly = 1.0, lz = 1.0; // m
    int nx = 1, ny = 1, nz = 1;
};

// Structured bar: (nx+1)(ny+1)(nz+1) nodes, 6 tets per cell with a
// consistent diagonal, boundary facets tagged 1..6 per box face,
// single region tag 1.
Mesh gen_bar(const BarSpec& spec);

// Simplified thorax: outer soft-tissue block, bony sternum plate and
// rib bars with cartilage segments bridging to the sternum, and an
// ellipsoidal myocardium shell around a cavity. Regions are assigned
// by tet-centroid membership on a structured background grid.
struct ThoraxPhantomSpec {
    Vec3 block{0.30, 0.30, 0.22}; // m; back face at z=0, sternum side at z=block.z

    // Sternum plate, grid-aligned by default.
    Vec3 sternum_size{0.02, 0.12, 0.02};
    double sternum_center_x = 0.15;
    double sternum_center_y = 0.14;
    double sternum_depth = 0.02; // plate top below the +z surface

    int rib_pairs = 7;
    double rib_thickness_y = 0.01;
    double rib_thickness_z = 0.01;
    double rib_pitch = 0.02;       // centerline spacing in y
    double rib_first_y = 0.07;     // lower edge of the first rib
    double rib_depth = 0.03;       // rib top below the +z surface
    double rib_side_margin = 0.02; // gap between rib tip and side walls
    double cartilage_fraction = 0.25; // fraction of each rib, sternum side

    Vec3 heart_semi_axes{0.05, 0.04, 0.06};
    double heart_wall = 0.012;
    double heart_center_depth = 0.10; // shell center below the +z surface
    double fixed_patch_angle_deg = 30.0; // cone half-angle about -z

    double h = 0.01; // target edge length
};

Mesh gen_thorax_phantom(const ThoraxPhantomSpec& spec);

} // namespace tfem
