#pragma once

#include "thoraxfem/assembly.hpp"
#include "thoraxfem/mesh.hpp"
#include "thoraxfem/solver.hpp"

#include <string>
#include <vector>

namespace tfem {

// Stress in Voigt order (xx, yy, zz, xy, yz, zx), Pa.

// sigma = D * (B * u_e); constant per element.
Vec6 element_stress(const std::vector<double>& full_displacement, const Tet4& tet,
                    const Mat6x12& B, const Mat6& D);

double von_mises(const Vec6& stress);

// Principal stresses sorted descending. Analytic symmetric 3x3
// eigenvalues (trigonometric form) with a Jacobi-sweep fallback near
// degenerate discriminants.
Vec3 principal_stresses(const Vec6& stress);

// Normal stress along a unit axis: d' sigma d.
double normal_stress_along(const Vec6& stress, const Vec3& axis);

// Volume-weighted nodal mean over adjacent active elements. Nodes with
// no adjacent active element get 0 and are reported via `isolated`.
std::vector<double> nodal_average(const Mesh& mesh, const std::vector<double>& element_field,
                                  const std::vector<char>& active,
                                  std::vector<int>* isolated = nullptr);

// Per-element stress state for one time step, on active tets.
struct StressField {
    std::vector<Vec6> stress;       // zero for inactive elements
    std::vector<double> von_mises;  // per element
    std::vector<double> normal;     // per element, along the report axis
    Vec3 normal_axis = Vec3::UnitZ();
};

StressField recover_stress(const Mesh& mesh, const RegionStiffness& regions,
                           const std::vector<char>& active,
                           const std::vector<double>& full_displacement, const Vec3& normal_axis);

struct RegionSummary {
    int region_tag = 0;
    std::string region_name;
    double max_displacement = 0.0;  // m, magnitude
    double mean_displacement = 0.0; // m, plain mean over region nodes
    double max_von_mises = 0.0;     // Pa
    double mean_von_mises = 0.0;    // Pa, volume-weighted
    double max_normal = 0.0;        // Pa, signed, along the report axis
    double min_normal = 0.0;
    int max_displacement_node = 0;  // 1-based
    int max_von_mises_element = 0;  // 1-based
};

// One summary per active region, ordered by region tag.
std::vector<RegionSummary> region_summary(const Mesh& mesh, const std::vector<char>& active,
                                          const std::vector<double>& full_displacement,
                                          const StressField& field);

} // namespace tfem
