#include "thoraxfem/stress.hpp"

#include "thoraxfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tfem {

namespace {

Eigen::Matrix3d voigt_to_tensor(const Vec6& s)
{
    Eigen::Matrix3d t;
    t << s[0], s[3], s[5],
         s[3], s[1], s[4],
         s[5], s[4], s[2];
    return t;
}

// Cyclic Jacobi sweeps; eigenvalues only.
Vec3 jacobi_eigenvalues(Eigen::Matrix3d a)
{
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
        const double diag = std::abs(a(0, 0)) + std::abs(a(1, 1)) + std::abs(a(2, 2));
        if (off <= 1e-15 * std::max(diag, 1e-300)) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                    / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = s;
                rot(q, p) = -s;
                a = rot.transpose() * a * rot;
                a = 0.5 * (a + a.transpose());
            }
        }
    }
    return {a(0, 0), a(1, 1), a(2, 2)};
}

} // namespace

Vec6 element_stress(const std::vector<double>& full_displacement, const Tet4& tet,
                    const Mat6x12& B, const Mat6& D)
{
    Eigen::Matrix<double, 12, 1> ue;
    for (int a = 0; a < 4; ++a) {
        for (int c = 0; c < 3; ++c) {
            ue[3 * a + c] =
                full_displacement[static_cast<std::size_t>(dof_index(tet.nodes[static_cast<std::size_t>(a)], c))];
        }
    }
    return D * (B * ue);
}

double von_mises(const Vec6& s)
{
    const double dxx = s[0] - s[1];
    const double dyy = s[1] - s[2];
    const double dzz = s[2] - s[0];
    const double shear = s[3] * s[3] + s[4] * s[4] + s[5] * s[5];
    return std::sqrt(0.5 * (dxx * dxx + dyy * dyy + dzz * dzz) + 3.0 * shear);
}

Vec3 principal_stresses(const Vec6& stress)
{
    const Eigen::Matrix3d a = voigt_to_tensor(stress);
    const double q = a.trace() / 3.0;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double d0 = a(0, 0) - q;
    const double d1 = a(1, 1) - q;
    const double d2 = a(2, 2) - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;

    Vec3 eig;
    const double scale = a.cwiseAbs().maxCoeff();
    if (p2 <= 1e-28 * std::max(scale * scale, 1e-300)) {
        eig = {q, q, q}; // hydrostatic
    } else {
        const double p = std::sqrt(p2 / 6.0);
        const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
        const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
        if (std::abs(r) > 1.0 - 1e-10) {
            // Near-degenerate discriminant: the trigonometric form loses
            // accuracy, fall back to Jacobi rotations.
            eig = jacobi_eigenvalues(a);
        } else {
            const double phi = std::acos(r) / 3.0;
            const double e1 = q + 2.0 * p * std::cos(phi);
            const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
            eig = {e1, 3.0 * q - e1 - e3, e3};
        }
    }
    std::sort(eig.data(), eig.data() + 3, std::greater<double>());
    return eig;
}

double normal_stress_along(const Vec6& stress, const Vec3& axis)
{
    const Vec3 d = axis.normalized();
    return d.dot(voigt_to_tensor(stress) * d);
}

std::vector<double> nodal_average(const Mesh& mesh, const std::vector<double>& element_field,
                                  const std::vector<char>& active, std::vector<int>* isolated)
{
    if (element_field.size() != mesh.tets.size() || active.size() != mesh.tets.size()) {
        throw ExportError("nodal_average: field size does not match element count");
    }
    std::vector<double> weighted(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
    std::vector<double> weight(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        const double v = tet_volume(mesh, mesh.tets[e]);
        for (int ni : mesh.tets[e].nodes) {
            weighted[static_cast<std::size_t>(ni)] += v * element_field[e];
            weight[static_cast<std::size_t>(ni)] += v;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (weight[static_cast<std::size_t>(i)] > 0.0) {
            out[static_cast<std::size_t>(i)] =
                weighted[static_cast<std::size_t>(i)] / weight[static_cast<std::size_t>(i)];
        } else if (isolated) {
            isolated->push_back(i);
        }
    }
    return out;
}

StressField recover_stress(const Mesh& mesh, const RegionStiffness& regions,
                           const std::vector<char>& active,
                           const std::vector<double>& full_displacement, const Vec3& normal_axis)
{
    StressField field;
    field.normal_axis = normal_axis.normalized();
    field.stress.assign(mesh.tets.size(), Vec6::Zero());
    field.von_mises.assign(mesh.tets.size(), 0.0);
    field.normal.assign(mesh.tets.size(), 0.0);
    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        const auto& tet = mesh.tets[e];
        const StrainDisplacement sd = strain_displacement(mesh, tet);
        const Mat6& d = regions.elasticity.at(tet.region_tag);
        const Vec6 sigma = element_stress(full_displacement, tet, sd.B, d);
        field.stress[e] = sigma;
        field.von_mises[e] = von_mises(sigma);
        field.normal[e] = normal_stress_along(sigma, field.normal_axis);
    }
    return field;
}

std::vector<RegionSummary> region_summary(const Mesh& mesh, const std::vector<char>& active,
                                          const std::vector<double>& full_displacement,
                                          const StressField& field)
{
    struct Accum {
        std::vector<char> node_member;
        double max_disp = -1.0;
        int max_disp_node = 0;
        double sum_disp = 0.0;
        std::size_t node_count = 0;
        double max_vm = -1.0;
        int max_vm_element = 0;
        double vm_volume_sum = 0.0;
        double volume = 0.0;
        double max_normal = std::numeric_limits<double>::lowest();
        double min_normal = std::numeric_limits<double>::max();
    };
    std::map<int, Accum> by_region;

    for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
        if (!active[e]) continue;
        const auto& tet = mesh.tets[e];
        Accum& acc = by_region[tet.region_tag];
        if (acc.node_member.empty()) {
            acc.node_member.assign(static_cast<std::size_t>(mesh.num_nodes()), 0);
        }
        for (int ni : tet.nodes) acc.node_member[static_cast<std::size_t>(ni)] = 1;
        const double v = tet_volume(mesh, tet);
        acc.volume += v;
        acc.vm_volume_sum += v * field.von_mises[e];
        if (field.von_mises[e] > acc.max_vm) {
            acc.max_vm = field.von_mises[e];
            acc.max_vm_element = static_cast<int>(e) + 1;
        }
        acc.max_normal = std::max(acc.max_normal, field.normal[e]);
        acc.min_normal = std::min(acc.min_normal, field.normal[e]);
    }

    for (auto& [tag, acc] : by_region) {
        for (int i = 0; i < mesh.num_nodes(); ++i) {
            if (!acc.node_member[static_cast<std::size_t>(i)]) continue;
            const Vec3 u(full_displacement[static_cast<std::size_t>(dof_index(i, 0))],
                         full_displacement[static_cast<std::size_t>(dof_index(i, 1))],
                         full_displacement[static_cast<std::size_t>(dof_index(i, 2))]);
            const double mag = u.norm();
            acc.sum_disp += mag;
            ++acc.node_count;
            if (mag > acc.max_disp) {
                acc.max_disp = mag;
                acc.max_disp_node = i + 1;
            }
        }
    }

    std::vector<RegionSummary> out;
    out.reserve(by_region.size());
    for (const auto& [tag, acc] : by_region) {
        RegionSummary s;
        s.region_tag = tag;
        const auto it = mesh.region_names.find(tag);
        s.region_name = it != mesh.region_names.end() ? it->second : std::to_string(tag);
        s.max_displacement = std::max(acc.max_disp, 0.0);
        s.mean_displacement =
            acc.node_count > 0 ? acc.sum_disp / static_cast<double>(acc.node_count) : 0.0;
        s.max_von_mises = std::max(acc.max_vm, 0.0);
        s.mean_von_mises = acc.volume > 0.0 ? acc.vm_volume_sum / acc.volume : 0.0;
        s.max_normal = acc.max_normal;
        s.min_normal = acc.min_normal;
        s.max_displacement_node = acc.max_disp_node;
        s.max_von_mises_element = acc.max_vm_element;
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace tfem
