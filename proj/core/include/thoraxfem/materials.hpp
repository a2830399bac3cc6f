#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>

namespace tfem {

using Mat6 = Eigen::Matrix<double, 6, 6>;

// Isotropic linear-elastic material. Admissible range: E > 0,
// -1 < nu < 0.5 (strict), rho > 0.
struct Material {
    std::string name;
    double young_modulus = 0.0; // Pa
    double poisson_ratio = 0.0;
    double density = 0.0; // kg/m^3
};

// Throws MaterialError when outside the admissible range.
void validate_material(const Material& m);

struct Lame {
    double lambda = 0.0; // Pa
    double mu = 0.0;     // Pa
};

Lame lame_from_young_poisson(double young_modulus, double poisson_ratio);
double young_from_lame(const Lame& lame);
double poisson_from_lame(const Lame& lame);

// 6x6 constitutive matrix in Voigt order (xx, yy, zz, xy, yz, zx) with
// the engineering shear convention (gamma = 2*eps), so the shear block
// is exactly mu.
Mat6 elasticity_matrix(double lambda, double mu);
Mat6 elasticity_matrix(const Material& m);

class MaterialTable {
public:
    void insert(const std::string& key, Material m);
    bool contains(const std::string& key) const;
    const Material& lookup(const std::string& key) const; // throws MaterialError when absent
    const std::map<std::string, Material>& entries() const { return entries_; }

private:
    std::map<std::string, Material> entries_;
};

// Catalog of the organ materials used by the CPR scenarios, keyed by
// region class: myocardium, bones, soft_tissue, cartilage_group_1..4.
MaterialTable builtin_material_table();

} // namespace tfem
