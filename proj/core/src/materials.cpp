#include "thoraxfem/materials.hpp"

#include "thoraxfem/errors.hpp"

#include <cmath>

namespace tfem {

void validate_material(const Material& m)
{
    if (!(m.young_modulus > 0.0) || !std::isfinite(m.young_modulus)) {
        throw MaterialError("material '" + m.name + "': Young's modulus must be positive");
    }
    if (!(m.poisson_ratio > -1.0 && m.poisson_ratio < 0.5)) {
        throw MaterialError("material '" + m.name + "': Poisson's ratio must lie in (-1, 0.5)");
    }
    if (!(m.density > 0.0) || !std::isfinite(m.density)) {
        throw MaterialError("material '" + m.name + "': density must be positive");
    }
}

Lame lame_from_young_poisson(double young_modulus, double poisson_ratio)
{
    if (!(young_modulus > 0.0) || !std::isfinite(young_modulus)) {
        throw MaterialError("Young's modulus must be positive");
    }
    if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
        throw MaterialError("Poisson's ratio must lie in (-1, 0.5)");
    }
    Lame lame;
    lame.mu = young_modulus / (2.0 * (1.0 + poisson_ratio));
    lame.lambda = young_modulus * poisson_ratio
        / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    return lame;
}

double young_from_lame(const Lame& lame)
{
    return lame.mu * (3.0 * lame.lambda + 2.0 * lame.mu) / (lame.lambda + lame.mu);
}

double poisson_from_lame(const Lame& lame)
{
    return lame.lambda / (2.0 * (lame.lambda + lame.mu));
}

Mat6 elasticity_matrix(double lambda, double mu)
{
    if (!(mu > 0.0)) throw MaterialError("elasticity matrix requires mu > 0");
    if (lambda < 0.0) throw MaterialError("elasticity matrix requires lambda >= 0");
    Mat6 d = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            d(i, j) = (i == j) ? lambda + 2.0 * mu : lambda;
        }
        d(3 + i, 3 + i) = mu;
    }
    return d;
}

Mat6 elasticity_matrix(const Material& m)
{
    validate_material(m);
    const Lame lame = lame_from_young_poisson(m.young_modulus, m.poisson_ratio);
    return elasticity_matrix(lame.lambda, lame.mu);
}

void MaterialTable::insert(const std::string& key, Material m)
{
    validate_material(m);
    entries_[key] = std::move(m);
}

bool MaterialTable::contains(const std::string& key) const
{
    return entries_.count(key) > 0;
}

const Material& MaterialTable::lookup(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw MaterialError("unknown material '" + key + "'");
    }
    return it->second;
}

MaterialTable builtin_material_table()
{
    MaterialTable table;
    table.insert("myocardium", {"Myocardium", 1e6, 0.3, 2000.0});
    table.insert("bones", {"Bones", 2e9, 0.2, 1000.0});
    table.insert("soft_tissue", {"Soft tissue", 9e4, 0.2, 1000.0});
    table.insert("cartilage_group_1", {"Cartilage 1L, 1R", 9e6, 0.3, 1100.0});
    table.insert("cartilage_group_2", {"Cartilage 2L, 2R, 3L, 3R", 8e7, 0.3, 1100.0});
    table.insert("cartilage_group_3", {"Cartilage 4L, 4R, 5L, 5R", 7e7, 0.3, 1100.0});
    table.insert("cartilage_group_4", {"Cartilage 6L, 6R, 7L, 7R, 8L, 8R", 4e7, 0.3, 1100.0});
    return table;
}

} // namespace tfem
