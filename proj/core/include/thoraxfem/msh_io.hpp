#pragma once

#include "thoraxfem/mesh.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace tfem {

// Gmsh MSH 2.2 ASCII subset: $MeshFormat ("2.2 0 8"), optional
// $PhysicalNames, $Nodes, $Elements with element types 2 (TRI3) and
// 4 (TET4). The first element tag is the physical/region tag. Node ids
// are remapped to dense internal indices and tets are reoriented to
// positive volume. Coordinates are multiplied by unit_scale.
Mesh parse_msh(std::istream& in, double unit_scale = 1.0);
Mesh parse_msh(const std::string& text, double unit_scale = 1.0);
Mesh load_msh(const std::filesystem::path& path, double unit_scale = 1.0);

void write_msh(const Mesh& mesh, std::ostream& out);
std::string write_msh(const Mesh& mesh);
void save_msh(const Mesh& mesh, const std::filesystem::path& path);

} // namespace tfem
