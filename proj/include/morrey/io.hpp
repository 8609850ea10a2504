#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "morrey/extremal.hpp"

namespace morrey {

/// JSON object {"kind": ..., "params": {...}, "symmetries": [...]}.
/// Declared symmetries are validated against contains() on construction.
DomainSpec domain_from_json_text(const std::string& text);
DomainSpec domain_from_json_file(const std::string& path);
std::string domain_to_json_text(const DomainSpec& spec);

/// Legacy ASCII VTK unstructured grid (POINTS / CELLS / CELL_TYPES 5) with
/// optional POINT_DATA scalar fields, written with full double precision.
void write_vtk(std::ostream& os, const Mesh& mesh,
               const std::vector<std::pair<std::string, const std::vector<double>*>>& fields = {});

struct VtkData {
    Mesh mesh;
    std::vector<std::pair<std::string, std::vector<double>>> fields;
};
VtkData read_vtk(std::istream& is);

void write_sweep_csv(std::ostream& os, const PoleSweepResult& sweep);

std::string report_to_json_text(const SolveReport& report);

/// Write-then-rename so observers never see partial files.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace morrey
