#pragma once

#include <string>
#include <vector>

#include "polyforge/chemgraph.hpp"
#include "polyforge/structure.hpp"

namespace polyforge {

// One system of the JSON-lines structure format: graph plus coordinates.
struct System {
  std::string id;
  MolecularGraph graph;
  Structure structure;
};

// Parses one JSON-lines record. Fractional z outside [0,1) is wrapped (with
// a warning); fractional coordinates recomputed from Cartesian + cell must
// match the stored values within 1e-6.
System parse_record(const std::string& json_line, std::vector<std::string>* warnings = nullptr);

std::string to_record(const System& sys);

// Reads every line of a JSON-lines file.
std::vector<System> read_jsonl(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_jsonl(const std::string& path, const std::vector<System>& systems);

}  // namespace polyforge
