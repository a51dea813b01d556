#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyforge/array.hpp"

namespace polyforge {

enum class Element : uint8_t { H, C, N, O, S, F, Cl, Si, Br };

constexpr int kNumElements = 9;

const std::string& element_symbol(Element e);
Element element_from_symbol(const std::string& s);
bool is_supported_element(const std::string& s);

enum class BondOrder : uint8_t { single = 1, double_bond = 2, triple = 3, aromatic = 4 };

double bond_order_value(BondOrder o);  // aromatic counts 1.5

struct AtomNode {
  int index = 0;
  Element element = Element::C;
};

// z_shift is the repeat-unit image offset along the chain axis: a bond
// (i, j, +1) connects atom i to atom j's image one cell up in z.
struct BondEdge {
  int i = 0;
  int j = 0;
  BondOrder order = BondOrder::single;
  int z_shift = 0;
};

// One incident bond endpoint as seen from a given atom: neighbor index and
// the image shift to reach it. Self-periodic bonds contribute two ends.
struct BondEnd {
  int nbr = 0;
  int shift = 0;
  int bond = 0;  // index into bonds
};

struct MolecularGraph {
  std::vector<AtomNode> atoms;
  std::vector<BondEdge> bonds;
  bool periodic = false;

  int atom_count() const { return static_cast<int>(atoms.size()); }

  // Quotient-graph neighbor lists (periodic bonds as ordinary edges, one
  // entry per incident bond end; self-periodic bonds appear twice).
  std::vector<std::vector<BondEnd>> incident_ends() const;

  // Validates index ranges, element set, duplicate edges, valence limits,
  // connectivity for periodic graphs, and the periodic-bond requirement.
  void validate() const;
};

struct PositionalEncodings {
  ad::Array rw;   // (N, 16), entries in [0, 1]
  ad::Array lap;  // (N, 2), unit-norm Laplacian eigenvector columns
};

// Pairwise graph-distance classes: 0 identical, 1 bonded, 2 separated by an
// angle, 3 separated by a dihedral, 4 beyond four bonds apart.
struct DistanceClassTensor {
  int n = 0;
  std::vector<uint8_t> cls;  // n*n entries, values 0..4

  uint8_t at(int i, int j) const { return cls[static_cast<size_t>(i) * n + j]; }

  // (n*n, 5) one-hot rows in row-major (i, j) order, for bias tables.
  ad::Array one_hot_rows() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

// Polymer SMILES: exactly two [*] wildcards mark the chain attachment
// points and are replaced by a single closure bond with z_shift = +1.
// Plain SMILES (no wildcards) yields a non-periodic molecule.
MolecularGraph parse_smiles(const std::string& text);

ad::Array random_walk_pe(const MolecularGraph& g, int steps = 16);
ad::Array laplacian_pe(const MolecularGraph& g, int eigvecs = 2);
PositionalEncodings positional_encodings(const MolecularGraph& g);

DistanceClassTensor distance_class_tensor(const MolecularGraph& g);

struct IsoResult {
  bool isomorphic = false;
  bool timed_out = false;
};

// Element-labeled quotient-graph isomorphism (bond orders and z_shift
// ignored, self-loops must map to self-loops). Backtracking with color
// refinement; gives up after max_expansions node expansions.
IsoResult is_isomorphic(const MolecularGraph& g, const MolecularGraph& h,
                        int64_t max_expansions = 1000000);

}  // namespace polyforge
